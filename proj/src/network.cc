#include "eqodds/network.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "eqodds/errors.h"
#include "eqodds/log.h"

namespace eqodds {

namespace {

double Norm(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// t = W'u for the (out x in) map, i.e. t_i = sum_j w(i, j) u_j.
std::vector<double> TransposeTimes(const LayerParams& p, std::span<const double> u) {
  std::vector<double> t(p.in, 0.0);
  for (size_t i = 0; i < p.in; ++i) {
    const double* row = &p.weight[i * p.out];
    double s = 0;
    for (size_t j = 0; j < p.out; ++j) s += row[j] * u[j];
    t[i] = s;
  }
  return t;
}

bool AllFinite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

void ValidateSpec(const NetworkSpec& spec) {
  if (spec.input_dim == 0 || spec.output_dim == 0) {
    throw ValidationError("network input and output dimensions must be positive");
  }
  for (size_t w : spec.hidden) {
    if (w == 0) throw ValidationError("hidden layer widths must be positive");
  }
}

NetworkParams InitParams(const NetworkSpec& spec, Rng& rng) {
  ValidateSpec(spec);
  NetworkParams params;
  size_t in = spec.input_dim;
  const size_t n_layers = spec.hidden.size() + 1;
  for (size_t l = 0; l < n_layers; ++l) {
    const bool hidden = l + 1 < n_layers;
    const size_t out = hidden ? spec.hidden[l] : spec.output_dim;
    LayerParams p;
    p.in = in;
    p.out = out;
    p.weight.resize(in * out);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& w : p.weight) w = rng.Uniform(-bound, bound);
    p.bias.assign(out, 0.0);
    if (hidden && spec.layer_norm) {
      p.gamma.assign(out, 1.0);
      p.beta.assign(out, 0.0);
    }
    if (spec.spectral_norm) {
      p.u.resize(out);
      for (double& x : p.u) x = rng.Normal();
      const double n = Norm(p.u);
      for (double& x : p.u) x /= n;
    }
    params.layers.push_back(std::move(p));
    in = out;
  }
  return params;
}

void CheckParams(const NetworkSpec& spec, const NetworkParams& params) {
  const size_t n_layers = spec.hidden.size() + 1;
  if (params.layers.size() != n_layers) {
    throw ContractError("parameter layer count does not match the network spec");
  }
  size_t in = spec.input_dim;
  for (size_t l = 0; l < n_layers; ++l) {
    const LayerParams& p = params.layers[l];
    const bool hidden = l + 1 < n_layers;
    const size_t out = hidden ? spec.hidden[l] : spec.output_dim;
    const size_t norm_len = hidden && spec.layer_norm ? out : 0;
    if (p.in != in || p.out != out || p.weight.size() != in * out ||
        p.bias.size() != out || p.gamma.size() != norm_len ||
        p.beta.size() != norm_len || p.u.size() != (spec.spectral_norm ? out : 0)) {
      throw ContractError("layer " + std::to_string(l) +
                          " parameter shapes do not match the network spec");
    }
    if (!AllFinite(p.weight) || !AllFinite(p.bias) || !AllFinite(p.gamma) ||
        !AllFinite(p.beta) || !AllFinite(p.u)) {
      throw NumericError("layer " + std::to_string(l) + " has non-finite parameters");
    }
    in = out;
  }
}

ForwardResult Forward(const NetworkSpec& spec, const NetworkParams& params,
                      const NetworkInput& x) {
  const size_t n_layers = params.layers.size();
  if (n_layers != spec.hidden.size() + 1) {
    throw ContractError("parameters do not match the network spec");
  }
  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.params = &params;
  cache.generation = params.generation;
  cache.layers.resize(n_layers);

  const SparseView* sparse = std::get_if<SparseView>(&x);
  if (sparse) {
    if (sparse->index.size() != sparse->value.size()) {
      throw ContractError("sparse input index/value length mismatch");
    }
    for (uint32_t i : sparse->index) {
      if (i >= spec.input_dim) {
        throw ContractError("sparse input index " + std::to_string(i) +
                            " exceeds input_dim " + std::to_string(spec.input_dim));
      }
    }
    cache.sparse_first = true;
    cache.sparse_input = *sparse;
  } else {
    const auto& dense = std::get<std::span<const double>>(x);
    if (dense.size() != spec.input_dim) {
      throw ContractError("input has dimension " + std::to_string(dense.size()) +
                          ", network expects " + std::to_string(spec.input_dim));
    }
    cache.layers[0].input.assign(dense.begin(), dense.end());
  }

  for (size_t l = 0; l < n_layers; ++l) {
    const LayerParams& p = params.layers[l];
    LayerCache& c = cache.layers[l];
    const bool hidden = l + 1 < n_layers;
    if (l > 0) c.input = cache.layers[l - 1].act;

    double scale = 1.0;
    if (spec.spectral_norm) {
      std::vector<double> t = TransposeTimes(p, p.u);
      const double sigma = Norm(t);
      if (sigma >= kSpectralNormFloor) {
        for (double& v : t) v /= sigma;
        c.v = std::move(t);
        c.sigma = sigma;
        c.spectral_applied = true;
        scale = 1.0 / sigma;
      } else {
        Log().warn("layer {}: spectral norm estimate below {}, normalization skipped",
                   l, kSpectralNormFloor);
      }
    }

    std::vector<double> s(p.out, 0.0);
    if (l == 0 && sparse) {
      for (size_t k = 0; k < sparse->index.size(); ++k) {
        const double xv = sparse->value[k];
        const double* row = &p.weight[static_cast<size_t>(sparse->index[k]) * p.out];
        for (size_t j = 0; j < p.out; ++j) s[j] += xv * row[j];
      }
    } else {
      for (size_t i = 0; i < p.in; ++i) {
        const double xv = c.input[i];
        if (xv == 0.0) continue;
        const double* row = &p.weight[i * p.out];
        for (size_t j = 0; j < p.out; ++j) s[j] += xv * row[j];
      }
    }
    c.pre.resize(p.out);
    for (size_t j = 0; j < p.out; ++j) c.pre[j] = p.bias[j] + scale * s[j];

    if (hidden) {
      std::vector<double> y;
      if (spec.layer_norm) {
        double mean = 0;
        for (double v : c.pre) mean += v;
        mean /= static_cast<double>(p.out);
        double var = 0;
        for (double v : c.pre) var += (v - mean) * (v - mean);
        var /= static_cast<double>(p.out);
        c.inv_std = 1.0 / std::sqrt(var + kLayerNormEpsilon);
        c.xhat.resize(p.out);
        y.resize(p.out);
        for (size_t j = 0; j < p.out; ++j) {
          c.xhat[j] = (c.pre[j] - mean) * c.inv_std;
          y[j] = p.gamma[j] * c.xhat[j] + p.beta[j];
        }
      } else {
        y = c.pre;
      }
      c.act.resize(p.out);
      for (size_t j = 0; j < p.out; ++j) c.act[j] = y[j] > 0.0 ? y[j] : 0.0;
    } else {
      c.act = c.pre;
    }
    if (!AllFinite(c.pre) || !AllFinite(c.act)) {
      throw NumericError("non-finite activation in layer " + std::to_string(l));
    }
  }

  result.logits = cache.layers.back().act;
  if (spec.output_dim == 1) {
    result.output = {1.0 / (1.0 + std::exp(-result.logits[0]))};
  } else {
    const double mx = *std::max_element(result.logits.begin(), result.logits.end());
    result.output.resize(result.logits.size());
    double total = 0;
    for (size_t j = 0; j < result.logits.size(); ++j) {
      result.output[j] = std::exp(result.logits[j] - mx);
      total += result.output[j];
    }
    for (double& q : result.output) q /= total;
  }
  return result;
}

NetworkGrads ZeroGrads(const NetworkParams& params) {
  NetworkGrads g;
  g.layers.reserve(params.layers.size());
  for (const LayerParams& p : params.layers) {
    LayerGrads lg;
    lg.weight.assign(p.weight.size(), 0.0);
    lg.bias.assign(p.bias.size(), 0.0);
    lg.gamma.assign(p.gamma.size(), 0.0);
    lg.beta.assign(p.beta.size(), 0.0);
    g.layers.push_back(std::move(lg));
  }
  return g;
}

void SetZero(NetworkGrads& grads) {
  for (LayerGrads& g : grads.layers) {
    std::fill(g.weight.begin(), g.weight.end(), 0.0);
    std::fill(g.bias.begin(), g.bias.end(), 0.0);
    std::fill(g.gamma.begin(), g.gamma.end(), 0.0);
    std::fill(g.beta.begin(), g.beta.end(), 0.0);
  }
}

std::vector<double> Backward(const NetworkSpec& spec, const NetworkParams& params,
                             const ForwardCache& cache,
                             std::span<const double> logit_grad, NetworkGrads& grads) {
  if (cache.params != &params || cache.generation != params.generation ||
      cache.layers.size() != params.layers.size()) {
    throw ContractError("forward cache is stale or belongs to other parameters");
  }
  if (logit_grad.size() != spec.output_dim) {
    throw ContractError("loss gradient has the wrong dimension");
  }
  if (grads.layers.size() != params.layers.size()) {
    throw ContractError("gradient container does not match the parameters");
  }
  const size_t n_layers = params.layers.size();
  const bool first_is_sparse = cache.sparse_first;

  std::vector<double> upstream(logit_grad.begin(), logit_grad.end());
  std::vector<double> dpre;
  for (size_t l = n_layers; l-- > 0;) {
    const LayerParams& p = params.layers[l];
    const LayerCache& c = cache.layers[l];
    LayerGrads& g = grads.layers[l];
    const bool hidden = l + 1 < n_layers;

    dpre.assign(p.out, 0.0);
    if (hidden) {
      std::vector<double> dy(p.out);
      for (size_t j = 0; j < p.out; ++j) dy[j] = c.act[j] > 0.0 ? upstream[j] : 0.0;
      if (spec.layer_norm) {
        double m1 = 0, m2 = 0;
        std::vector<double> dxhat(p.out);
        for (size_t j = 0; j < p.out; ++j) {
          g.gamma[j] += dy[j] * c.xhat[j];
          g.beta[j] += dy[j];
          dxhat[j] = dy[j] * p.gamma[j];
          m1 += dxhat[j];
          m2 += dxhat[j] * c.xhat[j];
        }
        m1 /= static_cast<double>(p.out);
        m2 /= static_cast<double>(p.out);
        for (size_t j = 0; j < p.out; ++j) {
          dpre[j] = c.inv_std * (dxhat[j] - m1 - c.xhat[j] * m2);
        }
      } else {
        dpre = dy;
      }
    } else {
      dpre = upstream;
    }
    for (size_t j = 0; j < p.out; ++j) g.bias[j] += dpre[j];

    const double scale = c.spectral_applied ? 1.0 / c.sigma : 1.0;
    // d(loss)/d(W_eff)(i, j) = x_i * dpre_j; with spectral norm,
    // d(loss)/dW = G/sigma - (<G, W> / sigma^2) * v_i u_j.
    double inner = 0;
    const auto accumulate_row = [&](size_t i, double xv) {
      const double* wrow = &p.weight[i * p.out];
      double* grow = &g.weight[i * p.out];
      for (size_t j = 0; j < p.out; ++j) {
        grow[j] += xv * dpre[j] * scale;
        inner += xv * dpre[j] * wrow[j];
      }
    };
    if (l == 0 && first_is_sparse) {
      for (size_t k = 0; k < cache.sparse_input.index.size(); ++k) {
        accumulate_row(cache.sparse_input.index[k], cache.sparse_input.value[k]);
      }
    } else {
      for (size_t i = 0; i < p.in; ++i) {
        if (c.input[i] != 0.0) accumulate_row(i, c.input[i]);
      }
    }
    if (c.spectral_applied) {
      const double coef = inner / (c.sigma * c.sigma);
      for (size_t i = 0; i < p.in; ++i) {
        double* grow = &g.weight[i * p.out];
        const double vi = c.v[i];
        for (size_t j = 0; j < p.out; ++j) grow[j] -= coef * vi * p.u[j];
      }
    }

    if (l == 0 && first_is_sparse) break;
    std::vector<double> dx(p.in, 0.0);
    for (size_t i = 0; i < p.in; ++i) {
      const double* wrow = &p.weight[i * p.out];
      double s = 0;
      for (size_t j = 0; j < p.out; ++j) s += wrow[j] * dpre[j];
      dx[i] = scale * s;
    }
    upstream = std::move(dx);
  }
  if (first_is_sparse) return {};
  return upstream;
}

void PowerIterate(const NetworkSpec& spec, NetworkParams& params) {
  if (!spec.spectral_norm) return;
  for (LayerParams& p : params.layers) {
    std::vector<double> t = TransposeTimes(p, p.u);
    const double tn = Norm(t);
    if (tn < kSpectralNormFloor) continue;
    for (double& v : t) v /= tn;
    std::vector<double> s(p.out, 0.0);
    for (size_t i = 0; i < p.in; ++i) {
      const double* row = &p.weight[i * p.out];
      for (size_t j = 0; j < p.out; ++j) s[j] += row[j] * t[i];
    }
    const double sn = Norm(s);
    if (sn < kSpectralNormFloor) continue;
    for (size_t j = 0; j < p.out; ++j) p.u[j] = s[j] / sn;
  }
  ++params.generation;
}

std::vector<double> LayerNormApply(std::span<const double> x,
                                   std::span<const double> gamma,
                                   std::span<const double> beta) {
  if (x.empty() || gamma.size() != x.size() || beta.size() != x.size()) {
    throw ContractError("layer norm needs non-empty x with matching gamma and beta");
  }
  const double n = static_cast<double>(x.size());
  double mean = 0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n;
  const double inv_std = 1.0 / std::sqrt(var + kLayerNormEpsilon);
  std::vector<double> y(x.size());
  for (size_t j = 0; j < x.size(); ++j) {
    y[j] = (x[j] - mean) * inv_std * gamma[j] + beta[j];
  }
  return y;
}

SpectralResult SpectralNormalize(const Matrix& w, std::span<const double> u, int n_iter) {
  if (w.data.size() != w.rows * w.cols || u.size() != w.rows) {
    throw ContractError("spectral normalize: u must have one entry per matrix row");
  }
  SpectralResult r;
  r.u.assign(u.begin(), u.end());
  r.normalized = w;
  if (Norm(w.data) < kSpectralNormFloor) {
    Log().warn("spectral normalize: matrix norm below {}, left unnormalized",
               kSpectralNormFloor);
    r.skipped = true;
    return r;
  }
  const auto wt_u = [&](std::span<const double> uu) {
    std::vector<double> t(w.cols, 0.0);
    for (size_t rr = 0; rr < w.rows; ++rr) {
      for (size_t cc = 0; cc < w.cols; ++cc) t[cc] += w(rr, cc) * uu[rr];
    }
    return t;
  };
  for (int it = 0; it < n_iter; ++it) {
    std::vector<double> v = wt_u(r.u);
    const double vn = Norm(v);
    if (vn < kSpectralNormFloor) break;
    for (double& x : v) x /= vn;
    std::vector<double> s(w.rows, 0.0);
    for (size_t rr = 0; rr < w.rows; ++rr) {
      for (size_t cc = 0; cc < w.cols; ++cc) s[rr] += w(rr, cc) * v[cc];
    }
    const double sn = Norm(s);
    if (sn < kSpectralNormFloor) break;
    for (size_t rr = 0; rr < w.rows; ++rr) r.u[rr] = s[rr] / sn;
  }
  r.sigma = Norm(wt_u(r.u));
  if (r.sigma < kSpectralNormFloor) {
    r.skipped = true;
    r.sigma = 1.0;
    return r;
  }
  for (double& x : r.normalized.data) x /= r.sigma;
  return r;
}

}  // namespace eqodds
