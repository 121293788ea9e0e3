#include "eqodds/adam.h"

#include <cmath>

#include "eqodds/errors.h"

namespace eqodds {

namespace {

template <typename Params, typename Fn>
void ForEachTensor(Params& params, Fn&& fn) {
  for (auto& layer : params.layers) {
    fn(layer.weight);
    fn(layer.bias);
    fn(layer.gamma);
    fn(layer.beta);
  }
}

}  // namespace

void AdamUpdate(std::span<double> params, std::span<const double> grads,
                std::span<double> m, std::span<double> v, uint64_t step,
                const AdamOptions& o) {
  if (grads.size() != params.size() || m.size() != params.size() ||
      v.size() != params.size()) {
    throw ContractError("Adam: parameter, gradient and moment shapes differ");
  }
  for (double g : grads) {
    if (!std::isfinite(g)) throw NumericError("Adam: non-finite gradient");
  }
  const double t = static_cast<double>(step);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  for (size_t i = 0; i < params.size(); ++i) {
    m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * grads[i];
    v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * grads[i] * grads[i];
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    params[i] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
  }
}

AdamState::AdamState(const NetworkParams& params, AdamOptions options)
    : options_(options) {
  ForEachTensor(params, [this](const std::vector<double>& t) {
    m_.emplace_back(t.size(), 0.0);
    v_.emplace_back(t.size(), 0.0);
  });
}

void AdamState::Step(NetworkParams& params, const NetworkGrads& grads) {
  if (grads.layers.size() != params.layers.size()) {
    throw ContractError("Adam: gradient container does not match the parameters");
  }
  std::vector<std::span<const double>> flat_grads;
  ForEachTensor(grads, [&](const std::vector<double>& t) { flat_grads.emplace_back(t); });
  // Validate everything before mutating anything.
  for (const auto& g : flat_grads) {
    for (double x : g) {
      if (!std::isfinite(x)) throw NumericError("Adam: non-finite gradient");
    }
  }
  ++step_;
  size_t k = 0;
  ForEachTensor(params, [&](std::vector<double>& t) {
    AdamUpdate(t, flat_grads[k], m_[k], v_[k], step_, options_);
    ++k;
  });
  ++params.generation;
}

}  // namespace eqodds
