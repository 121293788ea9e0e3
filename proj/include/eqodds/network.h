#ifndef EQODDS_NETWORK_H_
#define EQODDS_NETWORK_H_

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "eqodds/features.h"
#include "eqodds/random.h"

namespace eqodds {

inline constexpr double kLayerNormEpsilon = 1e-5;
inline constexpr double kSpectralNormFloor = 1e-12;

// Fully-connected ReLU network. Hidden layers are affine -> [layer norm] ->
// ReLU. The output layer is affine; output_dim == 1 reads the single logit
// through a sigmoid, output_dim > 1 through a softmax. With spectral_norm
// every affine weight is divided by its estimated largest singular value.
struct NetworkSpec {
  size_t input_dim = 1;
  std::vector<size_t> hidden;
  size_t output_dim = 1;
  bool layer_norm = false;
  bool spectral_norm = false;

  bool operator==(const NetworkSpec&) const = default;
};

// Throws ValidationError for non-positive dimensions.
void ValidateSpec(const NetworkSpec& spec);

struct LayerParams {
  size_t in = 0;
  size_t out = 0;
  // Input-major: weight[i * out + j] connects input i to unit j. Sparse inputs
  // then touch contiguous rows.
  std::vector<double> weight;
  std::vector<double> bias;
  // Hidden layers with layer norm only.
  std::vector<double> gamma;
  std::vector<double> beta;
  // Power-iteration vector (length out), spectral norm only. Not trained.
  std::vector<double> u;

  double& w(size_t i, size_t j) { return weight[i * out + j]; }
  double w(size_t i, size_t j) const { return weight[i * out + j]; }
};

struct NetworkParams {
  std::vector<LayerParams> layers;
  // Bumped on every in-place update so stale forward caches are detected.
  uint64_t generation = 0;
};

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases 0, gamma 1, beta 0,
// u a normalized Gaussian draw.
NetworkParams InitParams(const NetworkSpec& spec, Rng& rng);

// Shapes consistent with spec and every entry finite.
void CheckParams(const NetworkSpec& spec, const NetworkParams& params);

using NetworkInput = std::variant<SparseView, std::span<const double>>;

struct LayerCache {
  std::vector<double> input;  // empty for a sparse first layer
  std::vector<double> pre;    // affine output
  std::vector<double> xhat;   // normalized pre (layer norm)
  double inv_std = 0;
  std::vector<double> act;    // post-activation (hidden) or logits (output)
  double sigma = 1;           // spectral estimate used (1 when disabled/skipped)
  std::vector<double> v;      // right singular estimate, spectral only
  bool spectral_applied = false;
};

struct ForwardCache {
  const NetworkParams* params = nullptr;
  uint64_t generation = 0;
  bool sparse_first = false;
  SparseView sparse_input;
  std::vector<LayerCache> layers;
};

struct ForwardResult {
  std::vector<double> output;  // sigmoid probability or softmax distribution
  std::vector<double> logits;
  ForwardCache cache;
};

// Throws ContractError on a dimension mismatch and NumericError naming the
// layer when an activation is not finite. A sparse input must stay alive
// until the matching Backward call.
ForwardResult Forward(const NetworkSpec& spec, const NetworkParams& params,
                      const NetworkInput& x);

struct LayerGrads {
  std::vector<double> weight;
  std::vector<double> bias;
  std::vector<double> gamma;
  std::vector<double> beta;
};

struct NetworkGrads {
  std::vector<LayerGrads> layers;
};

NetworkGrads ZeroGrads(const NetworkParams& params);
void SetZero(NetworkGrads& grads);

// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(logits).
// Returns d(loss)/d(input) for dense inputs, empty for sparse inputs.
// Throws ContractError if `cache` does not come from Forward on `params` at
// its current generation.
std::vector<double> Backward(const NetworkSpec& spec, const NetworkParams& params,
                             const ForwardCache& cache,
                             std::span<const double> logit_grad, NetworkGrads& grads);

// One power-iteration round per spectrally normalized layer, updating u.
void PowerIterate(const NetworkSpec& spec, NetworkParams& params);

// (x - mean) / sqrt(var + eps) * gamma + beta with population variance.
std::vector<double> LayerNormApply(std::span<const double> x,
                                   std::span<const double> gamma,
                                   std::span<const double> beta);

// Dense row-major matrix used by the standalone spectral routine.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;
  double operator()(size_t r, size_t c) const { return data[r * cols + c]; }
  double& operator()(size_t r, size_t c) { return data[r * cols + c]; }
};

struct SpectralResult {
  Matrix normalized;
  std::vector<double> u;  // left singular estimate, length rows
  double sigma = 1;
  bool skipped = false;   // norm below kSpectralNormFloor; identity returned
};

// n_iter rounds of v = W'u/|W'u|, u = Wv/|Wv|, then sigma = |W'u| (= u'Wv for
// the refreshed v). Returns W / sigma.
SpectralResult SpectralNormalize(const Matrix& w, std::span<const double> u,
                                 int n_iter = 1);

}  // namespace eqodds

#endif  // EQODDS_NETWORK_H_
