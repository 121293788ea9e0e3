#ifndef EQODDS_ADAM_H_
#define EQODDS_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "eqodds/network.h"

namespace eqodds {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over one flat tensor; `step` is the 1-based count after
// this update. Throws NumericError on a non-finite gradient.
void AdamUpdate(std::span<double> params, std::span<const double> grads,
                std::span<double> m, std::span<double> v, uint64_t step,
                const AdamOptions& options);

// Moment accumulators for every trainable tensor of a network (weights,
// biases, layer-norm gamma/beta; the spectral u vectors are not trained).
class AdamState {
 public:
  AdamState(const NetworkParams& params, AdamOptions options);

  uint64_t step() const { return step_; }
  const AdamOptions& options() const { return options_; }

  // Applies one update and bumps params.generation.
  void Step(NetworkParams& params, const NetworkGrads& grads);

 private:
  AdamOptions options_;
  uint64_t step_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace eqodds

#endif  // EQODDS_ADAM_H_
