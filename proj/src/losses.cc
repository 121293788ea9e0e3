#include "eqodds/losses.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "eqodds/errors.h"

namespace eqodds {

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double BinaryCrossEntropy(double p, int y) {
  const double pc = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return y == 1 ? -std::log(pc) : -std::log(1.0 - pc);
}

double MultiClassCrossEntropy(std::span<const double> q, int z) {
  if (z < 0 || static_cast<size_t>(z) >= q.size()) {
    throw ContractError("class index " + std::to_string(z) + " out of range");
  }
  return -std::log(std::clamp(q[z], kProbabilityClamp, 1.0));
}

double BinaryCrossEntropyLogitGrad(double p, int y) {
  if (p < kProbabilityClamp || p > 1.0 - kProbabilityClamp) return 0.0;
  return p - static_cast<double>(y);
}

std::vector<double> MultiClassCrossEntropyLogitGrad(std::span<const double> q, int z) {
  if (z < 0 || static_cast<size_t>(z) >= q.size()) {
    throw ContractError("class index " + std::to_string(z) + " out of range");
  }
  std::vector<double> g(q.size(), 0.0);
  if (q[z] < kProbabilityClamp) return g;
  for (size_t j = 0; j < q.size(); ++j) g[j] = q[j];
  g[z] -= 1.0;
  return g;
}

}  // namespace eqodds
