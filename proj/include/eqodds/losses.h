#ifndef EQODDS_LOSSES_H_
#define EQODDS_LOSSES_H_

#include <span>
#include <vector>

namespace eqodds {

// Probabilities are clamped to [kProbabilityClamp, 1 - kProbabilityClamp]
// before taking logs, so every loss value is at most -ln(1e-7) ~= 16.118.
inline constexpr double kProbabilityClamp = 1e-7;

double Sigmoid(double x);

// -[y log p + (1 - y) log(1 - p)].
double BinaryCrossEntropy(double p, int y);
// -log q[z].
double MultiClassCrossEntropy(std::span<const double> q, int z);

// Gradients with respect to the logits feeding the sigmoid / softmax. They
// are zero wherever the clamp is active, matching the clamped loss.
double BinaryCrossEntropyLogitGrad(double p, int y);
std::vector<double> MultiClassCrossEntropyLogitGrad(std::span<const double> q, int z);

}  // namespace eqodds

#endif  // EQODDS_LOSSES_H_
