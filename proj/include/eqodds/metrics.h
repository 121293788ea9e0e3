#ifndef EQODDS_METRICS_H_
#define EQODDS_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>

namespace eqodds {

// Decision threshold for FPR/FNR; scores >= threshold predict positive.
inline constexpr double kDefaultThreshold = 0.075;

// Mann-Whitney statistic P(s+ > s-) + P(s+ == s-)/2 via average ranks.
// Throws UndefinedMetricError unless both classes are present.
double AucRoc(std::span<const double> scores, std::span<const int> labels);

// Average precision: mean over positives of the precision at that positive's
// score level. Tied scores form one block evaluated at its lower edge, so
// every positive in the block shares the block's precision
// (TP up to and including the block) / (rows up to and including the block).
// Throws UndefinedMetricError without positives.
double AucPrc(std::span<const double> scores, std::span<const int> labels);

// Mean squared error between score and label. Throws on empty input.
double Brier(std::span<const double> scores, std::span<const int> labels);

struct ConfusionAtThreshold {
  double threshold = kDefaultThreshold;
  uint64_t tp = 0;
  uint64_t fp = 0;
  uint64_t tn = 0;
  uint64_t fn = 0;
  // Absent when the class in the denominator is empty.
  std::optional<double> fpr;
  std::optional<double> fnr;
};

ConfusionAtThreshold ConfusionAt(std::span<const double> scores,
                                 std::span<const int> labels,
                                 double threshold = kDefaultThreshold);

// Population standard deviation over the mean. Throws UndefinedMetricError
// for empty input or a zero mean.
double CoefficientOfVariation(std::span<const double> values);

// 1-Wasserstein distance between two empirical distributions, integrating
// |F_a - F_b| exactly over the merged support. Throws on empty input.
double Emd1d(std::span<const double> a, std::span<const double> b);

}  // namespace eqodds

#endif  // EQODDS_METRICS_H_
