#include "eqodds/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "eqodds/errors.h"

namespace eqodds {

namespace {

void CheckPaired(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ContractError("scores and labels differ in length");
  }
  for (size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw ContractError("non-finite score");
    if (labels[i] != 0 && labels[i] != 1) throw ContractError("labels must be 0 or 1");
  }
}

std::vector<size_t> OrderByScore(std::span<const double> scores, bool descending) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  return order;
}

}  // namespace

double AucRoc(std::span<const double> scores, std::span<const int> labels) {
  CheckPaired(scores, labels);
  const std::vector<size_t> order = OrderByScore(scores, /*descending=*/false);
  double n_pos = 0, rank_sum = 0;
  for (size_t k = 0; k < order.size();) {
    size_t end = k;
    while (end < order.size() && scores[order[end]] == scores[order[k]]) ++end;
    // Ranks k+1 .. end share their average.
    const double avg_rank = 0.5 * static_cast<double>(k + 1 + end);
    for (size_t t = k; t < end; ++t) {
      if (labels[order[t]] == 1) {
        rank_sum += avg_rank;
        n_pos += 1;
      }
    }
    k = end;
  }
  const double n_neg = static_cast<double>(scores.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw UndefinedMetricError("AUC-ROC needs at least one positive and one negative");
  }
  return (rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg);
}

double AucPrc(std::span<const double> scores, std::span<const int> labels) {
  CheckPaired(scores, labels);
  const std::vector<size_t> order = OrderByScore(scores, /*descending=*/true);
  const double n_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  if (n_pos == 0) throw UndefinedMetricError("AUC-PRC needs at least one positive");
  double tp = 0, seen = 0, ap = 0;
  for (size_t k = 0; k < order.size();) {
    size_t end = k;
    double block_pos = 0;
    while (end < order.size() && scores[order[end]] == scores[order[k]]) {
      block_pos += labels[order[end]];
      ++end;
    }
    tp += block_pos;
    seen += static_cast<double>(end - k);
    ap += block_pos * (tp / seen);
    k = end;
  }
  return ap / n_pos;
}

double Brier(std::span<const double> scores, std::span<const int> labels) {
  CheckPaired(scores, labels);
  if (scores.empty()) throw UndefinedMetricError("Brier score of an empty set");
  double s = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    const double d = scores[i] - labels[i];
    s += d * d;
  }
  return s / static_cast<double>(scores.size());
}

ConfusionAtThreshold ConfusionAt(std::span<const double> scores,
                                 std::span<const int> labels, double threshold) {
  CheckPaired(scores, labels);
  ConfusionAtThreshold c;
  c.threshold = threshold;
  for (size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      predicted ? ++c.tp : ++c.fn;
    } else {
      predicted ? ++c.fp : ++c.tn;
    }
  }
  if (c.fp + c.tn > 0) {
    c.fpr = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
  }
  if (c.fn + c.tp > 0) {
    c.fnr = static_cast<double>(c.fn) / static_cast<double>(c.fn + c.tp);
  }
  return c;
}

double CoefficientOfVariation(std::span<const double> values) {
  if (values.empty()) {
    throw UndefinedMetricError("coefficient of variation of an empty set");
  }
  const double n = static_cast<double>(values.size());
  double mean = 0;
  for (double v : values) mean += v;
  mean /= n;
  if (mean == 0.0) {
    throw UndefinedMetricError("coefficient of variation with zero mean");
  }
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;
  return std::sqrt(var) / mean;
}

double Emd1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw UndefinedMetricError("earth mover's distance needs two non-empty samples");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  for (double x : sa) {
    if (!std::isfinite(x)) throw ContractError("non-finite sample");
  }
  for (double x : sb) {
    if (!std::isfinite(x)) throw ContractError("non-finite sample");
  }
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());

  // Sweep the merged support; between consecutive support points both CDFs
  // are constant.
  size_t i = 0, j = 0;
  double total = 0;
  double t = std::min(sa.front(), sb.front());
  while (i < sa.size() || j < sb.size()) {
    while (i < sa.size() && sa[i] <= t) ++i;
    while (j < sb.size() && sb[j] <= t) ++j;
    if (i == sa.size() && j == sb.size()) break;
    const double next = std::min(i < sa.size() ? sa[i] : sb[j],
                                 j < sb.size() ? sb[j] : sa[i]);
    const double diff = std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb);
    total += diff * (next - t);
    t = next;
  }
  return total;
}

}  // namespace eqodds
