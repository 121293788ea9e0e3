#ifndef EQODDS_REPORT_H_
#define EQODDS_REPORT_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eqodds/metrics.h"

namespace eqodds {

enum class Attribute : int { kRace = 0, kGender = 1, kAge = 2 };
inline constexpr std::array<Attribute, 3> kAllAttributes = {
    Attribute::kRace, Attribute::kGender, Attribute::kAge};

std::string_view AttributeName(Attribute attribute);
Attribute ParseAttribute(std::string_view name);
int GroupCount(Attribute attribute);
std::string_view GroupName(Attribute attribute, int group);

// Group id per row, one vector per attribute.
struct GroupLabels {
  std::vector<int> race;
  std::vector<int> gender;
  std::vector<int> age;

  const std::vector<int>& For(Attribute attribute) const;
  std::vector<int>& For(Attribute attribute);
};

inline constexpr int kHistogramBins = 50;

struct GroupRow {
  std::string name;
  bool present = false;
  uint64_t n = 0;
  uint64_t positives = 0;
  double incidence = 0;
  std::optional<double> auc_roc;
  std::optional<double> auc_prc;
  std::optional<double> brier;
  ConfusionAtThreshold confusion;
  // Share predicted positive at the threshold.
  double positive_rate = 0;
};

struct Histogram {
  int group = 0;
  int label = 0;
  std::array<uint64_t, kHistogramBins> counts{};
};

struct AttributeReport {
  Attribute attribute = Attribute::kRace;
  std::vector<GroupRow> groups;
  std::optional<double> cv_fpr;
  std::optional<double> cv_fnr;
  std::optional<double> mean_emd_y0;
  std::optional<double> mean_emd_y1;
  // max - min over groups of the predicted-positive rate. Informational.
  std::optional<double> demographic_parity_gap;
  std::vector<Histogram> histograms;
};

struct OverallMetrics {
  uint64_t n = 0;
  uint64_t positives = 0;
  std::optional<double> auc_roc;
  std::optional<double> auc_prc;
  std::optional<double> brier;
};

struct FairnessReport {
  double threshold = kDefaultThreshold;
  OverallMetrics overall;
  std::vector<AttributeReport> attributes;

  const AttributeReport* Find(Attribute attribute) const;
};

// Mean EMD over unordered pairs of groups within one outcome stratum. Groups
// without members in the stratum are skipped; nullopt when no pair remains.
std::optional<double> MeanPairwiseEmd(std::span<const double> scores,
                                      std::span<const int> labels,
                                      std::span<const int> groups, int num_groups,
                                      int stratum);

// Mean of the two stratum-level mean pairwise EMDs (lower is better aligned).
std::optional<double> AlignmentScore(std::span<const double> scores,
                                     std::span<const int> labels,
                                     std::span<const int> groups, int num_groups);

AttributeReport BuildAttributeReport(std::span<const double> scores,
                                     std::span<const int> labels,
                                     std::span<const int> groups, Attribute attribute,
                                     double threshold);

FairnessReport BuildFairnessReport(std::span<const double> scores,
                                   std::span<const int> labels,
                                   const GroupLabels& groups,
                                   std::span<const Attribute> attributes,
                                   double threshold = kDefaultThreshold);

// Serialization. Key order is fixed; undefined values print as "undefined".
std::string FormatReportText(const FairnessReport& report);

struct NamedReport {
  std::string label;
  const FairnessReport* report = nullptr;
};

// metric rows (fnr_cv, fpr_cv, mean_emd_y0, mean_emd_y1) x attribute/label.
std::string FairnessCsv(std::span<const NamedReport> reports);
// metric rows (auc_roc, auc_prc, brier) x label.
std::string PerformanceCsv(std::span<const NamedReport> reports);
// group rows x metric/label.
std::string GroupMetricsCsv(std::span<const NamedReport> reports);
// group,y,bin_left,bin_right,count with group as "attribute=name".
std::string HistogramCsv(const FairnessReport& report);

std::string FormatMetric(const std::optional<double>& value);

}  // namespace eqodds

#endif  // EQODDS_REPORT_H_
