#include "eqodds/report.h"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <utility>

#include "eqodds/errors.h"
#include "eqodds/log.h"
#include "eqodds/patient.h"

namespace eqodds {

namespace {

template <typename Fn>
std::optional<double> Defined(Fn&& fn) {
  try {
    return fn();
  } catch (const UndefinedMetricError&) {
    return std::nullopt;
  }
}

std::string FormatCount(uint64_t x) { return std::to_string(x); }

}  // namespace

std::string FormatMetric(const std::optional<double>& value) {
  if (!value) return "undefined";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", *value);
  return buf;
}

std::string_view AttributeName(Attribute attribute) {
  switch (attribute) {
    case Attribute::kRace:
      return "race";
    case Attribute::kGender:
      return "gender";
    case Attribute::kAge:
      return "age";
  }
  return "race";
}

Attribute ParseAttribute(std::string_view name) {
  for (Attribute a : kAllAttributes) {
    if (AttributeName(a) == name) return a;
  }
  throw ValidationError("unknown sensitive attribute '" + std::string(name) + "'");
}

int GroupCount(Attribute attribute) {
  switch (attribute) {
    case Attribute::kRace:
      return kNumRaces;
    case Attribute::kGender:
      return kNumGenders;
    case Attribute::kAge:
      return kNumAgeGroups;
  }
  return 0;
}

std::string_view GroupName(Attribute attribute, int group) {
  switch (attribute) {
    case Attribute::kRace:
      return kRaceNames.at(group);
    case Attribute::kGender:
      return kGenderNames.at(group);
    case Attribute::kAge:
      return kAgeGroupNames.at(group);
  }
  return "";
}

const std::vector<int>& GroupLabels::For(Attribute attribute) const {
  switch (attribute) {
    case Attribute::kRace:
      return race;
    case Attribute::kGender:
      return gender;
    case Attribute::kAge:
      return age;
  }
  return race;
}

std::vector<int>& GroupLabels::For(Attribute attribute) {
  return const_cast<std::vector<int>&>(std::as_const(*this).For(attribute));
}

const AttributeReport* FairnessReport::Find(Attribute attribute) const {
  for (const AttributeReport& a : attributes) {
    if (a.attribute == attribute) return &a;
  }
  return nullptr;
}

std::optional<double> MeanPairwiseEmd(std::span<const double> scores,
                                      std::span<const int> labels,
                                      std::span<const int> groups, int num_groups,
                                      int stratum) {
  std::vector<std::vector<double>> by_group(num_groups);
  for (size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != stratum) continue;
    if (groups[i] < 0 || groups[i] >= num_groups) {
      throw ContractError("group id out of range");
    }
    by_group[groups[i]].push_back(scores[i]);
  }
  double total = 0;
  int pairs = 0;
  for (int a = 0; a < num_groups; ++a) {
    if (by_group[a].empty()) continue;
    for (int b = a + 1; b < num_groups; ++b) {
      if (by_group[b].empty()) continue;
      total += Emd1d(by_group[a], by_group[b]);
      ++pairs;
    }
  }
  if (pairs == 0) return std::nullopt;
  return total / pairs;
}

std::optional<double> AlignmentScore(std::span<const double> scores,
                                     std::span<const int> labels,
                                     std::span<const int> groups, int num_groups) {
  const auto y0 = MeanPairwiseEmd(scores, labels, groups, num_groups, 0);
  const auto y1 = MeanPairwiseEmd(scores, labels, groups, num_groups, 1);
  if (!y0 || !y1) return std::nullopt;
  return 0.5 * (*y0 + *y1);
}

AttributeReport BuildAttributeReport(std::span<const double> scores,
                                     std::span<const int> labels,
                                     std::span<const int> groups, Attribute attribute,
                                     double threshold) {
  if (groups.size() != scores.size() || labels.size() != scores.size()) {
    throw ContractError("scores, labels and groups differ in length");
  }
  const int k = GroupCount(attribute);
  AttributeReport rep;
  rep.attribute = attribute;

  std::vector<std::vector<double>> group_scores(k);
  std::vector<std::vector<int>> group_labels(k);
  for (size_t i = 0; i < scores.size(); ++i) {
    if (groups[i] < 0 || groups[i] >= k) throw ContractError("group id out of range");
    group_scores[groups[i]].push_back(scores[i]);
    group_labels[groups[i]].push_back(labels[i]);
  }

  std::vector<double> fprs, fnrs, positive_rates;
  for (int g = 0; g < k; ++g) {
    GroupRow row;
    row.name = std::string(GroupName(attribute, g));
    const auto& s = group_scores[g];
    const auto& y = group_labels[g];
    row.n = s.size();
    row.present = !s.empty();
    if (row.present) {
      row.positives = static_cast<uint64_t>(std::count(y.begin(), y.end(), 1));
      row.incidence = static_cast<double>(row.positives) / static_cast<double>(row.n);
      row.auc_roc = Defined([&] { return AucRoc(s, y); });
      row.auc_prc = Defined([&] { return AucPrc(s, y); });
      row.brier = Brier(s, y);
      row.confusion = ConfusionAt(s, y, threshold);
      row.positive_rate =
          static_cast<double>(row.confusion.tp + row.confusion.fp) / static_cast<double>(row.n);
      positive_rates.push_back(row.positive_rate);
      if (row.confusion.fpr) {
        fprs.push_back(*row.confusion.fpr);
      } else {
        Log().warn("{} group {}: FPR undefined (no negatives), excluded from CV",
                   AttributeName(attribute), row.name);
      }
      if (row.confusion.fnr) {
        fnrs.push_back(*row.confusion.fnr);
      } else {
        Log().warn("{} group {}: FNR undefined (no positives), excluded from CV",
                   AttributeName(attribute), row.name);
      }
    } else {
      row.confusion.threshold = threshold;
      Log().warn("{} group {} has no members", AttributeName(attribute), row.name);
    }
    rep.groups.push_back(std::move(row));

    for (int label = 0; label <= 1; ++label) {
      Histogram h;
      h.group = g;
      h.label = label;
      for (size_t i = 0; i < s.size(); ++i) {
        if (y[i] != label) continue;
        int bin = static_cast<int>(s[i] * kHistogramBins);
        bin = std::clamp(bin, 0, kHistogramBins - 1);
        ++h.counts[bin];
      }
      rep.histograms.push_back(h);
    }
  }
  rep.cv_fpr = Defined([&] { return CoefficientOfVariation(fprs); });
  rep.cv_fnr = Defined([&] { return CoefficientOfVariation(fnrs); });
  rep.mean_emd_y0 = MeanPairwiseEmd(scores, labels, groups, k, 0);
  rep.mean_emd_y1 = MeanPairwiseEmd(scores, labels, groups, k, 1);
  if (!positive_rates.empty()) {
    const auto [lo, hi] = std::minmax_element(positive_rates.begin(), positive_rates.end());
    rep.demographic_parity_gap = *hi - *lo;
  }
  return rep;
}

FairnessReport BuildFairnessReport(std::span<const double> scores,
                                   std::span<const int> labels,
                                   const GroupLabels& groups,
                                   std::span<const Attribute> attributes,
                                   double threshold) {
  FairnessReport report;
  report.threshold = threshold;
  report.overall.n = scores.size();
  report.overall.positives =
      static_cast<uint64_t>(std::count(labels.begin(), labels.end(), 1));
  report.overall.auc_roc = Defined([&] { return AucRoc(scores, labels); });
  report.overall.auc_prc = Defined([&] { return AucPrc(scores, labels); });
  report.overall.brier = Defined([&] { return Brier(scores, labels); });
  for (Attribute a : attributes) {
    report.attributes.push_back(
        BuildAttributeReport(scores, labels, groups.For(a), a, threshold));
  }
  return report;
}

std::string FormatReportText(const FairnessReport& r) {
  std::ostringstream out;
  const auto kv = [&out](const std::string& key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  kv("threshold", FormatMetric(r.threshold));
  kv("overall.n", FormatCount(r.overall.n));
  kv("overall.positives", FormatCount(r.overall.positives));
  kv("overall.auc_roc", FormatMetric(r.overall.auc_roc));
  kv("overall.auc_prc", FormatMetric(r.overall.auc_prc));
  kv("overall.brier", FormatMetric(r.overall.brier));
  for (const AttributeReport& a : r.attributes) {
    const std::string p(AttributeName(a.attribute));
    kv(p + ".fnr_cv", FormatMetric(a.cv_fnr));
    kv(p + ".fpr_cv", FormatMetric(a.cv_fpr));
    kv(p + ".mean_emd_y0", FormatMetric(a.mean_emd_y0));
    kv(p + ".mean_emd_y1", FormatMetric(a.mean_emd_y1));
    kv(p + ".demographic_parity_gap", FormatMetric(a.demographic_parity_gap));
    for (const GroupRow& g : a.groups) {
      const std::string q = p + ".group." + g.name;
      kv(q + ".present", g.present ? "true" : "false");
      kv(q + ".n", FormatCount(g.n));
      kv(q + ".positives", FormatCount(g.positives));
      kv(q + ".incidence", FormatMetric(g.incidence));
      kv(q + ".auc_roc", FormatMetric(g.auc_roc));
      kv(q + ".auc_prc", FormatMetric(g.auc_prc));
      kv(q + ".brier", FormatMetric(g.brier));
      kv(q + ".fpr", FormatMetric(g.confusion.fpr));
      kv(q + ".fnr", FormatMetric(g.confusion.fnr));
      kv(q + ".tp", FormatCount(g.confusion.tp));
      kv(q + ".fp", FormatCount(g.confusion.fp));
      kv(q + ".tn", FormatCount(g.confusion.tn));
      kv(q + ".fn", FormatCount(g.confusion.fn));
    }
  }
  return out.str();
}

std::string FairnessCsv(std::span<const NamedReport> reports) {
  std::ostringstream out;
  out << "metric";
  for (Attribute a : kAllAttributes) {
    for (const NamedReport& nr : reports) {
      if (nr.report->Find(a)) out << ',' << AttributeName(a) << ':' << nr.label;
    }
  }
  out << '\n';
  using Field = std::optional<double> AttributeReport::*;
  const std::pair<const char*, Field> rows[] = {
      {"fnr_cv", &AttributeReport::cv_fnr},
      {"fpr_cv", &AttributeReport::cv_fpr},
      {"mean_emd_y0", &AttributeReport::mean_emd_y0},
      {"mean_emd_y1", &AttributeReport::mean_emd_y1},
  };
  for (const auto& [name, field] : rows) {
    out << name;
    for (Attribute a : kAllAttributes) {
      for (const NamedReport& nr : reports) {
        if (const AttributeReport* ar = nr.report->Find(a)) {
          out << ',' << FormatMetric(ar->*field);
        }
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string PerformanceCsv(std::span<const NamedReport> reports) {
  std::ostringstream out;
  out << "metric";
  for (const NamedReport& nr : reports) out << ',' << nr.label;
  out << '\n';
  using Field = std::optional<double> OverallMetrics::*;
  const std::pair<const char*, Field> rows[] = {
      {"auc_roc", &OverallMetrics::auc_roc},
      {"auc_prc", &OverallMetrics::auc_prc},
      {"brier", &OverallMetrics::brier},
  };
  for (const auto& [name, field] : rows) {
    out << name;
    for (const NamedReport& nr : reports) out << ',' << FormatMetric(nr.report->overall.*field);
    out << '\n';
  }
  return out.str();
}

std::string GroupMetricsCsv(std::span<const NamedReport> reports) {
  std::ostringstream out;
  using Field = std::optional<double> GroupRow::*;
  const std::pair<const char*, Field> metrics[] = {
      {"auc_roc", &GroupRow::auc_roc},
      {"auc_prc", &GroupRow::auc_prc},
      {"brier", &GroupRow::brier},
  };
  out << "group";
  for (const auto& [name, field] : metrics) {
    for (const NamedReport& nr : reports) out << ',' << name << ':' << nr.label;
  }
  out << '\n';
  for (Attribute a : kAllAttributes) {
    for (int g = 0; g < GroupCount(a); ++g) {
      bool any = false;
      for (const NamedReport& nr : reports) any = any || nr.report->Find(a) != nullptr;
      if (!any) continue;
      out << AttributeName(a) << '=' << GroupName(a, g);
      for (const auto& [name, field] : metrics) {
        for (const NamedReport& nr : reports) {
          const AttributeReport* ar = nr.report->Find(a);
          out << ',' << (ar ? FormatMetric(ar->groups[g].*field) : "undefined");
        }
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string HistogramCsv(const FairnessReport& report) {
  std::ostringstream out;
  out << "group,y,bin_left,bin_right,count\n";
  char buf[96];
  for (const AttributeReport& a : report.attributes) {
    for (const Histogram& h : a.histograms) {
      for (int b = 0; b < kHistogramBins; ++b) {
        std::snprintf(buf, sizeof(buf), "%s=%s,%d,%.2f,%.2f,%llu",
                      AttributeName(a.attribute).data(),
                      GroupName(a.attribute, h.group).data(), h.label,
                      static_cast<double>(b) / kHistogramBins,
                      static_cast<double>(b + 1) / kHistogramBins,
                      static_cast<unsigned long long>(h.counts[b]));
        out << buf << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace eqodds
