#include "eqodds/cohort.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eqodds/errors.h"

namespace eqodds {

std::vector<Date> EligibleIndexDates(const PatientRecord& patient) {
  if (patient.events.empty()) return {};

  std::vector<Date> encounters;
  for (const ClinicalEvent& e : patient.events) {
    if (AgeInYears(patient.birth_date, e.date) < kMinIndexAge) continue;
    if (encounters.empty() || encounters.back() != e.date) {
      encounters.push_back(e.date);
    }
  }
  if (encounters.size() < 2 ||
      DaysBetween(encounters.front(), encounters.back()) < kMinEncounterSpanDays) {
    return {};
  }

  const Date first = patient.events.front().date;
  Date end = patient.events.back().date;
  if (patient.death_date && *patient.death_date < end) end = *patient.death_date;

  std::vector<Date> eligible;
  for (const Date d : encounters) {
    if (DaysBetween(first, d) >= kMinHistoryDays &&
        DaysBetween(d, end) >= kMinFollowupDays) {
      eligible.push_back(d);
    }
  }
  return eligible;
}

std::optional<IndexedPatient> SelectIndexTime(PatientRecord patient, Rng& rng) {
  const std::vector<Date> eligible = EligibleIndexDates(patient);
  if (eligible.empty()) return std::nullopt;
  const Date index = eligible[rng.UniformInt(eligible.size())];
  Date end = patient.events.back().date;
  if (patient.death_date && *patient.death_date < end) end = *patient.death_date;
  return IndexedPatient{std::move(patient), index, end};
}

bool ApplyExclusions(const IndexedPatient& ip, const CodeList& cvd_codes,
                     const CodeList& lipid_codes) {
  const Date lipid_window_start = AddYears(ip.index_time, -kLipidLookbackYears);
  for (const ClinicalEvent& e : ip.patient.events) {
    if (e.date >= ip.index_time) break;
    if (e.domain == Domain::kDiagnosis && cvd_codes.Contains(e.code)) return true;
    if (e.domain == Domain::kMedicationOrder && e.date >= lipid_window_start &&
        lipid_codes.Contains(e.code)) {
      return true;
    }
  }
  return false;
}

int LabelOutcome(const IndexedPatient& ip, const CodeList& ascvd_codes,
                 const CodeList& chd_codes) {
  const auto& death = ip.patient.death_date;
  for (const ClinicalEvent& e : ip.patient.events) {
    if (e.date < ip.index_time || e.domain != Domain::kDiagnosis) continue;
    if (ascvd_codes.Contains(e.code)) return 1;
    if (death && chd_codes.Contains(e.code) &&
        DaysBetween(e.date, *death) <= kFatalChdWindowDays) {
      return 1;
    }
  }
  return 0;
}

int AgeGroupForAge(int age_years) {
  if (age_years < kMinIndexAge) {
    throw ContractError("age " + std::to_string(age_years) +
                        " is below the cohort minimum of 40");
  }
  if (age_years < 55) return 0;
  if (age_years < 65) return 1;
  if (age_years < 75) return 2;
  return 3;
}

GroupAssignment AssignGroups(const IndexedPatient& ip) {
  GroupAssignment g;
  g.race_group = static_cast<int>(ip.patient.race);
  g.gender_group = static_cast<int>(ip.patient.gender);
  g.age_group = AgeGroupForAge(AgeInYears(ip.patient.birth_date, ip.index_time));
  return g;
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kValidation;
  if (name == "test") return Split::kTest;
  throw ValidationError("unknown split '" + std::string(name) +
                        "' (expected train, val or test)");
}

CohortSplit SplitCohort(std::span<const std::string> ids, const SplitRatios& ratios,
                        uint64_t seed) {
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    throw ValidationError("split ratios must be non-negative and sum to 1");
  }
  const size_t n = ids.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::Derive(seed, "split");
  for (size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.UniformInt(i)]);
  }
  // The epsilon keeps exact products such as 10 * 0.1 from flooring down.
  const auto take = [n](double r) {
    return static_cast<size_t>(std::floor(static_cast<double>(n) * r + 1e-9));
  };
  const size_t n_val = take(ratios.validation);
  const size_t n_test = take(ratios.test);
  const size_t n_train = n - n_val - n_test;

  std::vector<Split> assignment(n);
  for (size_t k = 0; k < n; ++k) {
    assignment[order[k]] = k < n_train            ? Split::kTrain
                           : k < n_train + n_val ? Split::kValidation
                                                 : Split::kTest;
  }
  CohortSplit out;
  for (size_t i = 0; i < n; ++i) {
    switch (assignment[i]) {
      case Split::kTrain:
        out.train.push_back(ids[i]);
        break;
      case Split::kValidation:
        out.validation.push_back(ids[i]);
        break;
      case Split::kTest:
        out.test.push_back(ids[i]);
        break;
    }
  }
  return out;
}

}  // namespace eqodds
