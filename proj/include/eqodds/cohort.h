#ifndef EQODDS_COHORT_H_
#define EQODDS_COHORT_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqodds/codes.h"
#include "eqodds/date.h"
#include "eqodds/patient.h"
#include "eqodds/random.h"

namespace eqodds {

// Record-extent requirements for index selection, in days.
inline constexpr long kMinEncounterSpanDays = 730;
inline constexpr long kMinHistoryDays = 365;
inline constexpr long kMinFollowupDays = 365;
inline constexpr int kMinIndexAge = 40;
inline constexpr int kLipidLookbackYears = 5;
inline constexpr long kFatalChdWindowDays = 365;

struct IndexedPatient {
  PatientRecord patient;
  Date index_time;
  // min(last event date, death date). Reporting only; labeling uses the whole
  // post-index record.
  Date followup_end;
};

// Age bins [40,55), [55,65), [65,75), [75,inf).
struct GroupAssignment {
  int race_group = 0;
  int gender_group = 0;
  int age_group = 0;

  bool operator==(const GroupAssignment&) const = default;
};

// Encounter dates (distinct event dates) that qualify as an index time. Empty
// when the patient fails the encounter-span requirement.
std::vector<Date> EligibleIndexDates(const PatientRecord& patient);

// Uniform draw over EligibleIndexDates; nullopt means the patient is excluded.
std::optional<IndexedPatient> SelectIndexTime(PatientRecord patient, Rng& rng);

// True iff a CVD diagnosis occurs strictly before the index time, or a
// lipid-lowering order falls in [index - 5 years, index).
bool ApplyExclusions(const IndexedPatient& ip, const CodeList& cvd_codes,
                     const CodeList& lipid_codes);

// 1 iff an ASCVD diagnosis occurs at or after the index time, or a CHD
// diagnosis at or after the index time is followed by death within 365 days.
int LabelOutcome(const IndexedPatient& ip, const CodeList& ascvd_codes,
                 const CodeList& chd_codes);

int AgeGroupForAge(int age_years);

// Throws ContractError when the patient is younger than 40 at index.
GroupAssignment AssignGroups(const IndexedPatient& ip);

enum class Split : int { kTrain = 0, kValidation = 1, kTest = 2 };
std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct CohortSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

// Seeded Fisher-Yates shuffle, then floor(N * r) rows for validation and test;
// the remainder goes to training. Each output list keeps input order.
CohortSplit SplitCohort(std::span<const std::string> ids, const SplitRatios& ratios,
                        uint64_t seed);

}  // namespace eqodds

#endif  // EQODDS_COHORT_H_
