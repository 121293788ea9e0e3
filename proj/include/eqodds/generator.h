#ifndef EQODDS_GENERATOR_H_
#define EQODDS_GENERATOR_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "eqodds/cohort.h"
#include "eqodds/patient.h"

namespace eqodds {

// Knobs for the synthetic longitudinal cohort.
//
// Each patient gets a latent logistic risk u. The outcome is planted iff
// u + logit(p_cell) > 0, where p_cell = base_incidence times the three group
// multipliers, so cell incidences are exact. Informative concepts appear in
// the pre-index history with probability
// sigmoid(offset + signal_strength * (u + shift)), where shift is the sum of
// the patient's per-group score shifts. A non-zero shift makes a group look
// riskier (or safer) than it is, which a model trained without a fairness
// constraint turns into group-dependent score distributions.
struct SyntheticCohortConfig {
  uint64_t n_patients = 20000;
  std::array<double, kNumRaces> race_proportions = {1.0 / 6, 1.0 / 6, 1.0 / 6,
                                                    1.0 / 6, 1.0 / 6, 1.0 / 6};
  std::array<double, kNumGenders> gender_proportions = {0.5, 0.5};
  std::array<double, kNumAgeGroups> age_proportions = {0.25, 0.25, 0.25, 0.25};

  double base_incidence = 0.0135;
  std::array<double, kNumRaces> race_incidence_multiplier = {1, 1, 1, 1, 1, 1};
  std::array<double, kNumGenders> gender_incidence_multiplier = {1, 1};
  std::array<double, kNumAgeGroups> age_incidence_multiplier = {1, 1, 1, 1};

  std::array<double, kNumRaces> race_score_shift = {0, 0, 0, 0, 0, 0};
  std::array<double, kNumGenders> gender_score_shift = {0, 0};
  std::array<double, kNumAgeGroups> age_score_shift = {0, 0, 0, 0};

  uint32_t concept_vocab_size = 191;
  double mean_events_per_patient = 20.0;
  uint32_t n_informative = 24;
  double signal_strength = 0.6;
  double informative_offset = -2.5;

  // Share of positives planted through a CHD code followed by death.
  double fatal_chd_fraction = 0.1;
  // Share of negatives carrying a CHD code without a qualifying death.
  double nonfatal_chd_rate = 0.02;
  // Share of patients planted with a prior lipid-lowering order or CVD
  // diagnosis, which exclusion removes.
  double exclusion_fraction = 0.0;
  double death_rate = 0.02;

  uint64_t seed = 0;
};

// Throws ValidationError naming the offending field.
void ValidateConfig(const SyntheticCohortConfig& config);

// Group proportions and incidences from the reference cohort characteristics
// table (250,509 patients, overall incidence 0.0135).
SyntheticCohortConfig ReferenceCohortConfig(uint64_t n_patients, uint64_t seed);

double CellIncidence(const SyntheticCohortConfig& config, int race, int gender,
                     int age_group);

// What the generator planted for one patient.
struct PlantedTruth {
  GroupAssignment groups;
  int outcome = 0;
  bool excluded = false;
  // Days from the middle of the eligible index window to the record end.
  long followup_days = 0;
};

struct SyntheticCohort {
  std::vector<PatientRecord> records;
  std::vector<PlantedTruth> truth;
};

// Deterministic for a fixed config; patient i draws from a stream derived
// from (seed, i), so output does not depend on generation order.
SyntheticCohort GenerateSyntheticCohort(const SyntheticCohortConfig& config);

// Exact mean and variance of the extracted count and positive count for one
// group, under the generator's model.
struct GroupExpectation {
  double count_mean = 0;
  double count_variance = 0;
  double positive_mean = 0;
  double positive_variance = 0;
};

struct CohortExpectation {
  std::array<GroupExpectation, kNumRaces> race;
  std::array<GroupExpectation, kNumGenders> gender;
  std::array<GroupExpectation, kNumAgeGroups> age;
  GroupExpectation all;
};

CohortExpectation ExpectedCohortCounts(const SyntheticCohortConfig& config);

// One row of the cohort summary table: group, count, incidence, mean
// follow-up in years.
struct SummaryRow {
  std::string group;
  uint64_t count = 0;
  double incidence = 0;
  double mean_followup_years = 0;
};

// Rows Asian..White, Female, Male, the four age bins, then All.
std::vector<SummaryRow> SummarizeCohort(const std::vector<GroupAssignment>& groups,
                                        const std::vector<int>& outcomes,
                                        const std::vector<long>& followup_days);
std::vector<SummaryRow> SummarizePlanted(const SyntheticCohort& cohort);
std::string FormatSummaryTable(const std::vector<SummaryRow>& rows);

// Codes the generator plants; all are members of the shipped code lists.
const std::vector<std::string>& PlantedAscvdCodes();
const std::vector<std::string>& PlantedChdCodes();
const std::vector<std::string>& PlantedLipidCodes();
const std::vector<std::string>& PlantedCvdCodes();

}  // namespace eqodds

#endif  // EQODDS_GENERATOR_H_
