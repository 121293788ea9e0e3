#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "eqodds/dataset.h"
#include "eqodds/errors.h"
#include "eqodds/generator.h"

namespace eqodds {
namespace {

TEST(Generator, ReferenceConfigMatchesOverallIncidence) {
  const SyntheticCohortConfig c = ReferenceCohortConfig(1000, 0);
  double expected = 0;
  for (int r = 0; r < kNumRaces; ++r) {
    for (int g = 0; g < kNumGenders; ++g) {
      for (int a = 0; a < kNumAgeGroups; ++a) {
        expected += c.race_proportions[r] * c.gender_proportions[g] * c.age_proportions[a] *
                    CellIncidence(c, r, g, a);
      }
    }
  }
  EXPECT_NEAR(expected, 0.0135, 1e-12);
  EXPECT_NEAR(c.race_proportions[5], 136348.0 / 250509.0, 1e-4);
  EXPECT_NEAR(c.gender_proportions[0], 154266.0 / 250340.0, 1e-12);
  const CohortExpectation e = ExpectedCohortCounts(ReferenceCohortConfig(250509, 0));
  EXPECT_NEAR(e.all.positive_mean, 3381.9, 1.0);
}

TEST(Generator, DeterministicAndPrefixStable) {
  SyntheticCohortConfig c;
  c.n_patients = 50;
  c.seed = 4;
  const SyntheticCohort a = GenerateSyntheticCohort(c);
  const SyntheticCohort b = GenerateSyntheticCohort(c);
  EXPECT_EQ(a.records, b.records);
  c.n_patients = 20;
  const SyntheticCohort prefix = GenerateSyntheticCohort(c);
  for (size_t i = 0; i < 20; ++i) EXPECT_EQ(prefix.records[i], a.records[i]);
  c.seed = 5;
  EXPECT_NE(GenerateSyntheticCohort(c).records[0], a.records[0]);
}

TEST(Generator, ExtractionRecoversPlantedTruth) {
  SyntheticCohortConfig c = ReferenceCohortConfig(3000, 8);
  c.base_incidence = 0.05;
  c.exclusion_fraction = 0.1;
  const SyntheticCohort cohort = GenerateSyntheticCohort(c);
  const CohortCodeLists codes = LoadCohortCodeLists(DefaultCodeListDirectory());
  size_t positives = 0, excluded = 0;
  for (size_t i = 0; i < cohort.records.size(); ++i) {
    for (const ClinicalEvent& e : cohort.records[i].events) ASSERT_FALSE(e.code.empty());
    ExtractedPatient out;
    const ExtractionOutcome r = ExtractPatient(cohort.records[i], codes, 1, i, &out);
    const PlantedTruth& t = cohort.truth[i];
    if (t.excluded) {
      ASSERT_EQ(r, ExtractionOutcome::kExcluded) << i;
      ++excluded;
      continue;
    }
    ASSERT_EQ(r, ExtractionOutcome::kIncluded) << i;
    EXPECT_EQ(out.groups, t.groups) << i;
    EXPECT_EQ(out.label, t.outcome) << i;
    positives += out.label;
  }
  EXPECT_GT(positives, 50u);
  EXPECT_GT(excluded, 200u);
}

TEST(Generator, ScoreShiftMovesInformativeConceptRate) {
  SyntheticCohortConfig c;
  c.n_patients = 4000;
  c.gender_proportions = {0.5, 0.5};
  c.gender_score_shift = {-2.0, 2.0};
  const SyntheticCohort cohort = GenerateSyntheticCohort(c);
  std::array<double, 2> events{}, count{};
  for (size_t i = 0; i < cohort.records.size(); ++i) {
    const int g = cohort.truth[i].groups.gender_group;
    count[g] += 1;
    events[g] += static_cast<double>(cohort.records[i].events.size());
  }
  EXPECT_GT(events[1] / count[1], events[0] / count[0] + 1.0);
}

TEST(Generator, ValidateConfigNamesField) {
  SyntheticCohortConfig c;
  c.base_incidence = 1.5;
  try {
    ValidateConfig(c);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("incidence"), std::string::npos) << e.what();
  }
  c = SyntheticCohortConfig{};
  c.race_proportions[0] = 0.9;
  EXPECT_THROW(ValidateConfig(c), ValidationError);
  c = SyntheticCohortConfig{};
  c.n_informative = c.concept_vocab_size + 1;
  EXPECT_THROW(ValidateConfig(c), ValidationError);
}

TEST(Generator, SummaryTableLayout) {
  const SyntheticCohort cohort = GenerateSyntheticCohort(ReferenceCohortConfig(500, 1));
  const std::vector<SummaryRow> rows = SummarizePlanted(cohort);
  ASSERT_EQ(rows.size(), static_cast<size_t>(kNumRaces + kNumGenders + kNumAgeGroups + 1));
  EXPECT_EQ(rows.front().group, "Asian");
  EXPECT_EQ(rows.back().group, "All");
  EXPECT_EQ(rows.back().count, 500u);
  uint64_t race_total = 0;
  for (int r = 0; r < kNumRaces; ++r) race_total += rows[r].count;
  EXPECT_EQ(race_total, 500u);
  EXPECT_GT(rows.back().mean_followup_years, 1.0);
}

}  // namespace
}  // namespace eqodds
