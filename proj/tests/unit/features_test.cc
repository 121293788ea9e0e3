#include <gtest/gtest.h>

#include <cmath>

#include "eqodds/errors.h"
#include "eqodds/features.h"
#include "eqodds/generator.h"
#include "oracles.h"
#include "test_util.h"

namespace eqodds {
namespace {

IndexedPatient Make(std::string id, Date birth, Race race, Gender gender,
                    std::vector<ClinicalEvent> events, Date index) {
  PatientRecord p;
  p.patient_id = std::move(id);
  p.birth_date = birth;
  p.race = race;
  p.gender = gender;
  p.events = std::move(events);
  return {p, index, index};
}

std::vector<IndexedPatient> Toy() {
  const Date i = MakeDate(2010, 1, 1);
  return {
      Make("a", MakeDate(1960, 1, 1), Race::kBlack, Gender::kMale,
           {{MakeDate(2009, 1, 1), Domain::kLabTest, "2093-3", 180.0},
            {MakeDate(2009, 1, 1), Domain::kDiagnosis, "401.9", std::nullopt},
            {i, Domain::kDiagnosis, "250.00", std::nullopt}},
           i),
      Make("b", MakeDate(1940, 1, 1), Race::kWhite, Gender::kFemale,
           {{MakeDate(2008, 1, 1), Domain::kProcedure, "93000", std::nullopt},
            {MakeDate(2009, 1, 1), Domain::kDiagnosis, "401.9", std::nullopt},
            {MakeDate(2009, 6, 1), Domain::kDiagnosis, "401.9", std::nullopt}},
           i),
  };
}

TEST(Vocabulary, LexicographicConceptsBeforeIndex) {
  const Vocabulary v = BuildVocabulary(Toy());
  ASSERT_EQ(v.num_concepts(), 3u);  // 250.00 sits on the index date
  EXPECT_EQ(v.ColumnName(0), "Diagnosis:401.9");
  EXPECT_EQ(v.ColumnName(1), "Procedure:93000");
  EXPECT_EQ(v.ColumnName(2), "LabTest:2093-3");
  EXPECT_EQ(v.size(), 3u + Vocabulary::kDemographicColumns);
  EXPECT_EQ(v.ColumnName(v.race_column(0)), "demo:race=Asian");
  EXPECT_EQ(v.ColumnName(v.age_column()), "demo:age_std");
  EXPECT_FALSE(v.Find(Domain::kDiagnosis, "250.00").has_value());
  // Ages 50 and 70: mean 60, population sd 10.
  EXPECT_DOUBLE_EQ(v.age_mean(), 60.0);
  EXPECT_DOUBLE_EQ(v.age_std(), 10.0);
  EXPECT_THROW(BuildVocabulary(std::vector<IndexedPatient>{}), ValidationError);
}

TEST(Features, RowLayout) {
  const auto toy = Toy();
  const Vocabulary v = BuildVocabulary(toy);
  const SparseRow row = ExtractFeatures(toy[0], v);
  std::vector<uint32_t> expected = {0, 2, v.race_column(1), v.gender_column(1), v.age_column()};
  EXPECT_EQ(row.index, expected);
  EXPECT_DOUBLE_EQ(row.value.back(), -1.0);
  for (size_t k = 0; k + 1 < row.value.size(); ++k) EXPECT_EQ(row.value[k], 1.0);

  const Vocabulary bare = BuildVocabulary(toy, false);
  EXPECT_EQ(bare.size(), 3u);
  EXPECT_EQ(ExtractFeatures(toy[1], bare).index, (std::vector<uint32_t>{0, 1}));
  EXPECT_THROW(bare.age_column(), ContractError);
}

TEST(Features, MatchBruteForceOnSyntheticPatients) {
  SyntheticCohortConfig c;
  c.n_patients = 200;
  const SyntheticCohort cohort = GenerateSyntheticCohort(c);
  std::vector<IndexedPatient> ips;
  Rng rng(3);
  for (const PatientRecord& p : cohort.records) {
    if (auto ip = SelectIndexTime(p, rng)) ips.push_back(*ip);
  }
  const Vocabulary v = BuildVocabulary(std::span(ips).first(100), false);
  for (const IndexedPatient& ip : ips) {
    EXPECT_EQ(ExtractFeatures(ip, v).index, oracle::BruteConceptColumns(ip.patient, ip.index_time, v));
  }
}

TEST(FeatureMatrix, RejectsBadRows) {
  SparseFeatureMatrix m(4);
  EXPECT_THROW(m.AppendRow("x", {{2, 1}, {1, 1}}), ContractError);
  EXPECT_THROW(m.AppendRow("x", {{4}, {1}}), ContractError);
  EXPECT_THROW(m.AppendRow("x", {{1}, {1, 1}}), ContractError);
  m.AppendRow("ok", {{0, 3}, {1, 1}});
  EXPECT_EQ(m.nnz(), 2u);
  EXPECT_EQ(m.Row(0).index[1], 3u);
}

TEST(FeatureMatrix, FileRoundTrip) {
  const auto toy = Toy();
  const Vocabulary v = BuildVocabulary(toy);
  SparseFeatureMatrix m(v.size());
  for (const auto& ip : toy) m.AppendRow(ip.patient.patient_id, ExtractFeatures(ip, v));
  const auto dir = testing_util::ScratchDir();
  WriteFeatureMatrix(m, v, dir.string());
  const LoadedFeatures back = ReadFeatureMatrix(dir.string());
  ASSERT_EQ(back.matrix.n_rows(), 2u);
  EXPECT_EQ(back.matrix.n_cols(), v.size());
  EXPECT_EQ(back.matrix.row_ids(), m.row_ids());
  for (size_t r = 0; r < 2; ++r) {
    const SparseView a = m.Row(r), b = back.matrix.Row(r);
    EXPECT_TRUE(std::equal(a.index.begin(), a.index.end(), b.index.begin(), b.index.end()));
    EXPECT_TRUE(std::equal(a.value.begin(), a.value.end(), b.value.begin(), b.value.end()));
  }
  EXPECT_EQ(back.column_names[0], "Diagnosis:401.9");
  EXPECT_THROW(ReadFeatureMatrix((dir / "missing").string()), IoError);
}

}  // namespace
}  // namespace eqodds
