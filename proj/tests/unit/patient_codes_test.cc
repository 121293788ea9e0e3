#include <gtest/gtest.h>

#include <sstream>

#include "eqodds/codes.h"
#include "eqodds/errors.h"
#include "eqodds/patient.h"

namespace eqodds {
namespace {

PatientRecord Sample() {
  PatientRecord p;
  p.patient_id = "p-001";
  p.birth_date = MakeDate(1951, 3, 4);
  p.gender = Gender::kMale;
  p.race = Race::kHispanic;
  p.death_date = MakeDate(2014, 7, 1);
  p.events = {{MakeDate(2009, 1, 2), Domain::kLabTest, "2093-3", 212.5},
              {MakeDate(2009, 1, 2), Domain::kDiagnosis, "401.9", std::nullopt},
              {MakeDate(2011, 5, 6), Domain::kMedicationOrder, "C10AA05", std::nullopt}};
  return p;
}

TEST(Patient, JsonLineRoundTrip) {
  const PatientRecord p = Sample();
  EXPECT_EQ(PatientFromJsonLine(PatientToJsonLine(p)), p);
  PatientRecord alive = p;
  alive.death_date.reset();
  EXPECT_EQ(PatientFromJsonLine(PatientToJsonLine(alive)), alive);
}

TEST(Patient, StreamRoundTrip) {
  std::vector<PatientRecord> ps = {Sample(), Sample()};
  ps[1].patient_id = "p-002";
  std::stringstream buf;
  WritePatients(ps, buf);
  EXPECT_EQ(ReadPatients(buf), ps);
}

TEST(Patient, RejectsBadRecords) {
  EXPECT_THROW(PatientFromJsonLine("{not json"), ValidationError);
  EXPECT_THROW(PatientFromJsonLine(R"({"patient_id":"a"})"), ValidationError);
  PatientRecord p = Sample();
  std::swap(p.events[0], p.events[2]);
  EXPECT_THROW(ValidatePatient(p), ValidationError);
  std::string line = PatientToJsonLine(Sample());
  line.replace(line.find("Hispanic"), 8, "Martian");
  EXPECT_THROW(PatientFromJsonLine(line), ValidationError);
}

TEST(Patient, EnumNamesRoundTrip) {
  for (int i = 0; i < kNumRaces; ++i) {
    EXPECT_EQ(static_cast<int>(ParseRace(kRaceNames[i])), i);
  }
  for (int i = 0; i < kNumDomains; ++i) {
    EXPECT_EQ(static_cast<int>(ParseDomain(kDomainNames[i])), i);
  }
  EXPECT_EQ(ParseGender("Female"), Gender::kFemale);
}

TEST(Codes, ParseTrimsAndSkipsComments) {
  const CodeList list = ParseCodeList("x", "# header\n 410.01 \n\n411\n# 412\n");
  EXPECT_EQ(list.size(), 2u);
  EXPECT_TRUE(list.Contains("410.01"));
  EXPECT_TRUE(list.Contains(" 411"));
  EXPECT_FALSE(list.Contains("412"));
  EXPECT_FALSE(list.Contains("410"));
}

TEST(Codes, RejectsEmptyAndDuplicates) {
  EXPECT_THROW(ParseCodeList("x", "# nothing\n"), ValidationError);
  EXPECT_THROW(ParseCodeList("x", "410\n410\n"), ValidationError);
  EXPECT_THROW(LoadCodeList("/nonexistent/codes.txt"), IoError);
}

TEST(Codes, ShippedListsLoad) {
  const CohortCodeLists codes = LoadCohortCodeLists(DefaultCodeListDirectory());
  EXPECT_TRUE(codes.ascvd_events.Contains("410.01"));
  EXPECT_TRUE(codes.fatal_chd.Contains("411.1"));
  EXPECT_TRUE(codes.lipid_lowering.Contains("C10AA05"));
  EXPECT_TRUE(codes.cvd_exclusion.Contains("410.01"));
}

}  // namespace
}  // namespace eqodds
