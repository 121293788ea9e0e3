#include "fixtures.h"

#include <algorithm>
#include <sstream>

#include "eqodds/date.h"

namespace eqodds::fixture {
namespace {

constexpr const char* kAscvd = "410.01";
constexpr const char* kChd = "411.1";
constexpr const char* kLipid = "C10AA05";
constexpr const char* kVisit = "office_visit";

ClinicalEvent Visit(Date d) { return {d, Domain::kEncounterType, kVisit, std::nullopt}; }
ClinicalEvent Dx(Date d, const char* code) { return {d, Domain::kDiagnosis, code, std::nullopt}; }
ClinicalEvent Rx(Date d, const char* code) {
  return {d, Domain::kMedicationOrder, code, std::nullopt};
}

Date Day(Date a, int offset) { return a + std::chrono::days(offset); }

PatientRecord Patient(std::string id, Date birth, std::vector<ClinicalEvent> events,
                      std::optional<Date> death = std::nullopt) {
  std::stable_sort(events.begin(), events.end(),
                   [](const ClinicalEvent& a, const ClinicalEvent& b) { return a.date < b.date; });
  PatientRecord p;
  p.patient_id = std::move(id);
  p.birth_date = birth;
  p.gender = Gender::kFemale;
  p.race = Race::kWhite;
  p.death_date = death;
  p.events = std::move(events);
  return p;
}

// Visits on 2008-01-01, 2010-01-01 and 2012-01-01 for someone born in 1950;
// 2010-01-01 is the only eligible index.
const Date kIndex = MakeDate(2010, 1, 1);
const Date kBirth = MakeDate(1950, 1, 1);

std::vector<ClinicalEvent> BaseVisits() {
  return {Visit(MakeDate(2008, 1, 1)), Visit(kIndex), Visit(MakeDate(2012, 1, 1))};
}

CohortFixture Eligibility(std::string name, PatientRecord p, std::vector<Date> expected) {
  CohortFixture f;
  f.name = std::move(name);
  f.patient = std::move(p);
  f.check = Check::kEligibleDates;
  f.eligible = std::move(expected);
  return f;
}

CohortFixture Exclusion(std::string name, std::vector<ClinicalEvent> extra, bool expected,
                        Date index = kIndex) {
  std::vector<ClinicalEvent> events = BaseVisits();
  events.insert(events.end(), extra.begin(), extra.end());
  CohortFixture f;
  f.name = std::move(name);
  f.patient = Patient(f.name, kBirth, std::move(events));
  f.check = Check::kExcluded;
  f.index = index;
  f.excluded = expected;
  return f;
}

CohortFixture Labeling(std::string name, std::vector<ClinicalEvent> extra,
                       std::optional<Date> death, int expected) {
  std::vector<ClinicalEvent> events = BaseVisits();
  events.insert(events.end(), extra.begin(), extra.end());
  CohortFixture f;
  f.name = std::move(name);
  f.patient = Patient(f.name, kBirth, std::move(events), death);
  f.check = Check::kLabel;
  f.index = kIndex;
  f.label = expected;
  return f;
}

CohortFixture AgeBin(std::string name, Date birth, int expected) {
  CohortFixture f;
  f.name = std::move(name);
  f.patient = Patient(f.name, birth, BaseVisits());
  f.check = Check::kAgeGroup;
  f.index = kIndex;
  f.age_group = expected;
  return f;
}

}  // namespace

std::vector<CohortFixture> CohortFixtures() {
  std::vector<CohortFixture> out;
  const Date a = MakeDate(2005, 3, 1);

  out.push_back(Eligibility("eligible_single_middle_visit", Patient("e1", kBirth, BaseVisits()),
                            {kIndex}));
  out.push_back(Eligibility(
      "one_encounter_day_is_ineligible",
      Patient("e2", kBirth, {Visit(a), Dx(a, "250.00"), Rx(a, "A10BA02")}), {}));
  out.push_back(Eligibility("span_729_days_is_ineligible",
                            Patient("e3", kBirth, {Visit(a), Visit(Day(a, 364)), Visit(Day(a, 729))}),
                            {}));
  out.push_back(Eligibility("span_exactly_730_days",
                            Patient("e4", kBirth, {Visit(a), Visit(Day(a, 365)), Visit(Day(a, 730))}),
                            {Day(a, 365)}));
  out.push_back(Eligibility(
      "history_boundary_365_days",
      Patient("e5", kBirth,
              {Visit(a), Visit(Day(a, 364)), Visit(Day(a, 365)), Visit(Day(a, 1000))}),
      {Day(a, 365)}));
  out.push_back(Eligibility(
      "followup_boundary_365_days",
      Patient("e6", kBirth,
              {Visit(a), Visit(Day(a, 400)), Visit(Day(a, 635)), Visit(Day(a, 636)),
               Visit(Day(a, 1000))}),
      {Day(a, 400), Day(a, 635)}));
  out.push_back(Eligibility(
      "death_truncates_followup",
      Patient("e7", kBirth,
              {Visit(a), Visit(Day(a, 400)), Visit(Day(a, 800)), Visit(Day(a, 1500))},
              Day(a, 1100)),
      {Day(a, 400)}));
  {
    const Date birth = MakeDate(1970, 6, 1);
    out.push_back(Eligibility(
        "visits_before_age_40_give_history_only",
        Patient("e8", birth,
                {Visit(MakeDate(2009, 1, 1)), Visit(MakeDate(2010, 6, 1)),
                 Visit(MakeDate(2011, 6, 1)), Visit(MakeDate(2012, 6, 1))}),
        {MakeDate(2010, 6, 1), MakeDate(2011, 6, 1)}));
    out.push_back(Eligibility(
        "span_counts_only_visits_from_age_40",
        Patient("e9", birth,
                {Visit(MakeDate(2005, 1, 1)), Visit(MakeDate(2010, 5, 31)),
                 Visit(MakeDate(2010, 6, 1)), Visit(MakeDate(2012, 5, 30))}),
        {}));
  }

  out.push_back(Exclusion("no_exclusion_codes", {}, false));
  out.push_back(Exclusion("cvd_diagnosis_decades_before", {Dx(MakeDate(1995, 6, 1), kAscvd)},
                          true));
  out.push_back(Exclusion("cvd_diagnosis_day_before_index", {Dx(Day(kIndex, -1), kChd)}, true));
  out.push_back(Exclusion("cvd_diagnosis_on_index_not_excluded", {Dx(kIndex, kAscvd)}, false));
  // 2005-01-01 is 1,826 days before the index and still inside the window.
  out.push_back(Exclusion("lipid_order_1826_days_before", {Rx(Day(kIndex, -1826), kLipid)},
                          true));
  out.push_back(Exclusion("lipid_order_1827_days_before", {Rx(Day(kIndex, -1827), kLipid)},
                          false));
  out.push_back(Exclusion("lipid_window_from_leap_day_index",
                          {Visit(MakeDate(2012, 2, 29)), Rx(MakeDate(2007, 2, 28), kLipid)}, true,
                          MakeDate(2012, 2, 29)));

  out.push_back(Labeling("ascvd_on_index_is_positive", {Dx(kIndex, kAscvd)}, std::nullopt, 1));
  out.push_back(Labeling("ascvd_only_before_index_is_negative",
                         {Dx(Day(kIndex, -10), kAscvd)}, std::nullopt, 0));
  out.push_back(Labeling("chd_then_death_at_365_days", {Dx(MakeDate(2011, 1, 10), kChd)},
                         Day(MakeDate(2011, 1, 10), 365), 1));
  out.push_back(Labeling("chd_then_death_at_366_days", {Dx(MakeDate(2011, 1, 10), kChd)},
                         Day(MakeDate(2011, 1, 10), 366), 0));

  out.push_back(AgeBin("age_40_on_index", MakeDate(1970, 1, 1), 0));
  out.push_back(AgeBin("age_55_on_index", MakeDate(1955, 1, 1), 1));
  out.push_back(AgeBin("age_65_on_index", MakeDate(1945, 1, 1), 2));
  out.push_back(AgeBin("age_75_on_index", MakeDate(1935, 1, 1), 3));
  out.push_back(AgeBin("one_day_short_of_55", MakeDate(1955, 1, 2), 0));
  return out;
}

std::string RunFixture(const CohortFixture& f, const CohortCodeLists& codes) {
  std::ostringstream msg;
  const IndexedPatient ip{f.patient, f.index, f.index};
  switch (f.check) {
    case Check::kEligibleDates: {
      const std::vector<Date> got = EligibleIndexDates(f.patient);
      if (got != f.eligible) {
        msg << "eligible dates:";
        for (Date d : got) msg << ' ' << FormatDate(d);
        msg << " expected:";
        for (Date d : f.eligible) msg << ' ' << FormatDate(d);
      }
      break;
    }
    case Check::kExcluded: {
      const bool got = ApplyExclusions(ip, codes.cvd_exclusion, codes.lipid_lowering);
      if (got != f.excluded) msg << "excluded=" << got << " expected " << f.excluded;
      break;
    }
    case Check::kLabel: {
      const int got = LabelOutcome(ip, codes.ascvd_events, codes.fatal_chd);
      if (got != f.label) msg << "label=" << got << " expected " << f.label;
      break;
    }
    case Check::kAgeGroup: {
      const int got = AssignGroups(ip).age_group;
      if (got != f.age_group) msg << "age_group=" << got << " expected " << f.age_group;
      break;
    }
  }
  return msg.str();
}

}  // namespace eqodds::fixture
