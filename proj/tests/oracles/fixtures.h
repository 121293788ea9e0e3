#ifndef EQODDS_TESTS_FIXTURES_H_
#define EQODDS_TESTS_FIXTURES_H_

#include <optional>
#include <string>
#include <vector>

#include "eqodds/codes.h"
#include "eqodds/cohort.h"

namespace eqodds::fixture {

enum class Check { kEligibleDates, kExcluded, kLabel, kAgeGroup };

// A hand-built patient plus the single rule outcome it pins down. Rule checks
// other than eligibility run against a fixed index time.
struct CohortFixture {
  std::string name;
  PatientRecord patient;
  Check check = Check::kEligibleDates;
  Date index{};
  std::vector<Date> eligible;
  bool excluded = false;
  int label = 0;
  int age_group = 0;
};

std::vector<CohortFixture> CohortFixtures();

// Runs the library rule the fixture targets. Returns an empty string when the
// result matches, otherwise a description of the mismatch.
std::string RunFixture(const CohortFixture& f, const CohortCodeLists& codes);

}  // namespace eqodds::fixture

#endif  // EQODDS_TESTS_FIXTURES_H_
