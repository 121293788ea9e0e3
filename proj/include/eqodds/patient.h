#ifndef EQODDS_PATIENT_H_
#define EQODDS_PATIENT_H_

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eqodds/date.h"

namespace eqodds {

// Stable integer ids follow the declaration order; files and reports rely on
// them.
enum class Gender : int { kFemale = 0, kMale = 1 };
enum class Race : int {
  kAsian = 0,
  kBlack = 1,
  kHispanic = 2,
  kOther = 3,
  kUnknown = 4,
  kWhite = 5,
};
enum class Domain : int {
  kDiagnosis = 0,
  kProcedure = 1,
  kMedicationOrder = 2,
  kLabTest = 3,
  kEncounterType = 4,
  kDepartment = 5,
  kObservation = 6,
};

inline constexpr int kNumRaces = 6;
inline constexpr int kNumGenders = 2;
inline constexpr int kNumAgeGroups = 4;
inline constexpr int kNumDomains = 7;

inline constexpr std::array<std::string_view, kNumRaces> kRaceNames = {
    "Asian", "Black", "Hispanic", "Other", "Unknown", "White"};
inline constexpr std::array<std::string_view, kNumGenders> kGenderNames = {
    "Female", "Male"};
inline constexpr std::array<std::string_view, kNumAgeGroups> kAgeGroupNames = {
    "40-55", "55-65", "65-75", "75+"};
inline constexpr std::array<std::string_view, kNumDomains> kDomainNames = {
    "Diagnosis",    "Procedure",     "MedicationOrder", "LabTest",
    "EncounterType", "Department",   "Observation"};

Gender ParseGender(std::string_view name);
Race ParseRace(std::string_view name);
Domain ParseDomain(std::string_view name);
inline std::string_view Name(Gender g) { return kGenderNames[static_cast<int>(g)]; }
inline std::string_view Name(Race r) { return kRaceNames[static_cast<int>(r)]; }
inline std::string_view Name(Domain d) { return kDomainNames[static_cast<int>(d)]; }

struct ClinicalEvent {
  Date date;
  Domain domain = Domain::kDiagnosis;
  std::string code;
  // Numeric result for labs and vitals. Carried through IO, never used as a
  // feature.
  std::optional<double> value;

  bool operator==(const ClinicalEvent&) const = default;
};

struct PatientRecord {
  std::string patient_id;
  Date birth_date;
  Gender gender = Gender::kFemale;
  Race race = Race::kUnknown;
  std::optional<Date> death_date;
  // Sorted by date, non-decreasing.
  std::vector<ClinicalEvent> events;

  bool operator==(const PatientRecord&) const = default;
};

// Throws ValidationError when an invariant does not hold.
void ValidatePatient(const PatientRecord& patient);

// Line-delimited JSON, one patient object per line.
std::string PatientToJsonLine(const PatientRecord& patient);
PatientRecord PatientFromJsonLine(std::string_view line);

void WritePatients(const std::vector<PatientRecord>& patients, std::ostream& out);
std::vector<PatientRecord> ReadPatients(std::istream& in);
void WritePatientsFile(const std::vector<PatientRecord>& patients,
                       const std::string& path);
std::vector<PatientRecord> ReadPatientsFile(const std::string& path);

}  // namespace eqodds

#endif  // EQODDS_PATIENT_H_
