#include "eqodds/patient.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "eqodds/errors.h"
#include "json.hpp"

namespace eqodds {

namespace {

using nlohmann::ordered_json;

template <typename Enum, size_t N>
Enum ParseEnum(std::string_view name, const std::array<std::string_view, N>& names,
               std::string_view what) {
  for (size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<Enum>(i);
  }
  throw ValidationError("unknown " + std::string(what) + " '" + std::string(name) +
                        "'");
}

}  // namespace

Gender ParseGender(std::string_view name) {
  return ParseEnum<Gender>(name, kGenderNames, "gender");
}
Race ParseRace(std::string_view name) {
  return ParseEnum<Race>(name, kRaceNames, "race");
}
Domain ParseDomain(std::string_view name) {
  return ParseEnum<Domain>(name, kDomainNames, "domain");
}

void ValidatePatient(const PatientRecord& patient) {
  if (patient.patient_id.empty()) {
    throw ValidationError("patient_id must be non-empty");
  }
  for (size_t i = 0; i < patient.events.size(); ++i) {
    if (patient.events[i].code.empty()) {
      throw ValidationError("patient " + patient.patient_id + ": event " +
                            std::to_string(i) + " has an empty code");
    }
    if (i > 0 && patient.events[i].date < patient.events[i - 1].date) {
      throw ValidationError("patient " + patient.patient_id +
                            ": events are not sorted by date");
    }
  }
}

std::string PatientToJsonLine(const PatientRecord& patient) {
  ordered_json j;
  j["patient_id"] = patient.patient_id;
  j["birth_date"] = FormatDate(patient.birth_date);
  j["gender"] = Name(patient.gender);
  j["race"] = Name(patient.race);
  j["death_date"] = patient.death_date ? ordered_json(FormatDate(*patient.death_date))
                                       : ordered_json(nullptr);
  ordered_json events = ordered_json::array();
  for (const ClinicalEvent& e : patient.events) {
    ordered_json je;
    je["date"] = FormatDate(e.date);
    je["domain"] = Name(e.domain);
    je["code"] = e.code;
    if (e.value) je["value"] = *e.value;
    events.push_back(std::move(je));
  }
  j["events"] = std::move(events);
  return j.dump();
}

PatientRecord PatientFromJsonLine(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed patient record: ") + e.what());
  }
  PatientRecord p;
  try {
    p.patient_id = j.at("patient_id").get<std::string>();
    p.birth_date = ParseDate(j.at("birth_date").get<std::string>());
    p.gender = ParseGender(j.at("gender").get<std::string>());
    p.race = ParseRace(j.at("race").get<std::string>());
    if (j.contains("death_date") && !j["death_date"].is_null()) {
      p.death_date = ParseDate(j["death_date"].get<std::string>());
    }
    for (const auto& je : j.at("events")) {
      ClinicalEvent e;
      e.date = ParseDate(je.at("date").get<std::string>());
      e.domain = ParseDomain(je.at("domain").get<std::string>());
      e.code = je.at("code").get<std::string>();
      if (je.contains("value") && !je["value"].is_null()) {
        e.value = je["value"].get<double>();
      }
      p.events.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed patient record: ") + e.what());
  }
  ValidatePatient(p);
  return p;
}

void WritePatients(const std::vector<PatientRecord>& patients, std::ostream& out) {
  for (const PatientRecord& p : patients) {
    out << PatientToJsonLine(p) << '\n';
  }
}

std::vector<PatientRecord> ReadPatients(std::istream& in) {
  std::vector<PatientRecord> patients;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      patients.push_back(PatientFromJsonLine(line));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return patients;
}

void WritePatientsFile(const std::vector<PatientRecord>& patients,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  WritePatients(patients, out);
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<PatientRecord> ReadPatientsFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return ReadPatients(in);
}

}  // namespace eqodds
