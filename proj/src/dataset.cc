#include "eqodds/dataset.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "eqodds/errors.h"
#include "eqodds/random.h"

namespace eqodds {

namespace {

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

int ParseSmallInt(const std::string& s, int lo, int hi, const char* what) {
  try {
    size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size() && v >= lo && v <= hi) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError(std::string("cohort.tsv: bad ") + what + " '" + s + "'");
}

}  // namespace

ExtractionOutcome ExtractPatient(PatientRecord record, const CohortCodeLists& codes,
                                 uint64_t seed, uint64_t position,
                                 ExtractedPatient* out) {
  Rng rng = Rng::Derive(seed, "index_time", position);
  std::optional<IndexedPatient> ip = SelectIndexTime(std::move(record), rng);
  if (!ip) return ExtractionOutcome::kNoEligibleIndex;
  if (ApplyExclusions(*ip, codes.cvd_exclusion, codes.lipid_lowering)) {
    return ExtractionOutcome::kExcluded;
  }
  out->groups = AssignGroups(*ip);
  out->label = LabelOutcome(*ip, codes.ascvd_events, codes.fatal_chd);
  out->followup_days = DaysBetween(ip->index_time, ip->followup_end);
  out->indexed = std::move(*ip);
  return ExtractionOutcome::kIncluded;
}

std::string FormatFunnel(const CohortFunnel& f) {
  std::ostringstream out;
  out << "input = " << f.input << '\n'
      << "no_eligible_index = " << f.no_eligible_index << '\n'
      << "excluded = " << f.excluded << '\n'
      << "included = " << f.included << '\n'
      << "positives = " << f.positives << '\n'
      << "train = " << f.train << '\n'
      << "val = " << f.validation << '\n'
      << "test = " << f.test << '\n';
  return out.str();
}

std::vector<size_t> LabeledDataset::RowsIn(Split split) const {
  std::vector<size_t> rows;
  for (size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == split) rows.push_back(i);
  }
  return rows;
}

std::vector<GroupAssignment> LabeledDataset::Assignments() const {
  std::vector<GroupAssignment> out(size());
  for (size_t i = 0; i < size(); ++i) {
    out[i] = {groups.race[i], groups.gender[i], groups.age[i]};
  }
  return out;
}

PreparedCohort PrepareCohort(std::vector<PatientRecord> records,
                             const CohortCodeLists& codes, const PrepareOptions& options) {
  PreparedCohort result;
  CohortFunnel& funnel = result.funnel;
  funnel.input = records.size();
  {
    std::unordered_set<std::string_view> ids;
    for (const PatientRecord& r : records) {
      if (!ids.insert(r.patient_id).second) {
        throw ValidationError("duplicate patient_id '" + r.patient_id + "' in the input");
      }
    }
  }

  std::vector<ExtractedPatient> cohort;
  for (size_t i = 0; i < records.size(); ++i) {
    ExtractedPatient ep;
    switch (ExtractPatient(std::move(records[i]), codes, options.seed, i, &ep)) {
      case ExtractionOutcome::kNoEligibleIndex:
        ++funnel.no_eligible_index;
        break;
      case ExtractionOutcome::kExcluded:
        ++funnel.excluded;
        break;
      case ExtractionOutcome::kIncluded:
        funnel.positives += static_cast<uint64_t>(ep.label);
        cohort.push_back(std::move(ep));
        break;
    }
  }
  records.clear();
  funnel.included = cohort.size();

  std::vector<std::string> ids;
  ids.reserve(cohort.size());
  for (const ExtractedPatient& ep : cohort) ids.push_back(ep.indexed.patient.patient_id);
  const CohortSplit split = SplitCohort(ids, options.ratios, options.seed);
  std::unordered_map<std::string, Split> split_of;
  for (const auto& id : split.train) split_of.emplace(id, Split::kTrain);
  for (const auto& id : split.validation) split_of.emplace(id, Split::kValidation);
  for (const auto& id : split.test) split_of.emplace(id, Split::kTest);
  funnel.train = split.train.size();
  funnel.validation = split.validation.size();
  funnel.test = split.test.size();

  LabeledDataset& ds = result.dataset;
  std::vector<IndexedPatient> training;
  for (const ExtractedPatient& ep : cohort) {
    const Split s = split_of.at(ep.indexed.patient.patient_id);
    ds.splits.push_back(s);
    if (s == Split::kTrain) training.push_back(ep.indexed);
  }
  if (!training.empty()) {
    result.vocabulary = BuildVocabulary(training, options.demographics);
  }
  training.clear();

  ds.features = SparseFeatureMatrix(result.vocabulary.size());
  for (const ExtractedPatient& ep : cohort) {
    ds.features.AppendRow(ep.indexed.patient.patient_id,
                          ExtractFeatures(ep.indexed, result.vocabulary));
    ds.labels.push_back(ep.label);
    ds.groups.race.push_back(ep.groups.race_group);
    ds.groups.gender.push_back(ep.groups.gender_group);
    ds.groups.age.push_back(ep.groups.age_group);
    ds.followup_days.push_back(ep.followup_days);
  }
  for (uint32_t c = 0; c < result.vocabulary.size(); ++c) {
    ds.column_names.push_back(result.vocabulary.ColumnName(c));
  }
  return result;
}

void WritePrepared(const PreparedCohort& prepared, const std::string& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create '" + directory + "': " + ec.message());
  const LabeledDataset& ds = prepared.dataset;
  WriteFeatureMatrix(ds.features, prepared.vocabulary, directory);

  const std::filesystem::path dir(directory);
  std::ofstream cohort(dir / "cohort.tsv", std::ios::binary);
  std::ofstream splits(dir / "splits.tsv", std::ios::binary);
  std::ofstream funnel(dir / "funnel.txt", std::ios::binary);
  if (!cohort || !splits || !funnel) {
    throw IoError("cannot write cohort files under '" + directory + "'");
  }
  cohort << "patient_id\tlabel\trace\tgender\tage_group\tsplit\tfollowup_days\n";
  for (size_t i = 0; i < ds.size(); ++i) {
    const std::string& id = ds.features.row_id(i);
    cohort << id << '\t' << ds.labels[i] << '\t' << ds.groups.race[i] << '\t'
           << ds.groups.gender[i] << '\t' << ds.groups.age[i] << '\t'
           << SplitName(ds.splits[i]) << '\t' << ds.followup_days[i] << '\n';
    splits << id << '\t' << SplitName(ds.splits[i]) << '\n';
  }
  funnel << FormatFunnel(prepared.funnel);
  if (!cohort || !splits || !funnel) throw IoError("write failed under '" + directory + "'");
}

LabeledDataset ReadPrepared(const std::string& directory) {
  LoadedFeatures loaded = ReadFeatureMatrix(directory);
  LabeledDataset ds;
  ds.features = std::move(loaded.matrix);
  ds.column_names = std::move(loaded.column_names);

  const std::filesystem::path path = std::filesystem::path(directory) / "cohort.tsv";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitTabs(line);
    if (f.size() != 7) throw ValidationError("cohort.tsv: expected 7 fields");
    if (row >= ds.features.n_rows() || f[0] != ds.features.row_id(row)) {
      throw ValidationError("cohort.tsv row " + std::to_string(row) +
                            " does not match the feature rows");
    }
    ds.labels.push_back(ParseSmallInt(f[1], 0, 1, "label"));
    ds.groups.race.push_back(ParseSmallInt(f[2], 0, kNumRaces - 1, "race"));
    ds.groups.gender.push_back(ParseSmallInt(f[3], 0, kNumGenders - 1, "gender"));
    ds.groups.age.push_back(ParseSmallInt(f[4], 0, kNumAgeGroups - 1, "age group"));
    ds.splits.push_back(ParseSplit(f[5]));
    try {
      ds.followup_days.push_back(std::stol(f[6]));
    } catch (const std::exception&) {
      throw ValidationError("cohort.tsv: bad followup_days '" + f[6] + "'");
    }
    ++row;
  }
  if (row != ds.features.n_rows()) {
    throw ValidationError("cohort.tsv has " + std::to_string(row) + " rows, features have " +
                          std::to_string(ds.features.n_rows()));
  }
  return ds;
}

}  // namespace eqodds
