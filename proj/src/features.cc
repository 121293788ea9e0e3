#include "eqodds/features.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "eqodds/errors.h"

namespace eqodds {

namespace {

constexpr std::string_view kAgeColumnName = "demo:age_std";

std::string FormatDouble(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<Concept> concepts, bool demographics,
                       double age_mean, double age_std)
    : concepts_(std::move(concepts)),
      demographics_(demographics),
      age_mean_(age_mean),
      age_std_(age_std) {
  std::sort(concepts_.begin(), concepts_.end());
  concepts_.erase(std::unique(concepts_.begin(), concepts_.end()), concepts_.end());
  for (uint32_t i = 0; i < concepts_.size(); ++i) index_.emplace(concepts_[i], i);
}

std::optional<uint32_t> Vocabulary::Find(Domain domain, std::string_view code) const {
  const auto it = index_.find(Concept{domain, std::string(code)});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

uint32_t Vocabulary::race_column(int race) const {
  if (!demographics_) throw ContractError("vocabulary has no demographic columns");
  return static_cast<uint32_t>(concepts_.size() + race);
}

uint32_t Vocabulary::gender_column(int gender) const {
  if (!demographics_) throw ContractError("vocabulary has no demographic columns");
  return static_cast<uint32_t>(concepts_.size() + kNumRaces + gender);
}

uint32_t Vocabulary::age_column() const {
  if (!demographics_) throw ContractError("vocabulary has no demographic columns");
  return static_cast<uint32_t>(concepts_.size() + kNumRaces + kNumGenders);
}

std::string Vocabulary::ColumnName(uint32_t col) const {
  if (col < concepts_.size()) {
    return std::string(Name(concepts_[col].domain)) + ":" + concepts_[col].code;
  }
  const size_t k = col - concepts_.size();
  if (!demographics_ || k >= kDemographicColumns) {
    throw ContractError("column " + std::to_string(col) + " out of range");
  }
  if (k < kNumRaces) return "demo:race=" + std::string(kRaceNames[k]);
  if (k < kNumRaces + kNumGenders) {
    return "demo:gender=" + std::string(kGenderNames[k - kNumRaces]);
  }
  return std::string(kAgeColumnName);
}

Vocabulary BuildVocabulary(std::span<const IndexedPatient> training, bool demographics) {
  if (training.empty()) {
    throw ValidationError("cannot build a vocabulary from an empty cohort");
  }
  std::set<Vocabulary::Concept> seen;
  double sum = 0, sum_sq = 0;
  for (const IndexedPatient& ip : training) {
    for (const ClinicalEvent& e : ip.patient.events) {
      if (e.date >= ip.index_time) continue;
      seen.insert(Vocabulary::Concept{e.domain, e.code});
    }
    const double age = AgeInYears(ip.patient.birth_date, ip.index_time);
    sum += age;
    sum_sq += age * age;
  }
  const double n = static_cast<double>(training.size());
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
  return Vocabulary(std::vector<Vocabulary::Concept>(seen.begin(), seen.end()),
                    demographics, mean, sd);
}

SparseRow ExtractFeatures(const IndexedPatient& ip, const Vocabulary& vocab) {
  std::vector<uint32_t> cols;
  for (const ClinicalEvent& e : ip.patient.events) {
    if (e.date >= ip.index_time) continue;
    if (const auto col = vocab.Find(e.domain, e.code)) cols.push_back(*col);
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());

  SparseRow row;
  row.index = std::move(cols);
  row.value.assign(row.index.size(), 1.0);
  if (vocab.has_demographics()) {
    row.index.push_back(vocab.race_column(static_cast<int>(ip.patient.race)));
    row.value.push_back(1.0);
    row.index.push_back(vocab.gender_column(static_cast<int>(ip.patient.gender)));
    row.value.push_back(1.0);
    const double age = AgeInYears(ip.patient.birth_date, ip.index_time);
    row.index.push_back(vocab.age_column());
    row.value.push_back((age - vocab.age_mean()) / vocab.age_std());
  }
  return row;
}

void SparseFeatureMatrix::AppendRow(std::string row_id, const SparseRow& row) {
  if (row.index.size() != row.value.size()) {
    throw ContractError("sparse row index/value length mismatch");
  }
  for (size_t k = 0; k < row.index.size(); ++k) {
    if (row.index[k] >= n_cols_ || (k > 0 && row.index[k] <= row.index[k - 1])) {
      throw ContractError("sparse row indices must be ascending and < n_cols");
    }
  }
  index_.insert(index_.end(), row.index.begin(), row.index.end());
  value_.insert(value_.end(), row.value.begin(), row.value.end());
  row_offsets_.push_back(index_.size());
  row_ids_.push_back(std::move(row_id));
}

SparseView SparseFeatureMatrix::Row(size_t r) const {
  const size_t begin = row_offsets_[r];
  const size_t len = row_offsets_[r + 1] - begin;
  return SparseView{std::span<const uint32_t>(index_).subspan(begin, len),
                    std::span<const double>(value_).subspan(begin, len)};
}

void WriteFeatureMatrix(const SparseFeatureMatrix& matrix, const Vocabulary& vocab,
                        const std::string& directory) {
  if (matrix.n_cols() != vocab.size()) {
    throw ContractError("feature matrix width does not match the vocabulary");
  }
  const std::filesystem::path dir(directory);
  std::ofstream features(dir / "features.txt", std::ios::binary);
  std::ofstream rows(dir / "rows.tsv", std::ios::binary);
  std::ofstream cols(dir / "columns.tsv", std::ios::binary);
  if (!features || !rows || !cols) {
    throw IoError("cannot write feature files under '" + directory + "'");
  }
  const int64_t age_col =
      vocab.has_demographics() ? static_cast<int64_t>(vocab.age_column()) : -1;
  features << matrix.n_rows() << ' ' << matrix.n_cols() << '\n';
  for (size_t r = 0; r < matrix.n_rows(); ++r) {
    const SparseView row = matrix.Row(r);
    std::string age = "-";
    for (size_t k = 0; k < row.index.size(); ++k) {
      if (static_cast<int64_t>(row.index[k]) == age_col) {
        age = FormatDouble(row.value[k]);
        continue;
      }
      features << r << ' ' << row.index[k] << '\n';
    }
    rows << r << '\t' << matrix.row_id(r) << '\t' << age << '\n';
  }
  for (uint32_t c = 0; c < vocab.size(); ++c) {
    cols << c << '\t' << vocab.ColumnName(c) << '\n';
  }
  if (!features || !rows || !cols) {
    throw IoError("write failed under '" + directory + "'");
  }
}

LoadedFeatures ReadFeatureMatrix(const std::string& directory) {
  const std::filesystem::path dir(directory);
  std::ifstream features(dir / "features.txt", std::ios::binary);
  std::ifstream rows(dir / "rows.tsv", std::ios::binary);
  std::ifstream cols(dir / "columns.tsv", std::ios::binary);
  if (!features || !rows || !cols) {
    throw IoError("cannot read feature files under '" + directory + "'");
  }
  size_t n_rows = 0, n_cols = 0;
  if (!(features >> n_rows >> n_cols)) {
    throw ValidationError("features.txt: malformed header");
  }

  LoadedFeatures out;
  std::string line;
  while (std::getline(cols, line)) {
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) throw ValidationError("columns.tsv: malformed line");
    out.column_names.push_back(line.substr(tab + 1));
  }
  if (out.column_names.size() != n_cols) {
    throw ValidationError("columns.tsv lists " + std::to_string(out.column_names.size()) +
                          " columns, header says " + std::to_string(n_cols));
  }
  std::optional<uint32_t> age_col;
  if (n_cols > 0 && out.column_names.back() == kAgeColumnName) {
    age_col = static_cast<uint32_t>(n_cols - 1);
  }

  std::vector<std::vector<uint32_t>> entries(n_rows);
  size_t r = 0, c = 0;
  while (features >> r >> c) {
    if (r >= n_rows || c >= n_cols) {
      throw ValidationError("features.txt: coordinate out of range");
    }
    entries[r].push_back(c);
  }
  if (!features.eof()) throw ValidationError("features.txt: malformed coordinate");

  out.matrix = SparseFeatureMatrix(n_cols);
  size_t expected_row = 0;
  while (std::getline(rows, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string row_text, id, age;
    if (!std::getline(fields, row_text, '\t') || !std::getline(fields, id, '\t') ||
        !std::getline(fields, age)) {
      throw ValidationError("rows.tsv: malformed line");
    }
    if (std::stoull(row_text) != expected_row || expected_row >= n_rows) {
      throw ValidationError("rows.tsv: rows out of order");
    }
    std::vector<uint32_t>& cols_r = entries[expected_row];
    std::sort(cols_r.begin(), cols_r.end());
    if (std::adjacent_find(cols_r.begin(), cols_r.end()) != cols_r.end()) {
      throw ValidationError("features.txt: duplicate coordinate in row " + row_text);
    }
    SparseRow row;
    row.index = cols_r;
    row.value.assign(row.index.size(), 1.0);
    if (age_col && age != "-") {
      row.index.push_back(*age_col);
      row.value.push_back(std::stod(age));
    }
    out.matrix.AppendRow(id, row);
    ++expected_row;
  }
  if (expected_row != n_rows) {
    throw ValidationError("rows.tsv has " + std::to_string(expected_row) +
                          " rows, header says " + std::to_string(n_rows));
  }
  return out;
}

}  // namespace eqodds
