#ifndef EQODDS_FEATURES_H_
#define EQODDS_FEATURES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eqodds/cohort.h"

namespace eqodds {

// Column layout: one binary column per (domain, code) concept in
// lexicographic (domain id, code) order, then an optional demographic tail of
// 6 race indicators, 2 gender indicators and one standardized age column.
class Vocabulary {
 public:
  struct Concept {
    Domain domain;
    std::string code;
    auto operator<=>(const Concept&) const = default;
  };

  Vocabulary() = default;
  Vocabulary(std::vector<Concept> concepts, bool demographics, double age_mean,
             double age_std);

  size_t num_concepts() const { return concepts_.size(); }
  // Total column count m.
  size_t size() const { return concepts_.size() + (demographics_ ? kDemographicColumns : 0); }
  bool has_demographics() const { return demographics_; }
  std::optional<uint32_t> Find(Domain domain, std::string_view code) const;

  uint32_t race_column(int race) const;
  uint32_t gender_column(int gender) const;
  uint32_t age_column() const;
  double age_mean() const { return age_mean_; }
  double age_std() const { return age_std_; }

  // "Diagnosis:250.00", "demo:race=Asian", "demo:age_std", ...
  std::string ColumnName(uint32_t col) const;
  const std::vector<Concept>& concepts() const { return concepts_; }

  static constexpr size_t kDemographicColumns = kNumRaces + kNumGenders + 1;

 private:
  std::vector<Concept> concepts_;
  std::map<Concept, uint32_t, std::less<>> index_;
  bool demographics_ = false;
  double age_mean_ = 0;
  double age_std_ = 1;
};

// Concepts observed strictly before each patient's index time. The caller
// passes the training split only. Age is standardized with the population
// mean and standard deviation of the given patients' ages at index.
// Throws ValidationError on an empty cohort.
Vocabulary BuildVocabulary(std::span<const IndexedPatient> training,
                           bool demographics = true);

// Sparse row with explicit values: 1.0 for concept and indicator columns, the
// standardized age for the age column. Indices ascending and unique.
struct SparseRow {
  std::vector<uint32_t> index;
  std::vector<double> value;
};

// Presence of each vocabulary concept strictly before the index time.
// Numeric results are ignored; out-of-vocabulary concepts are dropped.
SparseRow ExtractFeatures(const IndexedPatient& ip, const Vocabulary& vocab);

struct SparseView {
  std::span<const uint32_t> index;
  std::span<const double> value;
};

// Row-compressed N x m matrix. Concept and indicator entries are 1; the age
// column, when present, carries its standardized value.
class SparseFeatureMatrix {
 public:
  SparseFeatureMatrix() : row_offsets_{0} {}
  explicit SparseFeatureMatrix(size_t n_cols) : n_cols_(n_cols), row_offsets_{0} {}

  // Throws ContractError on out-of-range or unsorted indices.
  void AppendRow(std::string row_id, const SparseRow& row);

  size_t n_rows() const { return row_ids_.size(); }
  size_t n_cols() const { return n_cols_; }
  size_t nnz() const { return index_.size(); }
  SparseView Row(size_t r) const;
  const std::string& row_id(size_t r) const { return row_ids_[r]; }
  const std::vector<std::string>& row_ids() const { return row_ids_; }

 private:
  size_t n_cols_ = 0;
  std::vector<size_t> row_offsets_;
  std::vector<uint32_t> index_;
  std::vector<double> value_;
  std::vector<std::string> row_ids_;
};

// On-disk layout inside a directory:
//   features.txt  "n_rows n_cols" header then "row col" pairs (0-indexed) for
//                 every entry except the numeric age column
//   rows.tsv      row <TAB> patient_id <TAB> age value ("-" without age column)
//   columns.tsv   col <TAB> column name
void WriteFeatureMatrix(const SparseFeatureMatrix& matrix, const Vocabulary& vocab,
                        const std::string& directory);

struct LoadedFeatures {
  SparseFeatureMatrix matrix;
  std::vector<std::string> column_names;
};
LoadedFeatures ReadFeatureMatrix(const std::string& directory);

}  // namespace eqodds

#endif  // EQODDS_FEATURES_H_
