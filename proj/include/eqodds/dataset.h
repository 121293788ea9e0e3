#ifndef EQODDS_DATASET_H_
#define EQODDS_DATASET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqodds/codes.h"
#include "eqodds/cohort.h"
#include "eqodds/features.h"
#include "eqodds/report.h"

namespace eqodds {

// One patient after index selection, exclusion and labeling.
struct ExtractedPatient {
  IndexedPatient indexed;
  GroupAssignment groups;
  int label = 0;
  long followup_days = 0;
};

enum class ExtractionOutcome { kIncluded, kNoEligibleIndex, kExcluded };

// Runs the per-patient extraction steps. `position` is the record's position
// in the input and selects its index-time substream.
ExtractionOutcome ExtractPatient(PatientRecord record, const CohortCodeLists& codes,
                                 uint64_t seed, uint64_t position,
                                 ExtractedPatient* out);

struct CohortFunnel {
  uint64_t input = 0;
  uint64_t no_eligible_index = 0;
  uint64_t excluded = 0;
  uint64_t included = 0;
  uint64_t positives = 0;
  uint64_t train = 0;
  uint64_t validation = 0;
  uint64_t test = 0;
};

std::string FormatFunnel(const CohortFunnel& funnel);

// Modelling-ready cohort. Rows are in input order of the included patients.
struct LabeledDataset {
  SparseFeatureMatrix features;
  std::vector<std::string> column_names;
  std::vector<int> labels;
  GroupLabels groups;
  std::vector<Split> splits;
  std::vector<long> followup_days;

  size_t size() const { return labels.size(); }
  std::vector<size_t> RowsIn(Split split) const;
  std::vector<GroupAssignment> Assignments() const;
};

struct PreparedCohort {
  LabeledDataset dataset;
  Vocabulary vocabulary;
  CohortFunnel funnel;
};

struct PrepareOptions {
  uint64_t seed = 0;
  SplitRatios ratios;
  bool demographics = true;
};

// Index selection, exclusions, labeling, group assignment, the patient-level
// split and feature extraction with a vocabulary fit on the training split.
// An empty cohort yields an empty dataset and an empty vocabulary.
PreparedCohort PrepareCohort(std::vector<PatientRecord> records,
                             const CohortCodeLists& codes, const PrepareOptions& options);

// Directory layout: features.txt, rows.tsv, columns.tsv, cohort.tsv,
// splits.tsv and funnel.txt.
void WritePrepared(const PreparedCohort& prepared, const std::string& directory);
LabeledDataset ReadPrepared(const std::string& directory);

}  // namespace eqodds

#endif  // EQODDS_DATASET_H_
