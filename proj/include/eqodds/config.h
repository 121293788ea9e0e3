#ifndef EQODDS_CONFIG_H_
#define EQODDS_CONFIG_H_

#include <string>

#include "eqodds/cohort.h"
#include "eqodds/dataset.h"
#include "eqodds/generator.h"
#include "eqodds/trainer.h"

namespace eqodds {

struct PathConfig {
  std::string codes;  // empty = shipped code lists
};

// Everything a command can read from a JSON config file. Sections: cohort,
// prepare, train, search, paths. Unknown keys anywhere are rejected; relative
// paths resolve against the config file's directory.
struct RunConfig {
  SyntheticCohortConfig cohort;
  SplitRatios split;
  bool demographics = true;
  TrainConfig train;
  SearchGrid search;
  PathConfig paths;
};

// Defaults: the reference cohort preset at 20,000 patients and the struct
// defaults everywhere else.
RunConfig DefaultRunConfig();

// `base_dir` anchors relative paths. Throws ValidationError.
RunConfig ParseRunConfig(const std::string& json_text, const std::string& base_dir);
// Throws IoError when the file cannot be read.
RunConfig LoadRunConfig(const std::string& path);

}  // namespace eqodds

#endif  // EQODDS_CONFIG_H_
