#include "eqodds/config.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "eqodds/errors.h"

namespace eqodds {

namespace {

using nlohmann::json;

// Reads typed fields out of one JSON object and remembers which keys were
// used, so leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  bool Has(const std::string& key) {
    if (!j_.contains(key)) return false;
    used_.insert(key);
    return true;
  }

  const json& At(const std::string& key) { return j_.at(key); }
  std::string Path(const std::string& key) const { return path_ + "." + key; }

  template <typename T>
  void Read(const std::string& key, T& out) {
    if (!Has(key)) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!j_.at(key).is_boolean()) throw ValidationError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!j_.at(key).is_number_integer() || j_.at(key).get<long long>() < 0) {
          throw ValidationError("");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!j_.at(key).is_number()) throw ValidationError("");
      }
      out = j_.at(key).get<T>();
    } catch (const std::exception&) {
      throw ValidationError(Path(key) + ": wrong type (" + j_.at(key).dump() + ")");
    }
  }

  template <typename T, size_t N>
  void ReadArray(const std::string& key, std::array<T, N>& out) {
    if (!Has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != N) {
      throw ValidationError(Path(key) + ": expected an array of " + std::to_string(N) +
                            " numbers");
    }
    for (size_t i = 0; i < N; ++i) {
      if (!v[i].is_number()) throw ValidationError(Path(key) + ": expected numbers");
      out[i] = v[i].get<T>();
    }
  }

  template <typename T>
  void ReadList(const std::string& key, std::vector<T>& out) {
    if (!Has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ValidationError(Path(key) + ": expected an array");
    std::vector<T> parsed;
    for (const json& e : v) {
      if constexpr (std::is_same_v<T, bool>) {
        if (!e.is_boolean()) throw ValidationError(Path(key) + ": expected booleans");
      } else if constexpr (std::is_integral_v<T>) {
        if (!e.is_number_integer() || e.get<long long>() < 0) {
          throw ValidationError(Path(key) + ": expected non-negative integers");
        }
      } else {
        if (!e.is_number()) throw ValidationError(Path(key) + ": expected numbers");
      }
      parsed.push_back(e.get<T>());
    }
    out = std::move(parsed);
  }

  void RejectUnknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw ValidationError("unknown config key '" + Path(key) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void ReadArchitecture(Section& parent, const std::string& key, ArchitectureConfig& out) {
  if (!parent.Has(key)) return;
  Section s(parent.At(key), parent.Path(key));
  s.ReadList("hidden", out.hidden);
  s.Read("layer_norm", out.layer_norm);
  s.Read("spectral_norm", out.spectral_norm);
  s.RejectUnknown();
}

void ReadCohort(Section& s, SyntheticCohortConfig& c) {
  if (s.Has("preset")) {
    const json& p = s.At("preset");
    if (!p.is_string()) throw ValidationError(s.Path("preset") + ": expected a string");
    const std::string name = p.get<std::string>();
    if (name == "reference") {
      c = ReferenceCohortConfig(c.n_patients, c.seed);
    } else if (name == "uniform") {
      c = SyntheticCohortConfig{};
    } else {
      throw ValidationError(s.Path("preset") + ": expected \"reference\" or \"uniform\"");
    }
  }
  s.Read("n_patients", c.n_patients);
  s.ReadArray("race_proportions", c.race_proportions);
  s.ReadArray("gender_proportions", c.gender_proportions);
  s.ReadArray("age_proportions", c.age_proportions);
  s.Read("base_incidence", c.base_incidence);
  s.ReadArray("race_incidence_multiplier", c.race_incidence_multiplier);
  s.ReadArray("gender_incidence_multiplier", c.gender_incidence_multiplier);
  s.ReadArray("age_incidence_multiplier", c.age_incidence_multiplier);
  s.ReadArray("race_score_shift", c.race_score_shift);
  s.ReadArray("gender_score_shift", c.gender_score_shift);
  s.ReadArray("age_score_shift", c.age_score_shift);
  s.Read("concept_vocab_size", c.concept_vocab_size);
  s.Read("mean_events_per_patient", c.mean_events_per_patient);
  s.Read("n_informative", c.n_informative);
  s.Read("signal_strength", c.signal_strength);
  s.Read("informative_offset", c.informative_offset);
  s.Read("fatal_chd_fraction", c.fatal_chd_fraction);
  s.Read("nonfatal_chd_rate", c.nonfatal_chd_rate);
  s.Read("exclusion_fraction", c.exclusion_fraction);
  s.Read("death_rate", c.death_rate);
  s.RejectUnknown();
  ValidateConfig(c);
}

void ReadTrain(Section& s, TrainConfig& t) {
  ReadArchitecture(s, "classifier", t.classifier);
  ReadArchitecture(s, "discriminator", t.discriminator);
  s.Read("lambda", t.lambda);
  s.Read("classifier_learning_rate", t.classifier_learning_rate);
  s.Read("discriminator_learning_rate", t.discriminator_learning_rate);
  s.Read("batch_size", t.batch_size);
  s.Read("epochs", t.epochs);
  s.Read("batches_per_epoch", t.batches_per_epoch);
  s.Read("eq_auc_floor", t.eq_auc_floor);
  s.Read("threshold", t.threshold);
  s.RejectUnknown();
  ValidateTrainConfig(t);
}

void ReadSearch(Section& s, SearchGrid& g) {
  s.ReadList("classifier_layers", g.classifier_layers);
  s.ReadList("classifier_widths", g.classifier_widths);
  s.ReadList("discriminator_layers", g.discriminator_layers);
  s.ReadList("discriminator_widths", g.discriminator_widths);
  s.ReadList("classifier_learning_rates", g.classifier_learning_rates);
  s.ReadList("discriminator_learning_rates", g.discriminator_learning_rates);
  s.ReadList("lambdas", g.lambdas);
  s.ReadList("classifier_layer_norm", g.classifier_layer_norm);
  s.ReadList("discriminator_layer_norm", g.discriminator_layer_norm);
  s.ReadList("discriminator_spectral_norm", g.discriminator_spectral_norm);
  s.Read("n_trials", g.n_trials);
  s.RejectUnknown();
  ValidateGrid(g);
}

}  // namespace

RunConfig DefaultRunConfig() {
  RunConfig rc;
  rc.cohort = ReferenceCohortConfig(20000, 0);
  return rc;
}

RunConfig ParseRunConfig(const std::string& json_text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig rc = DefaultRunConfig();
  Section top(root, "config");
  if (top.Has("cohort")) {
    Section s(top.At("cohort"), "cohort");
    ReadCohort(s, rc.cohort);
  }
  if (top.Has("prepare")) {
    Section s(top.At("prepare"), "prepare");
    s.Read("train_fraction", rc.split.train);
    s.Read("validation_fraction", rc.split.validation);
    s.Read("test_fraction", rc.split.test);
    s.Read("demographics", rc.demographics);
    s.RejectUnknown();
  }
  if (top.Has("train")) {
    Section s(top.At("train"), "train");
    ReadTrain(s, rc.train);
  }
  if (top.Has("search")) {
    Section s(top.At("search"), "search");
    ReadSearch(s, rc.search);
  }
  if (top.Has("paths")) {
    Section s(top.At("paths"), "paths");
    s.Read("codes", rc.paths.codes);
    s.RejectUnknown();
    if (!rc.paths.codes.empty()) {
      const std::filesystem::path p(rc.paths.codes);
      if (p.is_relative()) rc.paths.codes = (std::filesystem::path(base_dir) / p).string();
    }
  }
  top.RejectUnknown();
  return rc;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  return ParseRunConfig(text.str(), parent.empty() ? "." : parent.string());
}

}  // namespace eqodds
