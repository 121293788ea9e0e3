#include "eqodds/cli.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "eqodds/checkpoint.h"
#include "eqodds/config.h"
#include "eqodds/errors.h"
#include "eqodds/log.h"

namespace eqodds {

namespace {

struct CommonOptions {
  std::string config;
  uint64_t seed = 0;
  bool verbose = false;
};

RunConfig LoadConfigOrDefault(const std::string& path) {
  return path.empty() ? DefaultRunConfig() : LoadRunConfig(path);
}

void EnsureDirectory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

std::string ArmLabel(const std::optional<Attribute>& attribute) {
  return attribute ? "EQ_" + std::string(AttributeName(*attribute)) : "Standard";
}

std::optional<Attribute> ParseSensitive(const std::string& name) {
  if (name == "none") return std::nullopt;
  return ParseAttribute(name);
}

// --- generate ---------------------------------------------------------------

struct GenerateOptions {
  std::string out;
};

int Generate(const CommonOptions& common, const GenerateOptions& opt, std::ostream& out) {
  RunConfig rc = LoadConfigOrDefault(common.config);
  rc.cohort.seed = common.seed;
  const SyntheticCohort cohort = GenerateSyntheticCohort(rc.cohort);
  const std::filesystem::path parent = std::filesystem::path(opt.out).parent_path();
  if (!parent.empty()) EnsureDirectory(parent.string());
  WritePatientsFile(cohort.records, opt.out);
  out << FormatSummaryTable(SummarizePlanted(cohort));
  return kExitOk;
}

// --- prepare ----------------------------------------------------------------

struct PrepareCliOptions {
  std::string records;
  std::string codes;
  std::string out;
};

int Prepare(const CommonOptions& common, const PrepareCliOptions& opt, std::ostream& out) {
  const RunConfig rc = LoadConfigOrDefault(common.config);
  std::string codes_dir = opt.codes;
  if (codes_dir.empty()) codes_dir = rc.paths.codes;
  if (codes_dir.empty()) codes_dir = DefaultCodeListDirectory();
  const CohortCodeLists codes = LoadCohortCodeLists(codes_dir);
  std::vector<PatientRecord> records = ReadPatientsFile(opt.records);

  PrepareOptions po;
  po.seed = common.seed;
  po.ratios = rc.split;
  po.demographics = rc.demographics;
  const PreparedCohort prepared = PrepareCohort(std::move(records), codes, po);
  WritePrepared(prepared, opt.out);
  out << FormatFunnel(prepared.funnel);
  if (prepared.funnel.included == 0) {
    Log().warn("no patient survived index selection and exclusions; wrote an empty cohort");
  }
  return kExitOk;
}

// --- train ------------------------------------------------------------------

struct TrainCliOptions {
  std::string prepared;
  std::string sensitive = "none";
  std::optional<double> lambda;
  std::string out;
};

void WriteModel(const TrainedModel& model, const std::string& dir, const std::string& label) {
  WriteCheckpoint(Checkpoint{model.spec, model.classifier, label},
                  (std::filesystem::path(dir) / "model.ckpt").string());
  WriteText(std::filesystem::path(dir) / "manifest.txt", FormatManifest(model));
  WriteText(std::filesystem::path(dir) / "validation_report.txt",
            FormatReportText(model.validation_report));
}

int TrainCommand(const CommonOptions& common, const TrainCliOptions& opt) {
  const RunConfig rc = LoadConfigOrDefault(common.config);
  TrainConfig tc = rc.train;
  tc.seed = common.seed;
  tc.sensitive_attribute = ParseSensitive(opt.sensitive);
  if (opt.lambda) tc.lambda = *opt.lambda;
  if (tc.sensitive_attribute && !(tc.lambda > 0)) {
    throw ValidationError("--lambda must be positive for adversarial training");
  }
  const LabeledDataset data = ReadPrepared(opt.prepared);
  EnsureDirectory(opt.out);
  const std::string label = ArmLabel(tc.sensitive_attribute);
  try {
    const TrainedModel model = Train(data, tc);
    WriteModel(model, opt.out, label);
    Log().info("{}: selected epoch {} of {}", label, model.selected_epoch, model.trace.size());
  } catch (const SelectionFailedError& e) {
    // Keep the best-AUC model for inspection, then fail.
    const TrainedModel& best = e.best_auc_model();
    WriteText(std::filesystem::path(opt.out) / "manifest.txt",
              FormatManifest(best) + "error = " + e.what() + '\n');
    WriteText(std::filesystem::path(opt.out) / "validation_report.txt",
              FormatReportText(best.validation_report));
    Log().error("model selection failed: {}", e.what());
    return kExitNumeric;
  }
  return kExitOk;
}

// --- evaluate ---------------------------------------------------------------

struct EvaluateOptions {
  std::vector<std::string> checkpoints;
  std::vector<std::string> compare;
  std::string prepared;
  std::string split = "test";
  double threshold = kDefaultThreshold;
  std::string out;
};

int Evaluate(const EvaluateOptions& opt, std::ostream& out) {
  if (!(opt.threshold >= 0 && opt.threshold <= 1)) {
    throw ValidationError("--threshold must lie in [0, 1]");
  }
  const LabeledDataset data = ReadPrepared(opt.prepared);
  const Split split = ParseSplit(opt.split);
  const std::vector<size_t> rows = data.RowsIn(split);
  if (rows.empty()) {
    throw ValidationError("the " + std::string(SplitName(split)) + " split is empty");
  }
  std::vector<int> labels;
  GroupLabels groups;
  for (size_t r : rows) {
    labels.push_back(data.labels[r]);
    groups.race.push_back(data.groups.race[r]);
    groups.gender.push_back(data.groups.gender[r]);
    groups.age.push_back(data.groups.age[r]);
  }

  EnsureDirectory(opt.out);
  std::vector<std::string> names;
  std::vector<FairnessReport> reports;
  std::map<std::string, int> seen;
  std::vector<std::string> paths = opt.checkpoints;
  paths.insert(paths.end(), opt.compare.begin(), opt.compare.end());
  for (const std::string& path : paths) {
    const Checkpoint ckpt = ReadCheckpoint(path);
    if (ckpt.spec.input_dim != data.features.n_cols() || ckpt.spec.output_dim != 1) {
      throw ValidationError("checkpoint '" + path + "' expects " +
                            std::to_string(ckpt.spec.input_dim) + " features; the prepared " +
                            "data has " + std::to_string(data.features.n_cols()));
    }
    CheckParams(ckpt.spec, ckpt.params);
    std::string name = ckpt.label.empty() ? "model" : ckpt.label;
    if (int n = seen[name]++; n > 0) name += "_" + std::to_string(n + 1);
    const std::vector<double> scores = Predict(ckpt.spec, ckpt.params, data.features, rows);
    reports.push_back(BuildFairnessReport(scores, labels, groups, kAllAttributes, opt.threshold));
    names.push_back(name);
  }

  std::vector<NamedReport> named;
  for (size_t i = 0; i < reports.size(); ++i) {
    const std::filesystem::path dir(opt.out);
    WriteText(dir / ("report_" + names[i] + ".txt"), FormatReportText(reports[i]));
    WriteText(dir / ("histogram_" + names[i] + ".csv"), HistogramCsv(reports[i]));
    named.push_back({names[i], &reports[i]});
  }
  const std::string performance = PerformanceCsv(named);
  WriteText(std::filesystem::path(opt.out) / "fairness.csv", FairnessCsv(named));
  WriteText(std::filesystem::path(opt.out) / "performance.csv", performance);
  WriteText(std::filesystem::path(opt.out) / "group_metrics.csv", GroupMetricsCsv(named));
  out << performance;
  return kExitOk;
}

// --- search -----------------------------------------------------------------

struct SearchOptions {
  std::string prepared;
  std::string grid;
  std::optional<size_t> trials;
  std::string sensitive = "none";
  size_t threads = 1;
  std::string out;
};

int Search(const CommonOptions& common, const SearchOptions& opt, std::ostream& out) {
  const std::string config_path = opt.grid.empty() ? common.config : opt.grid;
  const RunConfig rc = LoadConfigOrDefault(config_path);
  SearchGrid grid = rc.search;
  if (opt.trials) grid.n_trials = *opt.trials;
  TrainConfig base = rc.train;
  base.sensitive_attribute = ParseSensitive(opt.sensitive);
  const LabeledDataset data = ReadPrepared(opt.prepared);

  const SearchResult result = RandomSearch(grid, data, base, common.seed, opt.threads);
  const std::filesystem::path dir(opt.out);
  EnsureDirectory((dir / "trials").string());
  for (const TrialResult& t : result.trials) {
    char name[32];
    std::snprintf(name, sizeof(name), "trial_%03zu.txt", t.trial);
    WriteText(dir / "trials" / name, t.manifest);
  }
  const std::string csv = TrialsCsv(result);
  WriteText(dir / "ranking.csv", csv);
  out << csv;
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equalized-odds adversarial training on synthetic EHR cohorts", "eqodds"};
  app.require_subcommand(1);
  CommonOptions common;
  app.add_flag("-v,--verbose", common.verbose, "Debug logging on stderr");

  const auto add_common = [&common](CLI::App* sub, bool with_config) {
    sub->add_option("--seed", common.seed, "Root random seed")->capture_default_str();
    if (with_config) sub->add_option("--config", common.config, "JSON run configuration");
  };

  GenerateOptions gen;
  CLI::App* g = app.add_subcommand("generate", "Write a synthetic patient-record file");
  add_common(g, true);
  g->add_option("--out", gen.out, "Output JSONL path")->required();

  PrepareCliOptions prep;
  CLI::App* p = app.add_subcommand("prepare", "Extract the cohort, features and splits");
  add_common(p, true);
  p->add_option("--records", prep.records, "Patient-record JSONL")->required();
  p->add_option("--codes", prep.codes, "Code-list directory (default: shipped lists)");
  p->add_option("--out", prep.out, "Output directory")->required();

  TrainCliOptions train;
  CLI::App* t = app.add_subcommand("train", "Train the Standard or an EQ arm");
  add_common(t, true);
  t->add_option("--prepared", train.prepared, "Prepared directory")->required();
  t->add_option("--sensitive-attr", train.sensitive, "none, race, gender or age")
      ->check(CLI::IsMember({"none", "race", "gender", "age"}))
      ->capture_default_str();
  t->add_option("--lambda", train.lambda, "Adversary weight (overrides the config)");
  t->add_option("--out", train.out, "Output directory")->required();

  EvaluateOptions eval;
  CLI::App* e = app.add_subcommand("evaluate", "Fairness and performance report");
  e->add_option("--checkpoint", eval.checkpoints, "Model checkpoint (repeatable)")->required();
  e->add_option("--compare", eval.compare, "Additional checkpoint for paired tables");
  e->add_option("--prepared", eval.prepared, "Prepared directory")->required();
  e->add_option("--split", eval.split, "train, val or test")
      ->check(CLI::IsMember({"train", "val", "test"}))
      ->capture_default_str();
  e->add_option("--threshold", eval.threshold, "Decision threshold")->capture_default_str();
  e->add_option("--out", eval.out, "Output directory")->required();

  SearchOptions search;
  CLI::App* s = app.add_subcommand("search", "Random hyperparameter search");
  add_common(s, false);
  s->add_option("--prepared", search.prepared, "Prepared directory")->required();
  s->add_option("--grid", search.grid, "JSON config whose search/train sections apply");
  s->add_option("--trials", search.trials, "Trial count (default: grid n_trials = 100)");
  s->add_option("--sensitive-attr", search.sensitive, "none, race, gender or age")
      ->check(CLI::IsMember({"none", "race", "gender", "age"}))
      ->capture_default_str();
  s->add_option("--threads", search.threads, "Worker threads")->check(CLI::PositiveNumber);
  s->add_option("--out", search.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  Log().set_level(common.verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (g->parsed()) return Generate(common, gen, out);
    if (p->parsed()) return Prepare(common, prep, out);
    if (t->parsed()) return TrainCommand(common, train);
    if (e->parsed()) return Evaluate(eval, out);
    if (s->parsed()) return Search(common, search, out);
  } catch (const ValidationError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const ContractError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const IoError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitIo;
  } catch (const NumericError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitNumeric;
  } catch (const UndefinedMetricError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace eqodds
