#include "eqodds/trainer.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>
#include <thread>

#include "eqodds/errors.h"
#include "eqodds/log.h"
#include "eqodds/losses.h"

namespace eqodds {

namespace {

constexpr size_t kLossHistory = 8;

std::string Num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string Short(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void CheckArchitecture(const ArchitectureConfig& a, const char* name) {
  for (size_t w : a.hidden) {
    if (w == 0) throw ValidationError(std::string(name) + ".hidden widths must be positive");
  }
}

void CheckGroups(std::span<const int> groups, int k) {
  for (int g : groups) {
    if (g < 0 || g >= k) {
      throw ValidationError("group id " + std::to_string(g) +
                            " does not fit a discriminator with k = " + std::to_string(k));
    }
  }
}

// Rolling record of batch losses for the non-finite-loss diagnostic.
class LossTrace {
 public:
  void Push(double loss) {
    recent_.push_back(loss);
    if (recent_.size() > kLossHistory) recent_.pop_front();
  }
  [[noreturn]] void Fail(size_t epoch, size_t batch, double loss) const {
    std::ostringstream msg;
    msg << "non-finite classifier loss " << loss << " at epoch " << epoch << ", batch "
        << batch << "; preceding losses:";
    for (double l : recent_) msg << ' ' << Short(l);
    throw NumericError(msg.str());
  }

 private:
  std::deque<double> recent_;
};

// Per-epoch validation and best-so-far bookkeeping shared by both arms.
struct Validator {
  const LabeledDataset& data;
  const TrainConfig& config;
  std::vector<size_t> rows;
  std::vector<int> labels;
  std::vector<int> groups;

  Validator(const LabeledDataset& d, const TrainConfig& c)
      : data(d), config(c), rows(d.RowsIn(Split::kValidation)) {
    if (rows.empty()) throw ValidationError("the validation split is empty");
    for (size_t r : rows) {
      labels.push_back(d.labels[r]);
      if (c.sensitive_attribute) groups.push_back(d.groups.For(*c.sensitive_attribute)[r]);
    }
  }

  void Score(const NetworkSpec& spec, const NetworkParams& params, EpochRecord& rec) const {
    const std::vector<double> scores = Predict(spec, params, data.features, rows);
    try {
      rec.val_auc = AucRoc(scores, labels);
    } catch (const UndefinedMetricError&) {
      rec.val_auc.reset();
    }
    if (config.sensitive_attribute) {
      rec.val_alignment =
          AlignmentScore(scores, labels, groups, GroupCount(*config.sensitive_attribute));
    }
  }

  FairnessReport Report(const NetworkSpec& spec, const NetworkParams& params) const {
    const std::vector<double> scores = Predict(spec, params, data.features, rows);
    GroupLabels g;
    for (size_t r : rows) {
      g.race.push_back(data.groups.race[r]);
      g.gender.push_back(data.groups.gender[r]);
      g.age.push_back(data.groups.age[r]);
    }
    return BuildFairnessReport(scores, labels, g, kAllAttributes, config.threshold);
  }
};

bool AucBetter(const std::optional<double>& candidate, const std::optional<double>& best) {
  if (!candidate) return false;
  return !best || *candidate > *best;
}

bool EqFeasible(const EpochRecord& r, double floor) {
  return r.val_auc && *r.val_auc > floor && r.val_alignment.has_value();
}

std::vector<size_t> TrainingRows(const LabeledDataset& data) {
  std::vector<size_t> rows = data.RowsIn(Split::kTrain);
  if (rows.empty()) throw ValidationError("the training split is empty");
  return rows;
}

// Classifier-only step: mean BCE over the batch, one Adam update.
double StandardStep(const NetworkSpec& spec, NetworkParams& params, AdamState& adam,
                    const LabeledDataset& data, std::span<const size_t> batch) {
  NetworkGrads grads = ZeroGrads(params);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0;
  for (size_t r : batch) {
    ForwardResult f = Forward(spec, params, data.features.Row(r));
    const double p = f.output[0];
    const int y = data.labels[r];
    loss += BinaryCrossEntropy(p, y);
    const double g = BinaryCrossEntropyLogitGrad(p, y) * inv_b;
    Backward(spec, params, f.cache, std::span<const double>(&g, 1), grads);
  }
  loss *= inv_b;
  if (!std::isfinite(loss)) return loss;
  adam.Step(params, grads);
  return loss;
}

}  // namespace

void ValidateTrainConfig(const TrainConfig& c) {
  CheckArchitecture(c.classifier, "classifier");
  CheckArchitecture(c.discriminator, "discriminator");
  if (!(c.lambda >= 0) || !std::isfinite(c.lambda)) {
    throw ValidationError("lambda must be a finite non-negative number");
  }
  if (!(c.classifier_learning_rate > 0) || !std::isfinite(c.classifier_learning_rate)) {
    throw ValidationError("classifier_learning_rate must be positive");
  }
  if (!(c.discriminator_learning_rate > 0) || !std::isfinite(c.discriminator_learning_rate)) {
    throw ValidationError("discriminator_learning_rate must be positive");
  }
  if (c.batch_size == 0) throw ValidationError("batch_size must be positive");
  if (c.batches_per_epoch == 0) throw ValidationError("batches_per_epoch must be positive");
  if (!(c.threshold >= 0 && c.threshold <= 1)) {
    throw ValidationError("threshold must lie in [0, 1]");
  }
  if (!(c.eq_auc_floor >= 0 && c.eq_auc_floor <= 1)) {
    throw ValidationError("eq_auc_floor must lie in [0, 1]");
  }
}

NetworkSpec ClassifierSpec(const TrainConfig& config, size_t input_dim) {
  return NetworkSpec{input_dim, config.classifier.hidden, 1, config.classifier.layer_norm,
                     config.classifier.spectral_norm};
}

NetworkSpec DiscriminatorSpec(const TrainConfig& config) {
  if (!config.sensitive_attribute) {
    throw ContractError("the Standard arm has no discriminator");
  }
  return NetworkSpec{2, config.discriminator.hidden,
                     static_cast<size_t>(GroupCount(*config.sensitive_attribute)),
                     config.discriminator.layer_norm, config.discriminator.spectral_norm};
}

std::vector<size_t> SampleBatch(std::span<const size_t> pool, size_t batch_size, Rng& rng) {
  if (pool.empty()) throw ContractError("cannot sample a batch from an empty pool");
  std::vector<size_t> batch(batch_size);
  for (size_t& b : batch) b = pool[rng.UniformInt(pool.size())];
  return batch;
}

std::optional<size_t> SelectEqEpoch(std::span<const EpochRecord> trace, double auc_floor) {
  std::optional<size_t> best;
  for (size_t i = 0; i < trace.size(); ++i) {
    if (!EqFeasible(trace[i], auc_floor)) continue;
    if (!best || *trace[i].val_alignment < *trace[*best].val_alignment) best = i;
  }
  return best;
}

std::vector<double> Predict(const NetworkSpec& spec, const NetworkParams& params,
                            const SparseFeatureMatrix& x, std::span<const size_t> rows) {
  std::vector<double> scores;
  scores.reserve(rows.size());
  for (size_t r : rows) scores.push_back(Forward(spec, params, x.Row(r)).output[0]);
  return scores;
}

double DiscriminatorStep(AdversarialState& s, const LabeledDataset& data,
                         std::span<const int> groups, std::span<const size_t> batch,
                         bool apply_update) {
  PowerIterate(s.discriminator_spec, s.discriminator);
  NetworkGrads grads = ZeroGrads(s.discriminator);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0;
  for (size_t r : batch) {
    const double logit = Forward(s.classifier_spec, s.classifier, data.features.Row(r)).logits[0];
    const double in[2] = {logit, static_cast<double>(data.labels[r])};
    ForwardResult d = Forward(s.discriminator_spec, s.discriminator, std::span<const double>(in));
    loss += MultiClassCrossEntropy(d.output, groups[r]);
    std::vector<double> g = MultiClassCrossEntropyLogitGrad(d.output, groups[r]);
    for (double& v : g) v *= inv_b;
    Backward(s.discriminator_spec, s.discriminator, d.cache, g, grads);
  }
  loss *= inv_b;
  if (apply_update && std::isfinite(loss)) s.discriminator_adam.Step(s.discriminator, grads);
  return loss;
}

double ClassifierStep(AdversarialState& s, const LabeledDataset& data,
                      std::span<const int> groups, std::span<const size_t> batch,
                      double lambda) {
  NetworkGrads grads = ZeroGrads(s.classifier);
  NetworkGrads scratch = ZeroGrads(s.discriminator);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0;
  for (size_t r : batch) {
    ForwardResult f = Forward(s.classifier_spec, s.classifier, data.features.Row(r));
    const double p = f.output[0];
    const int y = data.labels[r];
    loss += BinaryCrossEntropy(p, y);

    const double in[2] = {f.logits[0], static_cast<double>(y)};
    ForwardResult d = Forward(s.discriminator_spec, s.discriminator, std::span<const double>(in));
    const std::vector<double> dq = MultiClassCrossEntropyLogitGrad(d.output, groups[r]);
    const std::vector<double> d_in =
        Backward(s.discriminator_spec, s.discriminator, d.cache, dq, scratch);
    const double g = BinaryCrossEntropyLogitGrad(p, y) * inv_b - lambda * d_in[0] * inv_b;
    Backward(s.classifier_spec, s.classifier, f.cache, std::span<const double>(&g, 1), grads);
  }
  loss *= inv_b;
  if (!std::isfinite(loss)) return loss;
  s.classifier_adam.Step(s.classifier, grads);
  return loss;
}

TrainedModel TrainStandard(const LabeledDataset& data, const TrainConfig& config) {
  ValidateTrainConfig(config);
  if (config.sensitive_attribute) {
    throw ContractError("TrainStandard requires sensitive_attribute = none");
  }
  const std::vector<size_t> train_rows = TrainingRows(data);
  const Validator validator(data, config);

  TrainedModel model;
  model.config = config;
  model.spec = ClassifierSpec(config, data.features.n_cols());
  Rng init = Rng::Derive(config.seed, "classifier_init", 0);
  NetworkParams params = InitParams(model.spec, init);
  AdamState adam(params, AdamOptions{.learning_rate = config.classifier_learning_rate});
  Rng batches = Rng::Derive(config.seed, "batches", 0);

  model.classifier = params;
  std::optional<double> best_auc;
  LossTrace losses;
  for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    double epoch_loss = 0;
    for (size_t b = 1; b <= config.batches_per_epoch; ++b) {
      const std::vector<size_t> batch = SampleBatch(train_rows, config.batch_size, batches);
      double loss;
      try {
        PowerIterate(model.spec, params);
        loss = StandardStep(model.spec, params, adam, data, batch);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(b) + ")");
      }
      if (!std::isfinite(loss)) losses.Fail(epoch, b, loss);
      losses.Push(loss);
      epoch_loss += loss;
      ++model.batches_consumed;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_classifier_loss = epoch_loss / static_cast<double>(config.batches_per_epoch);
    validator.Score(model.spec, params, rec);
    if (AucBetter(rec.val_auc, best_auc)) {
      best_auc = rec.val_auc;
      model.classifier = params;
      model.selected_epoch = epoch;
    }
    Log().debug("epoch {} loss {} val_auc {}", epoch, Short(rec.mean_classifier_loss),
                FormatMetric(rec.val_auc));
    model.trace.push_back(rec);
  }
  if (config.epochs > 0 && model.selected_epoch == 0) {
    throw NumericError("validation AUC-ROC was undefined at every epoch");
  }
  model.final_classifier = std::move(params);
  model.validation_report = validator.Report(model.spec, model.classifier);
  return model;
}

TrainedModel TrainAdversarial(const LabeledDataset& data, const TrainConfig& config) {
  ValidateTrainConfig(config);
  if (!config.sensitive_attribute) {
    throw ContractError("TrainAdversarial requires a sensitive attribute");
  }
  if (config.lambda <= 0 && config.discriminator_updates) {
    throw ValidationError("lambda must be positive for adversarial training");
  }
  const Attribute attribute = *config.sensitive_attribute;
  const std::vector<int>& groups = data.groups.For(attribute);
  CheckGroups(groups, GroupCount(attribute));
  const std::vector<size_t> train_rows = TrainingRows(data);
  const Validator validator(data, config);

  TrainedModel model;
  model.config = config;
  model.spec = ClassifierSpec(config, data.features.n_cols());
  const NetworkSpec dspec = DiscriminatorSpec(config);
  Rng cinit = Rng::Derive(config.seed, "classifier_init", 0);
  Rng dinit = Rng::Derive(config.seed, "discriminator_init", 0);
  NetworkParams cparams = InitParams(model.spec, cinit);
  NetworkParams dparams = InitParams(dspec, dinit);
  AdversarialState state{
      model.spec,
      dspec,
      cparams,
      dparams,
      AdamState(cparams, AdamOptions{.learning_rate = config.classifier_learning_rate}),
      AdamState(dparams, AdamOptions{.learning_rate = config.discriminator_learning_rate}),
  };
  Rng batches = Rng::Derive(config.seed, "batches", 0);

  model.classifier = state.classifier;
  // Best-AUC checkpoint, kept for the selection-failed diagnostic.
  NetworkParams best_auc_params = state.classifier;
  size_t best_auc_epoch = 0;
  std::optional<double> best_auc;
  std::optional<size_t> best_eq;
  LossTrace losses;
  for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    double epoch_loss = 0, epoch_adv = 0;
    for (size_t b = 1; b <= config.batches_per_epoch; ++b) {
      const std::vector<size_t> batch = SampleBatch(train_rows, config.batch_size, batches);
      double loss, adv;
      try {
        PowerIterate(state.classifier_spec, state.classifier);
        adv = DiscriminatorStep(state, data, groups, batch, config.discriminator_updates);
        if (!std::isfinite(adv)) {
          throw NumericError("non-finite adversary loss " + Short(adv));
        }
        loss = ClassifierStep(state, data, groups, batch, config.lambda);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(b) + ")");
      }
      if (!std::isfinite(loss)) losses.Fail(epoch, b, loss);
      losses.Push(loss);
      epoch_loss += loss;
      epoch_adv += adv;
      ++model.batches_consumed;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.mean_classifier_loss = epoch_loss / static_cast<double>(config.batches_per_epoch);
    rec.mean_adversary_loss = epoch_adv / static_cast<double>(config.batches_per_epoch);
    validator.Score(model.spec, state.classifier, rec);
    if (AucBetter(rec.val_auc, best_auc)) {
      best_auc = rec.val_auc;
      best_auc_params = state.classifier;
      best_auc_epoch = epoch;
    }
    if (EqFeasible(rec, config.eq_auc_floor) &&
        (!best_eq || *rec.val_alignment < *model.trace[*best_eq].val_alignment)) {
      best_eq = model.trace.size();
      model.classifier = state.classifier;
      model.selected_epoch = epoch;
    }
    Log().debug("epoch {} loss {} adv {} val_auc {} align {}", epoch,
                Short(rec.mean_classifier_loss), Short(*rec.mean_adversary_loss),
                FormatMetric(rec.val_auc), FormatMetric(rec.val_alignment));
    model.trace.push_back(rec);
  }
  model.final_classifier = state.classifier;

  if (config.epochs > 0 && !best_eq) {
    auto failed = std::make_shared<TrainedModel>(model);
    failed->classifier = best_auc_params;
    failed->selected_epoch = best_auc_epoch;
    failed->validation_report = validator.Report(failed->spec, failed->classifier);
    throw SelectionFailedError(
        "no epoch reached a validation AUC-ROC above " + Short(config.eq_auc_floor) +
            " (best " + FormatMetric(best_auc) + " at epoch " +
            std::to_string(best_auc_epoch) + ")",
        std::move(failed));
  }
  model.validation_report = validator.Report(model.spec, model.classifier);
  return model;
}

TrainedModel Train(const LabeledDataset& data, const TrainConfig& config) {
  return config.sensitive_attribute ? TrainAdversarial(data, config)
                                    : TrainStandard(data, config);
}

std::string FormatHidden(std::span<const size_t> hidden) {
  if (hidden.empty()) return "none";
  std::string out;
  for (size_t i = 0; i < hidden.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(hidden[i]);
  }
  return out;
}

std::string FormatManifest(const TrainedModel& m) {
  const TrainConfig& c = m.config;
  std::ostringstream out;
  const auto kv = [&out](const std::string& k, const std::string& v) {
    out << k << " = " << v << '\n';
  };
  const auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
  kv("arm", c.sensitive_attribute
                ? "eq_" + std::string(AttributeName(*c.sensitive_attribute))
                : std::string("standard"));
  kv("sensitive_attribute", c.sensitive_attribute
                                ? std::string(AttributeName(*c.sensitive_attribute))
                                : std::string("none"));
  kv("seed", std::to_string(c.seed));
  kv("input_dim", std::to_string(m.spec.input_dim));
  kv("classifier.hidden", FormatHidden(c.classifier.hidden));
  kv("classifier.layer_norm", flag(c.classifier.layer_norm));
  kv("classifier.spectral_norm", flag(c.classifier.spectral_norm));
  kv("classifier.learning_rate", Num(c.classifier_learning_rate));
  if (c.sensitive_attribute) {
    kv("discriminator.hidden", FormatHidden(c.discriminator.hidden));
    kv("discriminator.layer_norm", flag(c.discriminator.layer_norm));
    kv("discriminator.spectral_norm", flag(c.discriminator.spectral_norm));
    kv("discriminator.learning_rate", Num(c.discriminator_learning_rate));
    kv("discriminator.updates", flag(c.discriminator_updates));
    kv("lambda", Num(c.lambda));
    kv("eq_auc_floor", Num(c.eq_auc_floor));
  }
  kv("batch_size", std::to_string(c.batch_size));
  kv("epochs", std::to_string(c.epochs));
  kv("batches_per_epoch", std::to_string(c.batches_per_epoch));
  kv("threshold", Num(c.threshold));
  kv("batches_consumed", std::to_string(m.batches_consumed));
  for (const EpochRecord& r : m.trace) {
    const std::string p = "trace." + std::to_string(r.epoch);
    kv(p + ".loss", Num(r.mean_classifier_loss));
    if (r.mean_adversary_loss) kv(p + ".adversary_loss", Num(*r.mean_adversary_loss));
    kv(p + ".val_auc", FormatMetric(r.val_auc));
    if (c.sensitive_attribute) kv(p + ".val_alignment", FormatMetric(r.val_alignment));
  }
  kv("selected_epoch", std::to_string(m.selected_epoch));
  if (m.selected_epoch > 0) {
    const EpochRecord& r = m.trace[m.selected_epoch - 1];
    kv("selected.val_auc", FormatMetric(r.val_auc));
    if (c.sensitive_attribute) kv("selected.val_alignment", FormatMetric(r.val_alignment));
  }
  kv("validation.auc_roc", FormatMetric(m.validation_report.overall.auc_roc));
  kv("validation.auc_prc", FormatMetric(m.validation_report.overall.auc_prc));
  kv("validation.brier", FormatMetric(m.validation_report.overall.brier));
  return out.str();
}

void ValidateGrid(const SearchGrid& g) {
  const auto need = [](bool non_empty, const char* name) {
    if (!non_empty) throw ValidationError(std::string("search grid: ") + name + " is empty");
  };
  need(!g.classifier_layers.empty(), "classifier_layers");
  need(!g.classifier_widths.empty(), "classifier_widths");
  need(!g.discriminator_layers.empty(), "discriminator_layers");
  need(!g.discriminator_widths.empty(), "discriminator_widths");
  need(!g.classifier_learning_rates.empty(), "classifier_learning_rates");
  need(!g.discriminator_learning_rates.empty(), "discriminator_learning_rates");
  need(!g.lambdas.empty(), "lambdas");
  need(!g.classifier_layer_norm.empty(), "classifier_layer_norm");
  need(!g.discriminator_layer_norm.empty(), "discriminator_layer_norm");
  need(!g.discriminator_spectral_norm.empty(), "discriminator_spectral_norm");
  for (size_t w : g.classifier_widths) need(w > 0, "a classifier width of 0");
  for (size_t w : g.discriminator_widths) need(w > 0, "a discriminator width of 0");
  for (double lr : g.classifier_learning_rates) need(lr > 0, "a non-positive learning rate");
  for (double lr : g.discriminator_learning_rates) need(lr > 0, "a non-positive learning rate");
  for (double l : g.lambdas) need(l > 0, "a non-positive lambda");
}

TrainConfig SampleTrialConfig(const SearchGrid& g, const TrainConfig& base, Rng& rng) {
  const auto pick = [&rng](const auto& set) { return set[rng.UniformInt(set.size())]; };
  TrainConfig c = base;
  const size_t cl = pick(g.classifier_layers);
  c.classifier.hidden.clear();
  for (size_t i = 0; i < cl; ++i) c.classifier.hidden.push_back(pick(g.classifier_widths));
  const size_t dl = pick(g.discriminator_layers);
  c.discriminator.hidden.clear();
  for (size_t i = 0; i < dl; ++i) c.discriminator.hidden.push_back(pick(g.discriminator_widths));
  c.classifier_learning_rate = pick(g.classifier_learning_rates);
  c.discriminator_learning_rate = pick(g.discriminator_learning_rates);
  c.lambda = pick(g.lambdas);
  c.classifier.layer_norm = pick(g.classifier_layer_norm);
  c.classifier.spectral_norm = false;
  c.discriminator.layer_norm = pick(g.discriminator_layer_norm);
  c.discriminator.spectral_norm = pick(g.discriminator_spectral_norm);
  c.seed = rng.NextU64();
  return c;
}

SearchResult RandomSearch(const SearchGrid& grid, const LabeledDataset& data,
                          const TrainConfig& base, uint64_t seed, size_t threads) {
  ValidateGrid(grid);
  SearchResult result;
  result.trials.resize(grid.n_trials);
  for (size_t t = 0; t < grid.n_trials; ++t) {
    Rng rng = Rng::Derive(seed, "search_trial", t);
    result.trials[t].trial = t;
    result.trials[t].config = SampleTrialConfig(grid, base, rng);
  }

  std::atomic<size_t> next{0};
  const auto worker = [&] {
    for (size_t t = next++; t < grid.n_trials; t = next++) {
      TrialResult& tr = result.trials[t];
      try {
        const TrainedModel m = Train(data, tr.config);
        tr.ok = true;
        tr.selected_epoch = m.selected_epoch;
        if (m.selected_epoch > 0) {
          tr.val_auc = m.trace[m.selected_epoch - 1].val_auc;
          tr.val_alignment = m.trace[m.selected_epoch - 1].val_alignment;
        }
        tr.manifest = FormatManifest(m);
      } catch (const SelectionFailedError& e) {
        tr.error = e.what();
        tr.manifest = FormatManifest(e.best_auc_model()) + "error = " + tr.error + '\n';
      } catch (const std::exception& e) {
        tr.error = e.what();
        tr.manifest = "error = " + tr.error + '\n';
      }
      if (!tr.ok) Log().warn("trial {} failed: {}", t, tr.error);
    }
  };
  const size_t n_threads = std::max<size_t>(1, std::min(threads, grid.n_trials));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  const bool eq = base.sensitive_attribute.has_value();
  result.ranking.resize(grid.n_trials);
  for (size_t t = 0; t < grid.n_trials; ++t) result.ranking[t] = t;
  const auto key_less = [&](size_t a, size_t b) {
    const TrialResult& x = result.trials[a];
    const TrialResult& y = result.trials[b];
    const bool xs = x.ok && (eq ? x.val_alignment.has_value() : x.val_auc.has_value());
    const bool ys = y.ok && (eq ? y.val_alignment.has_value() : y.val_auc.has_value());
    if (xs != ys) return xs;
    if (xs) {
      if (eq && *x.val_alignment != *y.val_alignment) return *x.val_alignment < *y.val_alignment;
      if (!eq && *x.val_auc != *y.val_auc) return *x.val_auc > *y.val_auc;
    }
    return a < b;
  };
  std::sort(result.ranking.begin(), result.ranking.end(), key_less);
  return result;
}

std::string TrialsCsv(const SearchResult& result) {
  std::ostringstream out;
  out << "trial,classifier_hidden,classifier_layer_norm,classifier_lr,"
         "discriminator_hidden,discriminator_layer_norm,discriminator_spectral_norm,"
         "discriminator_lr,lambda,val_auc,val_alignment,selected\n";
  bool first = true;
  for (size_t t : result.ranking) {
    const TrialResult& tr = result.trials[t];
    const TrainConfig& c = tr.config;
    const bool selected = first && tr.ok;
    first = false;
    out << tr.trial << ',' << FormatHidden(c.classifier.hidden) << ','
        << (c.classifier.layer_norm ? 1 : 0) << ',' << Short(c.classifier_learning_rate) << ','
        << FormatHidden(c.discriminator.hidden) << ',' << (c.discriminator.layer_norm ? 1 : 0)
        << ',' << (c.discriminator.spectral_norm ? 1 : 0) << ','
        << Short(c.discriminator_learning_rate) << ',' << Short(c.lambda) << ','
        << FormatMetric(tr.val_auc) << ',' << FormatMetric(tr.val_alignment) << ','
        << (selected ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace eqodds
