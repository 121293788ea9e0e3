#ifndef EQODDS_TRAINER_H_
#define EQODDS_TRAINER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eqodds/adam.h"
#include "eqodds/dataset.h"
#include "eqodds/network.h"
#include "eqodds/random.h"
#include "eqodds/report.h"

namespace eqodds {

// Hidden-layer shape of one network; input and output sizes come from the
// data and the task.
struct ArchitectureConfig {
  std::vector<size_t> hidden;
  bool layer_norm = false;
  bool spectral_norm = false;

  bool operator==(const ArchitectureConfig&) const = default;
};

struct TrainConfig {
  ArchitectureConfig classifier{{64}, false, false};
  ArchitectureConfig discriminator{{32}, false, false};
  double lambda = 1.0;
  double classifier_learning_rate = 1e-3;
  double discriminator_learning_rate = 1e-3;
  size_t batch_size = 256;
  size_t epochs = 100;
  size_t batches_per_epoch = 100;
  // nullopt trains the Standard arm.
  std::optional<Attribute> sensitive_attribute;
  uint64_t seed = 0;
  double eq_auc_floor = 0.7;
  double threshold = kDefaultThreshold;
  // Off only for the reduction check: the discriminator is still evaluated
  // but never updated.
  bool discriminator_updates = true;
};

// Throws ValidationError naming the first bad field.
void ValidateTrainConfig(const TrainConfig& config);

NetworkSpec ClassifierSpec(const TrainConfig& config, size_t input_dim);
NetworkSpec DiscriminatorSpec(const TrainConfig& config);

struct EpochRecord {
  size_t epoch = 0;  // 1-based
  double mean_classifier_loss = 0;
  std::optional<double> mean_adversary_loss;
  std::optional<double> val_auc;
  std::optional<double> val_alignment;
};

struct TrainedModel {
  TrainConfig config;
  NetworkSpec spec;
  NetworkParams classifier;        // selected checkpoint
  NetworkParams final_classifier;  // parameters after the last epoch
  std::vector<EpochRecord> trace;
  size_t selected_epoch = 0;  // 0 = initialization (epochs = 0)
  uint64_t batches_consumed = 0;
  FairnessReport validation_report;
};

// No epoch clears the AUC floor. Carries the best-AUC model for diagnostics.
class SelectionFailedError : public std::runtime_error {
 public:
  SelectionFailedError(const std::string& what, std::shared_ptr<const TrainedModel> best)
      : std::runtime_error(what), best_auc_model_(std::move(best)) {}
  const TrainedModel& best_auc_model() const { return *best_auc_model_; }

 private:
  std::shared_ptr<const TrainedModel> best_auc_model_;
};

// Uniform with replacement over `pool`. Throws ContractError on an empty pool.
std::vector<size_t> SampleBatch(std::span<const size_t> pool, size_t batch_size, Rng& rng);

// Epoch index (0-based into trace) of the EQ selection rule: AUC strictly
// above the floor, then minimal alignment, earliest on ties.
std::optional<size_t> SelectEqEpoch(std::span<const EpochRecord> trace, double auc_floor);

// Classifier scores for the given rows.
std::vector<double> Predict(const NetworkSpec& spec, const NetworkParams& params,
                            const SparseFeatureMatrix& x, std::span<const size_t> rows);

// One alternating step on a batch. Exposed so the alternation can be checked
// directly; training calls it once per batch.
struct AdversarialState {
  NetworkSpec classifier_spec;
  NetworkSpec discriminator_spec;
  NetworkParams classifier;
  NetworkParams discriminator;
  AdamState classifier_adam;
  AdamState discriminator_adam;
};

struct BatchLosses {
  double classifier = 0;
  double adversary = 0;
};

// Updates only the discriminator: forward of the frozen classifier, then one
// Adam step on the cross-entropy of predicting the group from (logit, y).
double DiscriminatorStep(AdversarialState& state, const LabeledDataset& data,
                         std::span<const int> groups, std::span<const size_t> batch,
                         bool apply_update);
// Updates only the classifier on L_cls - lambda * L_adv with the
// discriminator frozen. Returns the classification loss.
double ClassifierStep(AdversarialState& state, const LabeledDataset& data,
                      std::span<const int> groups, std::span<const size_t> batch,
                      double lambda);

TrainedModel TrainStandard(const LabeledDataset& data, const TrainConfig& config);
TrainedModel TrainAdversarial(const LabeledDataset& data, const TrainConfig& config);
// Dispatches on config.sensitive_attribute.
TrainedModel Train(const LabeledDataset& data, const TrainConfig& config);

// Stable key = value text: config, per-epoch trace, selection and final
// validation metrics.
std::string FormatManifest(const TrainedModel& model);
std::string FormatHidden(std::span<const size_t> hidden);

struct SearchGrid {
  std::vector<size_t> classifier_layers{1, 2, 3};
  std::vector<size_t> classifier_widths{32, 64, 128};
  std::vector<size_t> discriminator_layers{1, 2};
  std::vector<size_t> discriminator_widths{16, 32};
  std::vector<double> classifier_learning_rates{1e-4, 3e-4, 1e-3};
  std::vector<double> discriminator_learning_rates{1e-4, 1e-3, 1e-2};
  std::vector<double> lambdas{0.1, 1.0, 10.0};
  std::vector<bool> classifier_layer_norm{false, true};
  std::vector<bool> discriminator_layer_norm{false, true};
  std::vector<bool> discriminator_spectral_norm{false, true};
  size_t n_trials = 100;
};

void ValidateGrid(const SearchGrid& grid);

// Draws one configuration; every hidden layer draws its own width.
TrainConfig SampleTrialConfig(const SearchGrid& grid, const TrainConfig& base, Rng& rng);

struct TrialResult {
  size_t trial = 0;
  TrainConfig config;
  bool ok = false;
  std::string error;
  std::optional<double> val_auc;
  std::optional<double> val_alignment;
  size_t selected_epoch = 0;
  std::string manifest;
};

struct SearchResult {
  std::vector<TrialResult> trials;  // by trial index
  std::vector<size_t> ranking;      // trial indices, best first
};

SearchResult RandomSearch(const SearchGrid& grid, const LabeledDataset& data,
                          const TrainConfig& base, uint64_t seed, size_t threads = 1);

// trial,<params>,val_auc,val_alignment,selected in rank order; selected is 1
// for the top-ranked successful trial.
std::string TrialsCsv(const SearchResult& result);

}  // namespace eqodds

#endif  // EQODDS_TRAINER_H_
