#include <gtest/gtest.h>

#include <set>

#include "eqodds/errors.h"
#include "eqodds/trainer.h"
#include "toy.h"

namespace eqodds {
namespace {

TrainConfig Small() {
  TrainConfig c;
  c.classifier.hidden = {16};
  c.discriminator.hidden = {8};
  c.batch_size = 32;
  c.epochs = 5;
  c.batches_per_epoch = 10;
  c.seed = 3;
  c.eq_auc_floor = 0.5;
  return c;
}

bool SameParams(const NetworkParams& a, const NetworkParams& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].weight != b.layers[l].weight || a.layers[l].bias != b.layers[l].bias ||
        a.layers[l].gamma != b.layers[l].gamma || a.layers[l].beta != b.layers[l].beta ||
        a.layers[l].u != b.layers[l].u) {
      return false;
    }
  }
  return true;
}

TEST(SampleBatch, UniformWithReplacement) {
  const std::vector<size_t> pool = {10, 20};
  Rng rng(1);
  size_t hits = 0;
  const size_t n = 100000;
  const std::vector<size_t> batch = SampleBatch(pool, n, rng);
  for (size_t r : batch) hits += r == 10;
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.5, 0.01);
  EXPECT_EQ(SampleBatch(std::vector<size_t>{7}, 5, rng), std::vector<size_t>(5, 7));
  EXPECT_THROW(SampleBatch(std::vector<size_t>{}, 3, rng), ContractError);
}

TEST(SelectEqEpoch, FloorThenMinimumAlignment) {
  std::vector<EpochRecord> trace = {{1, 0, {}, 0.65, 0.001}, {2, 0, {}, 0.72, 0.010},
                                    {3, 0, {}, 0.75, 0.002}};
  EXPECT_EQ(SelectEqEpoch(trace, 0.7), std::optional<size_t>(2));
  trace.push_back({4, 0, {}, 0.80, 0.002});
  EXPECT_EQ(SelectEqEpoch(trace, 0.7), std::optional<size_t>(2));  // earliest tie
  trace[2].val_auc = 0.7;  // not strictly above the floor
  EXPECT_EQ(SelectEqEpoch(trace, 0.7), std::optional<size_t>(3));
  EXPECT_FALSE(SelectEqEpoch(trace, 0.9).has_value());
}

TEST(Train, SeparableToyIsLearned) {
  const LabeledDataset d = toy::Dataset(200, 5, 1);
  TrainConfig c = Small();
  c.epochs = 40;
  c.classifier_learning_rate = 1e-2;
  const TrainedModel m = Train(d, c);
  ASSERT_EQ(m.trace.size(), 40u);
  EXPECT_GE(*m.trace[m.selected_epoch - 1].val_auc, 0.95);
  EXPECT_EQ(m.batches_consumed, 400u);
  EXPECT_GE(*m.validation_report.overall.auc_roc, 0.95);
}

TEST(Train, DeterministicPerSeed) {
  const LabeledDataset d = toy::Dataset(400, 20, 2, 0.5);
  TrainConfig c = Small();
  c.sensitive_attribute = Attribute::kGender;
  const TrainedModel a = Train(d, c), b = Train(d, c);
  EXPECT_TRUE(SameParams(a.final_classifier, b.final_classifier));
  EXPECT_EQ(FormatManifest(a), FormatManifest(b));
  c.seed = 4;
  EXPECT_FALSE(SameParams(Train(d, c).final_classifier, a.final_classifier));
}

TEST(Train, ZeroEpochsReturnsInitialization) {
  const LabeledDataset d = toy::Dataset(100, 5, 3);
  TrainConfig c = Small();
  c.epochs = 0;
  const TrainedModel m = Train(d, c);
  EXPECT_TRUE(m.trace.empty());
  EXPECT_EQ(m.selected_epoch, 0u);
  EXPECT_EQ(m.batches_consumed, 0u);
  Rng init = Rng::Derive(c.seed, "classifier_init", 0);
  EXPECT_TRUE(SameParams(m.classifier, InitParams(m.spec, init)));
}

TEST(Train, ZeroLambdaWithoutDiscriminatorUpdatesReducesToStandard) {
  const LabeledDataset d = toy::Dataset(2000, 50, 4, 1.0);
  TrainConfig c = Small();
  c.classifier.layer_norm = true;
  const TrainedModel standard = TrainStandard(d, c);
  c.sensitive_attribute = Attribute::kRace;
  c.lambda = 0;
  c.discriminator_updates = false;
  const TrainedModel adv = TrainAdversarial(d, c);
  EXPECT_TRUE(SameParams(standard.final_classifier, adv.final_classifier));
  ASSERT_EQ(standard.trace.size(), adv.trace.size());
  for (size_t e = 0; e < adv.trace.size(); ++e) {
    EXPECT_EQ(standard.trace[e].val_auc, adv.trace[e].val_auc);
    EXPECT_EQ(standard.trace[e].mean_classifier_loss, adv.trace[e].mean_classifier_loss);
  }
}

TEST(Train, ConfigurationErrors) {
  const LabeledDataset d = toy::Dataset(100, 5, 5);
  TrainConfig c = Small();
  c.sensitive_attribute = Attribute::kAge;
  c.lambda = 0;
  EXPECT_THROW(Train(d, c), ValidationError);
  c.lambda = -1;
  EXPECT_THROW(ValidateTrainConfig(c), ValidationError);
  c = Small();
  c.batch_size = 0;
  EXPECT_THROW(Train(d, c), ValidationError);
  c = Small();
  EXPECT_THROW(TrainAdversarial(d, c), ContractError);

  LabeledDataset bad = d;
  bad.groups.gender[0] = 5;
  c.sensitive_attribute = Attribute::kGender;
  EXPECT_THROW(Train(bad, c), ValidationError);
  LabeledDataset no_val = d;
  for (Split& s : no_val.splits) {
    if (s == Split::kValidation) s = Split::kTrain;
  }
  EXPECT_THROW(Train(no_val, Small()), ValidationError);
}

TEST(Train, SelectionFailureCarriesBestAucModel) {
  const LabeledDataset d = toy::Dataset(300, 10, 6, 3.0);
  TrainConfig c = Small();
  c.sensitive_attribute = Attribute::kGender;
  c.eq_auc_floor = 0.999;
  try {
    Train(d, c);
    FAIL() << "expected SelectionFailedError";
  } catch (const SelectionFailedError& e) {
    const TrainedModel& best = e.best_auc_model();
    EXPECT_EQ(best.trace.size(), c.epochs);
    EXPECT_GE(best.selected_epoch, 1u);
  }
}

TEST(Alternation, EachStepTouchesOnlyItsNetwork) {
  const LabeledDataset d = toy::Dataset(200, 8, 7, 0.5);
  TrainConfig c = Small();
  c.sensitive_attribute = Attribute::kAge;
  const NetworkSpec cs = ClassifierSpec(c, 8), ds = DiscriminatorSpec(c);
  EXPECT_EQ(ds.input_dim, 2u);
  EXPECT_EQ(ds.output_dim, 4u);
  Rng rng(1);
  NetworkParams cp = InitParams(cs, rng), dp = InitParams(ds, rng);
  AdversarialState st{cs, ds, cp, dp, AdamState(cp, {}), AdamState(dp, {})};
  const std::vector<size_t> batch = {0, 1, 2, 3, 4, 5, 6, 7};

  const NetworkParams c0 = st.classifier, d0 = st.discriminator;
  DiscriminatorStep(st, d, d.groups.age, batch, false);
  EXPECT_TRUE(SameParams(st.discriminator, d0));
  DiscriminatorStep(st, d, d.groups.age, batch, true);
  EXPECT_TRUE(SameParams(st.classifier, c0));
  EXPECT_FALSE(SameParams(st.discriminator, d0));
  EXPECT_EQ(st.discriminator_adam.step(), 1u);

  const NetworkParams d1 = st.discriminator;
  ClassifierStep(st, d, d.groups.age, batch, 1.0);
  EXPECT_TRUE(SameParams(st.discriminator, d1));
  EXPECT_FALSE(SameParams(st.classifier, c0));
  EXPECT_EQ(st.classifier_adam.step(), 1u);
}

TEST(Alternation, AdversaryTermOpposesDiscriminator) {
  // With a huge lambda the classifier step should raise the discriminator's
  // loss on the same batch.
  const LabeledDataset d = toy::Dataset(400, 8, 8, 0.5);
  TrainConfig c = Small();
  c.sensitive_attribute = Attribute::kGender;
  const NetworkSpec cs = ClassifierSpec(c, 8), ds = DiscriminatorSpec(c);
  Rng rng(2);
  NetworkParams cp = InitParams(cs, rng), dp = InitParams(ds, rng);
  AdversarialState st{cs, ds, cp, dp, AdamState(cp, {.learning_rate = 1e-2}),
                      AdamState(dp, {.learning_rate = 1e-2})};
  std::vector<size_t> batch;
  for (size_t i = 0; i < 200; ++i) batch.push_back(i);
  for (int i = 0; i < 50; ++i) DiscriminatorStep(st, d, d.groups.gender, batch, true);
  const double before = DiscriminatorStep(st, d, d.groups.gender, batch, false);
  for (int i = 0; i < 5; ++i) ClassifierStep(st, d, d.groups.gender, batch, 100.0);
  const double after = DiscriminatorStep(st, d, d.groups.gender, batch, false);
  EXPECT_GT(after, before);
}

TEST(Search, GridSamplingAndDeterminism) {
  SearchGrid grid;
  grid.classifier_layers = {1, 2};
  grid.classifier_widths = {4, 8};
  grid.discriminator_widths = {4};
  grid.n_trials = 3;
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const TrainConfig t = SampleTrialConfig(grid, Small(), rng);
    EXPECT_TRUE(t.classifier.hidden.size() == 1 || t.classifier.hidden.size() == 2);
    for (size_t w : t.classifier.hidden) EXPECT_TRUE(w == 4 || w == 8);
    EXPECT_FALSE(t.classifier.spectral_norm);
    EXPECT_TRUE(std::set<double>({0.1, 1.0, 10.0}).count(t.lambda));
  }
  const LabeledDataset d = toy::Dataset(300, 10, 9, 0.5);
  TrainConfig base = Small();
  base.epochs = 2;
  base.batches_per_epoch = 3;
  base.sensitive_attribute = Attribute::kGender;
  const SearchResult one = RandomSearch(grid, d, base, 11, 1);
  const SearchResult two = RandomSearch(grid, d, base, 11, 2);
  EXPECT_EQ(TrialsCsv(one), TrialsCsv(two));
  EXPECT_EQ(one.ranking.size(), 3u);
  const std::string csv = TrialsCsv(one);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "trial,classifier_hidden,classifier_layer_norm,classifier_lr,discriminator_hidden,"
            "discriminator_layer_norm,discriminator_spectral_norm,discriminator_lr,lambda,"
            "val_auc,val_alignment,selected");
  grid.lambdas.clear();
  EXPECT_THROW(ValidateGrid(grid), ValidationError);
}

TEST(Manifest, StableKeys) {
  const LabeledDataset d = toy::Dataset(200, 5, 10, 0.5);
  TrainConfig c = Small();
  c.epochs = 2;
  const std::string m = FormatManifest(Train(d, c));
  EXPECT_NE(m.find("arm = standard"), std::string::npos) << m;
  EXPECT_NE(m.find("classifier.hidden = 16"), std::string::npos) << m;
  EXPECT_EQ(m.find("lambda"), std::string::npos);
  EXPECT_NE(m.find("trace.2.val_auc"), std::string::npos);
  EXPECT_EQ(FormatHidden(std::vector<size_t>{64, 32}), "64x32");
}

}  // namespace
}  // namespace eqodds
