#include <gtest/gtest.h>

#include <cmath>

#include "eqodds/adam.h"
#include "eqodds/checkpoint.h"
#include "eqodds/errors.h"
#include "eqodds/losses.h"
#include "oracles.h"
#include "test_util.h"

namespace eqodds {
namespace {

TEST(Adam, MatchesScalarReference) {
  std::vector<double> params = {0.5, -1.0, 2.0};
  std::vector<double> m(3, 0.0), v(3, 0.0);
  std::vector<oracle::ScalarAdam> ref(3);
  std::vector<double> expected = params;
  const AdamOptions opt{0.01, 0.9, 0.999, 1e-8};
  Rng rng(5);
  for (uint64_t step = 1; step <= 50; ++step) {
    std::vector<double> g(3);
    for (double& x : g) x = rng.Normal();
    AdamUpdate(params, g, m, v, step, opt);
    for (size_t i = 0; i < 3; ++i) expected[i] = ref[i].Step(expected[i], g[i], 0.01);
  }
  for (size_t i = 0; i < 3; ++i) EXPECT_NEAR(params[i], expected[i], 1e-14);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<double> p = {1.0}, m = {0.0}, v = {0.0};
  const std::vector<double> g = {3.0};
  AdamUpdate(p, g, m, v, 1, {});
  EXPECT_NEAR(p[0], 1.0 - 1e-3, 1e-10);
  const std::vector<double> bad = {std::nan("")};
  EXPECT_THROW(AdamUpdate(p, bad, m, v, 2, {}), NumericError);
}

TEST(Adam, StateSkipsPowerIterationVector) {
  const NetworkSpec spec{3, {4}, 1, true, true};
  Rng rng(2);
  NetworkParams p = InitParams(spec, rng);
  const std::vector<double> u_before = p.layers[0].u;
  AdamState state(p, {});
  NetworkGrads g = ZeroGrads(p);
  for (auto& L : g.layers) {
    for (double& x : L.weight) x = 1.0;
    for (double& x : L.gamma) x = 1.0;
  }
  const uint64_t gen = p.generation;
  state.Step(p, g);
  EXPECT_EQ(state.step(), 1u);
  EXPECT_EQ(p.generation, gen + 1);
  EXPECT_EQ(p.layers[0].u, u_before);
  EXPECT_NEAR(p.layers[0].gamma[0], 1.0 - 1e-3, 1e-10);
}

TEST(Losses, ValuesAndClamp) {
  EXPECT_NEAR(BinaryCrossEntropy(0.8, 1), -std::log(0.8), 1e-15);
  EXPECT_NEAR(BinaryCrossEntropy(0.8, 0), -std::log(0.2), 1e-15);
  EXPECT_NEAR(BinaryCrossEntropy(0.0, 1), -std::log(kProbabilityClamp), 1e-12);
  EXPECT_LE(BinaryCrossEntropy(1.0, 0), 16.12);
  const std::vector<double> q = {0.2, 0.5, 0.3};
  EXPECT_NEAR(MultiClassCrossEntropy(q, 1), -std::log(0.5), 1e-15);
  EXPECT_NEAR(Sigmoid(0.0), 0.5, 0);
  EXPECT_NEAR(Sigmoid(-800.0), 0.0, 1e-300);
  EXPECT_NEAR(Sigmoid(800.0), 1.0, 0);
}

TEST(Losses, LogitGradientsMatchFiniteDifferences) {
  for (double z : {-3.0, -0.2, 0.0, 1.7}) {
    for (int y : {0, 1}) {
      const double h = 1e-6;
      const double fd = (BinaryCrossEntropy(Sigmoid(z + h), y) -
                         BinaryCrossEntropy(Sigmoid(z - h), y)) / (2 * h);
      EXPECT_NEAR(BinaryCrossEntropyLogitGrad(Sigmoid(z), y), fd, 1e-8);
    }
  }
  EXPECT_EQ(BinaryCrossEntropyLogitGrad(1.0, 0), 0.0);
  const std::vector<double> q = {0.2, 0.5, 0.3};
  const std::vector<double> g = MultiClassCrossEntropyLogitGrad(q, 2);
  EXPECT_DOUBLE_EQ(g[0], 0.2);
  EXPECT_DOUBLE_EQ(g[1], 0.5);
  EXPECT_DOUBLE_EQ(g[2], -0.7);
}

TEST(Checkpoint, RoundTripIsExact) {
  const NetworkSpec spec{5, {4, 3}, 1, true, true};
  Rng rng(6);
  Checkpoint c{spec, InitParams(spec, rng), "EQ_age"};
  c.params.layers[1].beta[2] = -0.125;
  const std::string bytes = SerializeCheckpoint(c);
  EXPECT_EQ(bytes.substr(0, 8), "EQODCKPT");
  const Checkpoint back = DeserializeCheckpoint(bytes);
  EXPECT_EQ(back.spec, spec);
  EXPECT_EQ(back.label, "EQ_age");
  ASSERT_EQ(back.params.layers.size(), 3u);
  for (size_t l = 0; l < 3; ++l) {
    EXPECT_EQ(back.params.layers[l].weight, c.params.layers[l].weight);
    EXPECT_EQ(back.params.layers[l].beta, c.params.layers[l].beta);
    EXPECT_EQ(back.params.layers[l].u, c.params.layers[l].u);
  }
  EXPECT_EQ(SerializeCheckpoint(back), bytes);

  const auto path = testing_util::ScratchDir() / "m.ckpt";
  WriteCheckpoint(c, path.string());
  EXPECT_EQ(SerializeCheckpoint(ReadCheckpoint(path.string())), bytes);
}

TEST(Checkpoint, RejectsCorruptBuffers) {
  const NetworkSpec spec{2, {2}, 1};
  Rng rng(1);
  const std::string bytes = SerializeCheckpoint({spec, InitParams(spec, rng), "Standard"});
  EXPECT_THROW(DeserializeCheckpoint(bytes.substr(0, bytes.size() - 3)), ValidationError);
  EXPECT_THROW(DeserializeCheckpoint("NOTACKPT" + bytes.substr(8)), ValidationError);
  EXPECT_THROW(DeserializeCheckpoint(bytes + "x"), ValidationError);
  EXPECT_THROW(ReadCheckpoint("/nonexistent/m.ckpt"), IoError);
}

}  // namespace
}  // namespace eqodds
