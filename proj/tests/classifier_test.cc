//
// Copyright 2026 The advfool Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "advfool/classifier.h"
#include "advfool/errors.h"
#include "advfool/parallel.h"
#include "test_util.h"

namespace advfool {
namespace {

using testing::linear_model;
using testing::random_ids;
using testing::relu_model;

// Plain re-implementation of layers index+1..L; returns the pre-activations
// of every layer it runs so callers can detect relu kinks.
Eigen::VectorXd reference_from(const LayeredClassifier& m, int index,
                               Eigen::VectorXd z,
                               std::vector<Eigen::VectorXd>* pre = nullptr) {
  for (int l = index; l < m.num_layers(); ++l) {
    const auto& layer = m.layers[static_cast<std::size_t>(l)];
    Eigen::VectorXd a = layer.weight * z + layer.bias;
    if (pre) pre->push_back(a);
    z = layer.activation == Activation::kRelu ? Eigen::VectorXd(a.cwiseMax(0.0))
                                              : a;
  }
  return m.head_weight * z + m.head_bias;
}

bool same_signs(const std::vector<Eigen::VectorXd>& a,
                const std::vector<Eigen::VectorXd>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < a[i].size(); ++j)
      if ((a[i](j) > 0) != (b[i](j) > 0)) return false;
  return true;
}

TEST(Forward, PooledEmbeddingAndHead) {
  const auto m = relu_model(12, {4, 5, 3}, 3, 7);
  const std::vector<int> ids = {2, 5, 5, 9};
  const auto tr = forward(m, ids);
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(4);
  for (int id : ids) pooled += m.embedding.values.row(id).transpose();
  pooled /= 4.0;
  EXPECT_LT((tr.z[0] - pooled).norm(), 1e-14);
  EXPECT_EQ(tr.z.size(), 3u);
  EXPECT_TRUE(apply_head(m, tr.z.back()) == tr.logits);
  EXPECT_LT((reference_from(m, 0, tr.z[0]) - tr.logits).norm(), 1e-12);
}

TEST(Forward, DeterministicWithoutNoise) {
  const auto m = relu_model(30, {8, 8, 8}, 2, 1);
  Rng rng(5);
  const auto ids = random_ids(30, 9, rng);
  EXPECT_TRUE(forward(m, ids).logits == forward(m, ids).logits);
}

TEST(Forward, ZeroNuIsBitIdentical) {
  const auto m = relu_model(30, {8, 8, 8}, 2, 1);
  Rng ids_rng(5);
  const auto ids = random_ids(30, 9, ids_rng);
  NoiseSpec noise{0.0, {0, 1}, 3};
  Rng rng(11);
  const Rng before = rng;
  EXPECT_TRUE(forward(m, ids, &noise, &rng).logits == forward(m, ids).logits);
  EXPECT_TRUE(rng == before) << "nu = 0 must not consume randomness";
}

TEST(Forward, NoiseRecordsCleanTrace) {
  const auto m = relu_model(30, {8, 8}, 2, 1);
  const std::vector<int> ids = {3, 4};
  NoiseSpec noise{0.5, {0}, 0};
  Rng rng(2);
  const auto noisy = forward(m, ids, &noise, &rng);
  const auto clean = forward(m, ids);
  EXPECT_TRUE(noisy.z[0] == clean.z[0]);
  EXPECT_FALSE(noisy.logits == clean.logits);
}

// Noise on the head input of a linear model: logits_c ~ N(mu_c, nu |w_c|^2).
TEST(Forward, LinearHeadVarianceMatchesPushforward) {
  const auto m = linear_model(20, 6, 3, 4);
  const std::vector<int> ids = {2, 7, 11};
  const double nu = 0.3;
  NoiseSpec noise{nu, {m.num_layers()}, 0};
  Rng rng(99);
  const int draws = 100000;
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(3), sq = Eigen::ArrayXd::Zero(3);
  for (int d = 0; d < draws; ++d) {
    const Eigen::ArrayXd l = forward(m, ids, &noise, &rng).logits.array();
    sum += l;
    sq += l * l;
  }
  const Eigen::ArrayXd mean = sum / draws;
  const Eigen::ArrayXd var = (sq - draws * mean * mean) / (draws - 1);
  const auto clean = forward(m, ids).logits;
  for (int c = 0; c < 3; ++c) {
    const double want = nu * m.head_weight.row(c).squaredNorm();
    EXPECT_NEAR(var(c) / want, 1.0, 0.05) << "class " << c;
    EXPECT_NEAR(mean(c), clean(c), 4.0 * std::sqrt(want / draws));
  }
}

TEST(Forward, RejectsBadInput) {
  const auto m = relu_model(10, {4, 4}, 2, 1);
  EXPECT_THROW(forward(m, std::vector<int>{}), ModelShape);
  EXPECT_THROW(forward(m, std::vector<int>{10}), ModelShape);
  NoiseSpec noise{0.1, {5}, 0};
  Rng rng(1);
  EXPECT_THROW(forward(m, std::vector<int>{2}, &noise, &rng), Error);
}

TEST(Forward, OverflowIsReported) {
  auto m = relu_model(10, {4, 4}, 2, 1);
  m.layers[0].weight *= 1e300;
  m.embedding.values *= 1e300;
  EXPECT_THROW(forward(m, std::vector<int>{2, 3}), NumericOverflow);
}

TEST(Validate, DimensionChain) {
  auto m = relu_model(10, {4, 5, 3}, 2, 1);
  EXPECT_NO_THROW(m.validate());
  auto bad = m;
  bad.head_weight = Eigen::MatrixXd::Zero(2, 4);
  EXPECT_THROW(bad.validate(), ModelShape);
  bad = m;
  bad.layers.clear();
  EXPECT_THROW(bad.validate(), ModelShape);
  bad = m;
  bad.layers[1].bias(0) = std::nan("");
  EXPECT_THROW(bad.validate(), ModelShape);
}

TEST(Argmax, Basic) {
  EXPECT_EQ(argmax(Eigen::Vector2d(0.2, 0.9)), 1);
  EXPECT_EQ(argmax(Eigen::Vector2d(0.5, 0.5)), 0);
  EXPECT_EQ(argmax(Eigen::Vector3d(-1, 3, 3)), 1);
}

TEST(CrossEntropy, MatchesLogSoftmax) {
  const Eigen::Vector3d l(1.0, -2.0, 0.5);
  const double z = std::exp(1.0) + std::exp(-2.0) + std::exp(0.5);
  EXPECT_NEAR(cross_entropy(l, 2), std::log(z) - 0.5, 1e-14);
  // stable for large logits
  EXPECT_NEAR(cross_entropy(Eigen::Vector2d(1000, 0), 0), 0.0, 1e-12);
}

TEST(HeadGradient, LastIndexIsHeadRow) {
  const auto m = linear_model(20, 6, 3, 4);
  const auto tr = forward(m, std::vector<int>{2, 3});
  for (int y = 0; y < 3; ++y) {
    const Eigen::VectorXd g = head_gradient(m, tr, m.num_layers(), y);
    EXPECT_TRUE(g == m.head_weight.row(y).transpose());
  }
}

TEST(HeadGradient, ZeroRowGivesZeroEverywhere) {
  auto m = relu_model(20, {5, 6, 4}, 3, 2);
  m.head_weight.row(1).setZero();
  const auto tr = forward(m, std::vector<int>{2, 9, 4});
  for (int l = 0; l <= m.num_layers(); ++l) {
    EXPECT_TRUE(head_gradient(m, tr, l, 1).isZero(0.0)) << "layer " << l;
  }
}

TEST(HeadGradient, ChainRuleConsistency) {
  const auto m = relu_model(20, {5, 6, 4}, 2, 3);
  const auto tr = forward(m, std::vector<int>{2, 9, 4, 4});
  for (int l = 0; l < m.num_layers(); ++l) {
    const auto& layer = m.layers[static_cast<std::size_t>(l)];
    const Eigen::VectorXd upper = head_gradient(m, tr, l + 1, 0);
    Eigen::VectorXd masked = upper;
    for (Eigen::Index j = 0; j < masked.size(); ++j)
      if (tr.z[static_cast<std::size_t>(l) + 1](j) <= 0.0) masked(j) = 0.0;
    const Eigen::VectorXd want = layer.weight.transpose() * masked;
    EXPECT_LT((head_gradient(m, tr, l, 0) - want).norm(), 1e-10);
  }
}

TEST(HeadGradient, MatchesCentralDifferences) {
  const double h = 1e-4;
  Rng rng(2024);
  int checked = 0;
  for (int attempt = 0; checked < 100 && attempt < 1000; ++attempt) {
    const auto m = relu_model(25, {6, 7, 5}, 3, 500 + attempt);
    const auto ids = random_ids(25, 1 + attempt % 8, rng);
    const auto tr = forward(m, ids);
    const int l = attempt % (m.num_layers() + 1);
    const int y = attempt % 3;
    const Eigen::VectorXd z = tr.z[static_cast<std::size_t>(l)];
    std::vector<Eigen::VectorXd> pre;
    reference_from(m, l, z, &pre);
    Eigen::VectorXd fd(z.size());
    bool kink = false;
    for (Eigen::Index j = 0; j < z.size() && !kink; ++j) {
      Eigen::VectorXd up = z, down = z;
      up(j) += h;
      down(j) -= h;
      std::vector<Eigen::VectorXd> pu, pd;
      const double fu = reference_from(m, l, up, &pu)(y);
      const double fdn = reference_from(m, l, down, &pd)(y);
      kink = !same_signs(pre, pu) || !same_signs(pre, pd);
      fd(j) = (fu - fdn) / (2 * h);
    }
    if (kink) continue;
    const Eigen::VectorXd g = head_gradient(m, tr, l, y);
    const double rel = (g - fd).norm() / std::max(fd.norm(), 1e-12);
    EXPECT_LE(rel, 1e-4) << "attempt " << attempt;
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

TEST(HeadGradient, RejectsOutOfRangeLayer) {
  const auto m = relu_model(10, {4, 4}, 2, 1);
  const auto tr = forward(m, std::vector<int>{2});
  EXPECT_THROW(head_gradient(m, tr, 2, 0), LayerIndex);
  EXPECT_THROW(head_gradient(m, tr, -1, 0), LayerIndex);
}

LabeledCorpus tiny_corpus() { return synth_corpus(4, 200, 40, 2).corpus; }

TEST(Train, DeterministicInSeed) {
  const auto c = tiny_corpus();
  TrainConfig cfg;
  cfg.epochs = 3;
  const auto a = train(c, 42, Architecture{}, cfg);
  const auto b = train(c, 42, Architecture{}, cfg);
  EXPECT_TRUE(bitwise_equal(a, b));
  cfg.seed = 2;
  EXPECT_FALSE(bitwise_equal(a, train(c, 42, Architecture{}, cfg)));
}

TEST(Train, ZeroEpochsReturnsInit) {
  const auto c = tiny_corpus();
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto m = train(c, 42, Architecture{}, cfg);
  EXPECT_TRUE(bitwise_equal(
      m, init_classifier(42, 2, Architecture{}, cfg.seed, cfg.init_scale)));
}

TEST(Train, InitKeepsPadRowZero) {
  const auto m = init_classifier(42, 2, Architecture{}, 1, 1.0);
  EXPECT_TRUE(m.embedding.values.row(kPadId).isZero(0.0));
  EXPECT_NO_THROW(m.validate());
}

TEST(Train, LossDecreasesOnSynth) {
  const auto& ws = testing::synth_workspace();
  ASSERT_GE(ws.epoch_losses.size(), 2u);
  EXPECT_LT(ws.epoch_losses.back(), ws.epoch_losses.front());
}

TEST(Train, SynthTestAccuracy) {
  const auto& ws = testing::synth_workspace();
  EXPECT_GE(accuracy(*ws.model, ws.test), 0.90);
}

TEST(Train, DivergenceIsReported) {
  const auto c = tiny_corpus();
  TrainConfig cfg;
  cfg.learning_rate = 1e200;
  cfg.epochs = 5;
  EXPECT_THROW(train(c, 42, Architecture{}, cfg), TrainingDiverged);
}

TEST(Train, RejectsBadConfig) {
  const auto c = tiny_corpus();
  TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(train(c, 42, Architecture{}, cfg), ConfigError);
  EXPECT_THROW(train(LabeledCorpus{}, 42, Architecture{}, TrainConfig{}),
               ConfigError);
}

TEST(Checkpoint, BitwiseRoundTrip) {
  const auto& ws = testing::synth_workspace();
  std::stringstream buf;
  write_checkpoint(buf, *ws.model, ws.vocab);
  const auto back = read_checkpoint(buf);
  EXPECT_TRUE(bitwise_equal(back.model, *ws.model));
  EXPECT_EQ(back.vocab, ws.vocab);
}

TEST(Checkpoint, IdentityLayerAndOddValues) {
  auto m = linear_model(6, 3, 2, 8);
  m.head_bias(0) = 0.1 + 0.2;
  m.head_bias(1) = -5e-324;
  Vocab v = testing::numbered_vocab(6);
  std::stringstream buf;
  write_checkpoint(buf, m, v);
  EXPECT_TRUE(bitwise_equal(read_checkpoint(buf).model, m));
}

TEST(Checkpoint, RejectsGarbage) {
  std::istringstream wrong_magic("not-a-checkpoint 1\n");
  EXPECT_THROW(read_checkpoint(wrong_magic), Error);
  const auto& ws = testing::synth_workspace();
  std::stringstream buf;
  write_checkpoint(buf, *ws.model, ws.vocab);
  std::string text = buf.str();
  text.resize(text.size() / 2);
  std::istringstream truncated(text);
  EXPECT_THROW(read_checkpoint(truncated), Error);
}

}  // namespace
}  // namespace advfool
