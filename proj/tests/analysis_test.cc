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
#include <numeric>

#include <gtest/gtest.h>

#include "advfool/analysis.h"
#include "advfool/errors.h"
#include "test_util.h"

namespace advfool {
namespace {

using testing::linear_model;
using testing::relu_model;

void expect_same_metrics(const EvalReport& a, const EvalReport& b) {
  EXPECT_EQ(a.clean_acc, b.clean_acc);
  EXPECT_EQ(a.aua, b.aua);
  EXPECT_EQ(a.asr, b.asr);
  EXPECT_EQ(a.avg_queries, b.avg_queries);
  EXPECT_EQ(a.n_flips, b.n_flips);
  EXPECT_EQ(a.n_originally_correct, b.n_originally_correct);
}

TEST(Summarize, ConstantSample) {
  const auto s = summarize(std::vector<double>(50, 0.1));
  EXPECT_EQ(s.n, 50u);
  EXPECT_EQ(s.mean, 0.1);
  EXPECT_EQ(s.variance, 0.0);
}

TEST(Summarize, KnownMoments) {
  const std::vector<double> x = {1, 2, 3, 4, 10};
  const auto s = summarize(x);
  EXPECT_NEAR(s.mean, 4.0, 1e-15);
  // sum of squared deviations 9+4+1+0+36 = 50
  EXPECT_NEAR(s.variance, 50.0 / 4.0, 1e-13);
  // population third/fourth central moments: 3rd = (-27-8-1+0+216)/5 = 36,
  // 4th = (81+16+1+0+1296)/5 = 278.8, m2 = 10
  EXPECT_NEAR(s.skewness, 36.0 / std::pow(10.0, 1.5), 1e-12);
  EXPECT_NEAR(s.excess_kurtosis, 278.8 / 100.0 - 3.0, 1e-12);
}

TEST(KolmogorovSmirnov, SinglePointAndCriticalValue) {
  EXPECT_NEAR(ks_distance_normal({0.0}, 0.0, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(ks_critical_99(10000), 1.6276 / 100.0, 1e-12);
  // a standard normal sample drawn here should pass
  Rng rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(5000);
  for (auto& v : x) v = n(rng);
  EXPECT_LT(ks_distance_normal(x, 0.0, 1.0), ks_critical_99(x.size()));
  // a uniform sample of the same size should not
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : x) v = u(rng);
  EXPECT_GT(ks_distance_normal(x, 0.0, 1.0 / 3.0), ks_critical_99(x.size()));
}

TEST(Theorem, ZeroNuIsExact) {
  const auto m = relu_model(20, {6, 6, 6}, 2, 9);
  Vocab v = testing::numbered_vocab(20);
  const auto seq = TokenSeq::from_words({"t2", "t5", "t9"}, v);
  const auto t = theorem1_check(m, v, seq, 1, 0, 0.0, 0, 1000, 4);
  EXPECT_EQ(t.stats.variance, 0.0);
  const double want = forward(m, seq.ids).logits(0) -
                      forward(m, seq.with_word(1, std::string(kUnkToken), v).ids)
                          .logits(0);
  EXPECT_EQ(t.stats.mean, want);
  EXPECT_EQ(t.base_score, want);
}

// Noise on the head input: I_new - I ~ N(0, 2 nu |w_y|^2) exactly.
TEST(Theorem, LinearHeadGaussian) {
  const auto m = linear_model(20, 5, 2, 13);
  Vocab v = testing::numbered_vocab(20);
  const auto seq = TokenSeq::from_words({"t2", "t5", "t9", "t3"}, v);
  const double nu = 0.7;
  const auto t = theorem1_check(m, v, seq, 2, 1, nu, m.num_layers(), 20000, 5);
  const double exact = 2 * nu * m.head_weight.row(1).squaredNorm();
  EXPECT_NEAR(t.predicted_firstorder_var, exact, 1e-12);
  EXPECT_NEAR(t.stats.variance / exact, 1.0, 0.05);
  EXPECT_TRUE(t.mean_within_3se);
  EXPECT_TRUE(t.ks_pass);
  EXPECT_NEAR(t.grad_norm_x, m.head_weight.row(1).norm(), 1e-12);
  EXPECT_NEAR(t.predicted_unsquared_var, 2 * nu * m.head_weight.row(1).norm(),
              1e-12);
}

double min_abs_preactivation(const LayeredClassifier& m, const HiddenTrace& tr) {
  double lo = INFINITY;
  for (int l = 0; l < m.num_layers(); ++l) {
    const auto& layer = m.layers[static_cast<std::size_t>(l)];
    const Eigen::VectorXd a =
        layer.weight * tr.z[static_cast<std::size_t>(l)] + layer.bias;
    lo = std::min(lo, a.cwiseAbs().minCoeff());
  }
  return lo;
}

TEST(Theorem, SmallNoiseMeanOnReluModel) {
  Vocab v = testing::numbered_vocab(20);
  int checked = 0;
  for (std::uint64_t seed = 17; checked < 3 && seed < 200; ++seed) {
    const auto m = relu_model(20, {6, 8, 6}, 3, seed);
    const auto seq = TokenSeq::from_words({"t2", "t5", "t9", "t3"}, v);
    const auto ablated = seq.with_word(0, std::string(kUnkToken), v);
    if (min_abs_preactivation(m, forward(m, seq.ids)) < 0.05 ||
        min_abs_preactivation(m, forward(m, ablated.ids)) < 0.05) {
      continue;
    }
    for (int layer = 0; layer <= m.num_layers(); ++layer) {
      const auto t = theorem1_check(m, v, seq, 0, 2, 1e-6, layer, 5000, seed);
      EXPECT_TRUE(t.mean_within_3se) << "seed " << seed << " layer " << layer;
      EXPECT_NEAR(t.stats.variance / t.predicted_firstorder_var, 1.0, 0.1);
    }
    ++checked;
  }
  EXPECT_EQ(checked, 3);
}

TEST(Theorem, Preconditions) {
  const auto m = linear_model(20, 5, 2, 13);
  Vocab v = testing::numbered_vocab(20);
  const auto seq = TokenSeq::from_words({"t2", "t5"}, v);
  EXPECT_THROW(theorem1_check(m, v, seq, 0, 0, 0.1, 0, 999, 1), ConfigError);
  EXPECT_THROW(theorem1_check(m, v, seq, 2, 0, 0.1, 0, 1000, 1), ConfigError);
  EXPECT_THROW(theorem1_check(m, v, seq, 0, 0, 0.1, 7, 1000, 1), LayerIndex);
}

TEST(ImportanceShift, ZeroNuChangesNothing) {
  const auto m = relu_model(20, {6, 6, 6}, 2, 9);
  Vocab v = testing::numbered_vocab(20);
  const auto seq = TokenSeq::from_words({"t2", "t5", "t9", "t11"}, v);
  const auto s = importance_shift(m, v, seq, 0, NoiseSpec{0.0, {0, 1}, 0}, 3);
  EXPECT_EQ(s.base.scores, s.randomized.scores);
  EXPECT_EQ(s.base.ranking, s.randomized.ranking);
  EXPECT_FALSE(s.argmax_changed);
}

TEST(ImportanceShift, RateOverCorpus) {
  const auto& ws = testing::synth_workspace();
  std::vector<std::size_t> idx(40);
  std::iota(idx.begin(), idx.end(), 0);
  const auto none = importance_shift_rate(*ws.model, ws.vocab, ws.test, idx,
                                          NoiseSpec{0.0, {0, 1}, 0}, 1);
  EXPECT_EQ(none.n_changed, 0u);
  EXPECT_EQ(none.n_inputs, 40u);
  const auto lots = importance_shift_rate(*ws.model, ws.vocab, ws.test, idx,
                                          NoiseSpec{1.0, {0, 1}, 0}, 1);
  EXPECT_GT(lots.fraction, 0.0);
  EXPECT_LE(lots.fraction, 1.0);
  EXPECT_EQ(lots.fraction, static_cast<double>(lots.n_changed) / 40.0);
}

TEST(LossChange, ZeroNoiseMassAtZero) {
  const auto& ws = testing::synth_workspace();
  LabeledCorpus small{{ws.test.examples.begin(), ws.test.examples.begin() + 30},
                      2};
  const auto r = loss_change_report(*ws.model, ws.vocab, small,
                                    {{"latent0", NoiseSpec{0.0, {0}, 0}}}, 4, 1);
  ASSERT_EQ(r.size(), 1u);
  const auto& s = r[0];
  EXPECT_EQ(s.stats.n, 120u);
  EXPECT_EQ(s.stats.mean, 0.0);
  EXPECT_EQ(s.stats.variance, 0.0);
  ASSERT_EQ(s.counts.size(), s.bin_edges.size() + 1);
  const auto zero_bin = static_cast<std::size_t>(
      std::upper_bound(s.bin_edges.begin(), s.bin_edges.end(), 0.0) -
      s.bin_edges.begin());
  EXPECT_EQ(s.counts[zero_bin], 120u);
}

TEST(LossChange, CountsSumToDraws) {
  const auto& ws = testing::synth_workspace();
  LabeledCorpus small{{ws.test.examples.begin(), ws.test.examples.begin() + 25},
                      2};
  const auto r = loss_change_report(
      *ws.model, ws.vocab, small,
      {{"latent", NoiseSpec{5.0, {0, 1}, 0}},
       {"mask", InputRandomizer{RandomizerKind::kMask, 0.5}}},
      3, 2, {-1.0, 0.0, 1.0});
  for (const auto& s : r) {
    EXPECT_EQ(std::accumulate(s.counts.begin(), s.counts.end(), std::size_t{0}),
              75u);
    EXPECT_TRUE(std::isfinite(s.stats.variance));
  }
  EXPECT_THROW(loss_change_report(*ws.model, ws.vocab, small, {}, 1, 1, {1.0, 0.0}),
               ConfigError);
}

AttackConfig small_attack() {
  AttackConfig a;
  a.budget = {10, 0.3};
  a.verify_redraws = 5;
  return a;
}

TEST(LayerAblation, ZeroNuRowsMatchUndefended) {
  const auto& ws = testing::synth_workspace();
  const auto attack = small_attack();
  const auto base = evaluate(*ws.model, ws.vocab, ws.lexicon, nullptr, attack,
                             ws.test, 30, 3);
  std::vector<LayerChoice> choices;
  for (const char* name : {"first", "middle", "last", "all"}) {
    choices.push_back({name, parse_layer_set(name, ws.model->num_layers()), 0.0});
  }
  const auto rows = layer_ablation(*ws.model, ws.vocab, ws.lexicon, ws.test,
                                   attack, choices, 30, 3);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) expect_same_metrics(row.report, base);
}

TEST(Sweep, ZeroPointMatchesUndefendedAndExcessHurts) {
  const auto& ws = testing::synth_workspace();
  const auto attack = small_attack();
  const auto base = evaluate(*ws.model, ws.vocab, ws.lexicon, nullptr, attack,
                             ws.test, 20, 3);
  const auto pts = nu_sweep(*ws.model, ws.vocab, ws.lexicon, ws.test, attack,
                            {0, 1}, {0.0, 0.01, 10.0}, 20, 3);
  ASSERT_EQ(pts.size(), 3u);
  expect_same_metrics(pts[0].report, base);
  EXPECT_LT(pts[2].clean_acc, pts[0].clean_acc);
  EXPECT_THROW(nu_sweep(*ws.model, ws.vocab, ws.lexicon, ws.test, attack, {0},
                        {0.1, 0.2}, 5, 1),
               ConfigError);
}

}  // namespace
}  // namespace advfool
