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
#include <gtest/gtest.h>

#include "advfool/attack.h"
#include "advfool/errors.h"
#include "test_util.h"

namespace advfool {
namespace {

using testing::linear_model;

QueryOracle base_oracle(const LayeredClassifier& m) {
  return QueryOracle([&m](const TokenSeq& t) { return forward(m, t.ids).logits; });
}

TEST(Oracle, CountsAndEnforcesBudget) {
  const auto m = linear_model(5, 2, 2, 1);
  auto oracle = base_oracle(m);
  oracle.set_budget(2);
  Vocab v = testing::numbered_vocab(5);
  const auto seq = TokenSeq::from_words({"t2"}, v);
  oracle.query(seq);
  EXPECT_EQ(oracle.queries_used(), 1u);
  EXPECT_THROW(oracle.set_budget(10), std::logic_error);
  oracle.query(seq);
  EXPECT_THROW(oracle.query(seq), BudgetExhausted);
  EXPECT_EQ(oracle.queries_used(), 2u);
}

TEST(Budget, PaperSettings) {
  // K_max = 50, rho_max 0.3 (AG News) and 0.1 (IMDB), Q_max = K_max * L.
  AttackBudget agnews{50, 0.3};
  EXPECT_EQ(agnews.q_max(20), 1000u);
  EXPECT_EQ(agnews.max_perturbed(10), 3u);
  AttackBudget imdb{50, 0.1};
  EXPECT_EQ(imdb.max_perturbed(10), 1u);
  EXPECT_EQ(imdb.max_perturbed(11), 2u);
  EXPECT_EQ(imdb.max_perturbed(1), 1u);
  EXPECT_THROW((AttackBudget{50, 0.0}).validate(), ConfigError);
  EXPECT_THROW((AttackBudget{0, 0.3}).validate(), ConfigError);
  EXPECT_THROW((AttackBudget{1, 1.5}).validate(), ConfigError);
}

TEST(Ranking, DescendingWithIndexTieBreak) {
  EXPECT_EQ(rank_scores({0.5, 2.0, 0.5, -1.0}),
            (std::vector<std::size_t>{1, 0, 2, 3}));
}

// Linear mean-pooled model: I_i = (w_y . e_i - w_y . e_unk) / L.
TEST(Importance, LinearClosedForm) {
  const auto m = linear_model(12, 5, 3, 21);
  Vocab v = testing::numbered_vocab(12);
  const auto seq = TokenSeq::from_words({"t2", "t7", "t7", "t11", "t4"}, v);
  const int y = 2;
  auto oracle = base_oracle(m);
  const auto p = importance_profile(oracle, seq, y, Ablation::kUnk, v);
  EXPECT_EQ(oracle.queries_used(), seq.size() + 1);
  ASSERT_EQ(p.scores.size(), seq.size());
  const Eigen::RowVectorXd w = m.head_weight.row(y);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const double want = (w.dot(m.embedding.values.row(seq.ids[i])) -
                         w.dot(m.embedding.values.row(kUnkId))) /
                        static_cast<double>(seq.size());
    EXPECT_NEAR(p.scores[i], want, 1e-10) << i;
  }
  EXPECT_EQ(p.ranking, rank_scores(p.scores));
}

TEST(Importance, UnkTwinScoresZero) {
  auto m = linear_model(6, 3, 2, 5);
  m.embedding.values.row(3) = m.embedding.values.row(kUnkId);
  Vocab v = testing::numbered_vocab(6);
  const auto seq = TokenSeq::from_words({"t2", "t3", "t4"}, v);
  auto oracle = base_oracle(m);
  EXPECT_EQ(importance_profile(oracle, seq, 0, Ablation::kUnk, v).scores[1], 0.0);
}

TEST(Importance, SuppliedBaseSkipsQuery) {
  const auto m = linear_model(6, 3, 2, 5);
  Vocab v = testing::numbered_vocab(6);
  const auto seq = TokenSeq::from_words({"t2", "t3"}, v);
  auto oracle = base_oracle(m);
  importance_profile(oracle, seq, 0, Ablation::kUnk, v, forward(m, seq.ids).logits);
  EXPECT_EQ(oracle.queries_used(), 2u);
}

TEST(Importance, DeleteAblation) {
  const auto m = linear_model(6, 3, 2, 5);
  Vocab v = testing::numbered_vocab(6);
  const auto seq = TokenSeq::from_words({"t2", "t3", "t5"}, v);
  auto oracle = base_oracle(m);
  const auto p = importance_profile(oracle, seq, 1, Ablation::kDelete, v);
  const double base = forward(m, seq.ids).logits(1);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(p.scores[i], base - forward(m, seq.without_word(i).ids).logits(1));
  }
  // a single word cannot be deleted; it is masked instead
  const auto one = TokenSeq::from_words({"t2"}, v);
  auto o2 = base_oracle(m);
  const auto q = importance_profile(o2, one, 1, Ablation::kDelete, v);
  EXPECT_EQ(q.scores[0],
            forward(m, one.ids).logits(1) - forward(m, std::vector<int>{kUnkId}).logits(1));
}

TEST(Importance, DefendedProfilesDiffer) {
  const auto m = linear_model(12, 5, 2, 21);
  Vocab v = testing::numbered_vocab(12);
  const auto seq = TokenSeq::from_words({"t2", "t7", "t9"}, v);
  DefendedModel d(m, NoiseSpec{0.1, {0, 1}, 0});
  QueryOracle a(make_victim(d, 1)), b(make_victim(d, 2));
  EXPECT_NE(importance_profile(a, seq, 0, Ablation::kUnk, v).scores,
            importance_profile(b, seq, 0, Ablation::kUnk, v).scores);
}

TEST(Lexicon, Candidates) {
  SynonymLexicon lex;
  const std::vector<std::string> good = {"fine", "great"};
  lex.add("good", good);
  EXPECT_EQ(lexicon_candidates("good", lex, 1), (std::vector<std::string>{"fine"}));
  EXPECT_EQ(lexicon_candidates("good", lex, 5), good);
  EXPECT_TRUE(lexicon_candidates("absent", lex, 5).empty());
  std::vector<std::string> many;
  for (int i = 0; i < 80; ++i) many.push_back("s" + std::to_string(i));
  lex.add("big", many);
  EXPECT_EQ(lexicon_candidates("big", lex, 50).size(), 50u);
}

TEST(CharBugs, Golden) {
  EXPECT_EQ(char_bug_candidates("good"),
            (std::vector<std::string>{"go od", "god", "godo", "g0od"}));
  EXPECT_EQ(char_bug_candidates("movie"),
            (std::vector<std::string>{"mo vie", "mvie", "moie", "move", "mvoie",
                                      "m0vie"}));
  EXPECT_EQ(char_bug_candidates("loose"),
            (std::vector<std::string>{"lo ose", "lose", "looe", "losoe", "1oose"}));
  EXPECT_EQ(char_bug_candidates("a"), (std::vector<std::string>{"@"}));
  EXPECT_EQ(char_bug_candidates("ab"),
            (std::vector<std::string>{"a b", "ba", "@b"}));
  EXPECT_EQ(char_bug_candidates("aa"), (std::vector<std::string>{"a a", "@a"}));
  EXPECT_TRUE(char_bug_candidates("x").empty());
}

TEST(CharBugs, NeverSelfAndBounded) {
  for (std::string w : {"abc", "zzz", "hello", "sees", "a1", "typewriter"}) {
    const auto c = char_bug_candidates(w);
    EXPECT_LE(c.size(), 4 + w.size());
    for (const auto& x : c) EXPECT_NE(x, w);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) EXPECT_NE(c[i], c[j]);
  }
}

TEST(Provider, CapsAtKmax) {
  SynonymLexicon lex;
  const std::vector<std::string> good = {"fine", "great"};
  lex.add("good", good);
  Vocab v;
  const auto seq = TokenSeq::from_words({"good"}, v);
  EXPECT_EQ(make_provider(AttackKind::kLexicon, lex)(seq, 0, 10), good);
  EXPECT_EQ(make_provider(AttackKind::kCharBug, lex)(seq, 0, 10),
            char_bug_candidates("good"));
  const auto both = make_provider(AttackKind::kBoth, lex)(seq, 0, 3);
  EXPECT_EQ(both, (std::vector<std::string>{"fine", "great", "go od"}));
}

// One-dimensional linear model: e(good)=1, e(fine)=-3, e(movie)=0 and head
// (+1, -1). "good movie" scores class 0; "fine movie" flips it.
struct GoodMovie {
  Vocab vocab;
  LayeredClassifier model;
  SynonymLexicon lexicon;

  GoodMovie() {
    vocab.add("good");
    vocab.add("fine");
    vocab.add("movie");
    model.embedding.values = Eigen::MatrixXd::Zero(5, 1);
    model.embedding.values(vocab.lookup("good"), 0) = 1.0;
    model.embedding.values(vocab.lookup("fine"), 0) = -3.0;
    model.layers.push_back({Eigen::MatrixXd::Identity(1, 1),
                            Eigen::VectorXd::Zero(1), Activation::kIdentity});
    model.head_weight = Eigen::MatrixXd(2, 1);
    model.head_weight << 1.0, -1.0;
    model.head_bias = Eigen::VectorXd::Zero(2);
    const std::vector<std::string> fine = {"fine"};
    lexicon.add("good", fine);
  }
};

TEST(Greedy, GoodMovieFlipsInFourQueries) {
  GoodMovie g;
  const auto seq = TokenSeq::from_words({"good", "movie"}, g.vocab);
  // brute force confirms the flip
  ASSERT_EQ(predict(g.model, seq.ids), 0);
  ASSERT_EQ(predict(g.model, seq.with_word(0, "fine", g.vocab).ids), 1);
  auto oracle = base_oracle(g.model);
  const auto r = greedy_attack(oracle, seq, 0, AttackBudget{50, 0.5},
                               make_provider(AttackKind::kLexicon, g.lexicon),
                               Ablation::kUnk, g.vocab);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.queries_used, 4u);
  EXPECT_EQ(r.q_max, 100u);
  EXPECT_EQ(r.adversarial.words, (std::vector<std::string>{"fine", "movie"}));
  EXPECT_EQ(r.perturbed_indices, (std::vector<std::size_t>{0}));
  EXPECT_EQ(r.orig_label, 0);
  EXPECT_EQ(r.final_label, 1);
}

TEST(Greedy, EmptyLexiconUsesOnlyProfileQueries) {
  GoodMovie g;
  const SynonymLexicon empty;
  const auto seq = TokenSeq::from_words({"good", "movie", "good"}, g.vocab);
  auto oracle = base_oracle(g.model);
  const auto r = greedy_attack(oracle, seq, std::nullopt, AttackBudget{50, 0.3},
                               make_provider(AttackKind::kLexicon, empty),
                               Ablation::kUnk, g.vocab);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.queries_used, seq.size() + 1);
  EXPECT_TRUE(r.perturbed_indices.empty());
}

TEST(Greedy, SkipsMisclassified) {
  GoodMovie g;
  const auto seq = TokenSeq::from_words({"good", "movie"}, g.vocab);
  auto oracle = base_oracle(g.model);
  const auto r = greedy_attack(oracle, seq, 1, AttackBudget{50, 0.5},
                               make_provider(AttackKind::kLexicon, g.lexicon),
                               Ablation::kUnk, g.vocab);
  EXPECT_TRUE(r.skipped);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.queries_used, 1u);
}

// Ten "good" words need several substitutions; rho_max = 0.1 allows one.
TEST(Greedy, PerturbationCapHolds) {
  GoodMovie g;
  g.model.embedding.values(g.vocab.lookup("fine"), 0) = 0.5;
  std::vector<std::string> words(10, "good");
  const auto seq = TokenSeq::from_words(words, g.vocab);
  auto oracle = base_oracle(g.model);
  const auto r = greedy_attack(oracle, seq, std::nullopt, AttackBudget{50, 0.1},
                               make_provider(AttackKind::kLexicon, g.lexicon),
                               Ablation::kUnk, g.vocab);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.perturbed_indices.size(), 1u);
  EXPECT_EQ(r.queries_used, 1u + 10u + 1u);
}

TEST(Greedy, BudgetExhaustionEndsQuietly) {
  GoodMovie g;
  g.model.embedding.values(g.vocab.lookup("fine"), 0) = 0.5;
  std::vector<std::string> words(4, "good");
  const auto seq = TokenSeq::from_words(words, g.vocab);
  auto oracle = base_oracle(g.model);
  // Q_max = 1 * 4: the profile alone needs 5 queries.
  const auto r = greedy_attack(oracle, seq, std::nullopt, AttackBudget{1, 1.0},
                               make_provider(AttackKind::kLexicon, g.lexicon),
                               Ablation::kUnk, g.vocab);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.queries_used, r.q_max);
  EXPECT_EQ(r.q_max, 4u);
}

TEST(Greedy, CommitsOnlyStrictImprovements) {
  GoodMovie g;
  // "fine" equals "good": no candidate lowers the logit.
  g.model.embedding.values(g.vocab.lookup("fine"), 0) = 1.0;
  const auto seq = TokenSeq::from_words({"good", "good"}, g.vocab);
  auto oracle = base_oracle(g.model);
  const auto r = greedy_attack(oracle, seq, std::nullopt, AttackBudget{50, 1.0},
                               make_provider(AttackKind::kLexicon, g.lexicon),
                               Ablation::kUnk, g.vocab);
  EXPECT_TRUE(r.perturbed_indices.empty());
  EXPECT_EQ(r.adversarial, seq);
  EXPECT_EQ(r.queries_used, 1u + 2u + 2u);
}

TEST(Verify, DeterministicSuccessAlwaysHolds) {
  GoodMovie g;
  const auto seq = TokenSeq::from_words({"good", "movie"}, g.vocab);
  auto oracle = base_oracle(g.model);
  const auto r = greedy_attack(oracle, seq, 0, AttackBudget{50, 0.5},
                               make_provider(AttackKind::kLexicon, g.lexicon),
                               Ablation::kUnk, g.vocab);
  ASSERT_TRUE(r.success);
  Rng rng(1);
  EXPECT_EQ(verify_adversarial(DefendedModel(g.model, NoiseSpec{}), r, rng, 20), 1.0);
  EXPECT_EQ(verify_adversarial(DefendedModel(g.model, NoiseSpec{0.0, {0}, 0}), r,
                               rng, 20),
            1.0);
  const double noisy =
      verify_adversarial(DefendedModel(g.model, NoiseSpec{4.0, {0}, 0}), r, rng, 50);
  EXPECT_GE(noisy, 0.0);
  EXPECT_LE(noisy, 1.0);
  EXPECT_THROW(verify_adversarial(DefendedModel(g.model, NoiseSpec{}), r, rng, 0),
               ConfigError);
}

TEST(Names, RoundTrip) {
  for (auto k : {AttackKind::kLexicon, AttackKind::kCharBug, AttackKind::kBoth})
    EXPECT_EQ(parse_attack_kind(attack_kind_name(k)), k);
  for (auto a : {Ablation::kUnk, Ablation::kDelete})
    EXPECT_EQ(parse_ablation(ablation_name(a)), a);
  EXPECT_THROW(parse_attack_kind("bogus"), ConfigError);
  EXPECT_THROW(parse_ablation("bogus"), ConfigError);
}

}  // namespace
}  // namespace advfool
