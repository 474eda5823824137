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
#ifndef ADVFOOL_ATTACK_H_
#define ADVFOOL_ATTACK_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "advfool/corpus.h"
#include "advfool/defense.h"
#include "advfool/rng.h"

namespace advfool {

// The attacker's only view of the victim: text in, logits out. Every call is
// counted; calls past the budget throw BudgetExhausted.
class QueryOracle {
 public:
  using Fn = std::function<Eigen::VectorXd(const TokenSeq&)>;

  explicit QueryOracle(Fn fn, std::size_t budget = SIZE_MAX);

  Eigen::VectorXd query(const TokenSeq& tokens);

  std::size_t queries_used() const { return used_; }
  std::size_t budget() const { return budget_; }
  std::size_t remaining() const { return budget_ - used_; }
  // Only legal before the first query.
  void set_budget(std::size_t budget);

 private:
  Fn fn_;
  std::size_t budget_;
  std::size_t used_ = 0;
};

// Oracle backed by a (possibly defended) classifier. The oracle owns an rng
// seeded with `seed` and consumes it across queries.
QueryOracle::Fn make_victim(const DefendedModel& defended, std::uint64_t seed);

struct AttackBudget {
  int k_max = 50;
  double rho_max = 0.3;

  std::size_t q_max(std::size_t length) const;
  // ceil(rho_max * length).
  std::size_t max_perturbed(std::size_t length) const;
  void validate() const;
};

enum class Ablation { kUnk, kDelete };

struct ImportanceProfile {
  std::vector<double> scores;
  std::vector<std::size_t> ranking;  // descending score, ties by index
};

// I_i = f_y(x) - f_y(x without word i). Issues one query for x (skipped when
// `base_logits` is supplied) and one per word.
ImportanceProfile importance_profile(
    QueryOracle& oracle, const TokenSeq& tokens, int y, Ablation ablation,
    const Vocab& vocab,
    const std::optional<Eigen::VectorXd>& base_logits = std::nullopt);

std::vector<std::size_t> rank_scores(const std::vector<double>& scores);

std::vector<std::string> lexicon_candidates(std::string_view word,
                                            const SynonymLexicon& lexicon,
                                            int k_max);

// Space split at the middle, interior deletions, one adjacent swap nearest
// the middle and one look-alike substitution (o->0 l->1 a->@ e->3 s->5).
// Never returns the word itself.
std::vector<std::string> char_bug_candidates(std::string_view word);

enum class AttackKind { kLexicon, kCharBug, kBoth };

// Candidate generator for position `index` of the working sequence.
using CandidateProvider =
    std::function<std::vector<std::string>(const TokenSeq&, std::size_t, int)>;

CandidateProvider make_provider(AttackKind kind, const SynonymLexicon& lexicon);

struct AttackResult {
  bool success = false;
  bool skipped = false;  // originally misclassified vs ground truth
  TokenSeq adversarial;
  std::size_t queries_used = 0;
  std::size_t q_max = 0;
  std::vector<std::size_t> perturbed_indices;
  int orig_label = -1;
  int final_label = -1;
  Eigen::VectorXd final_logits;
};

// Importance-ranked greedy word substitution. `oracle` must be fresh; its
// budget is set to K_max * L.
AttackResult greedy_attack(QueryOracle& oracle, const TokenSeq& tokens,
                           std::optional<int> ground_truth,
                           const AttackBudget& budget,
                           const CandidateProvider& provider, Ablation ablation,
                           const Vocab& vocab);

// Fraction of n_redraws fresh queries of the adversarial text that still
// disagree with the original label.
double verify_adversarial(const DefendedModel& defended,
                          const AttackResult& result, Rng& rng, int n_redraws);

std::string_view attack_kind_name(AttackKind kind);
AttackKind parse_attack_kind(std::string_view name);
std::string_view ablation_name(Ablation ablation);
Ablation parse_ablation(std::string_view name);

}  // namespace advfool

#endif  // ADVFOOL_ATTACK_H_
