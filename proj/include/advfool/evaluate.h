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
#ifndef ADVFOOL_EVALUATE_H_
#define ADVFOOL_EVALUATE_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "advfool/attack.h"
#include "advfool/classifier.h"
#include "advfool/corpus.h"
#include "advfool/defense.h"
#include "advfool/parallel.h"

namespace advfool {

struct AttackConfig {
  AttackKind kind = AttackKind::kLexicon;
  AttackBudget budget;
  Ablation ablation = Ablation::kUnk;
  int verify_redraws = 20;
};

// Metrics for one (model, defense, attack) triple.
//   asr = flips / n_originally_correct
//   aua = (n_originally_correct - flips) / n_eval
struct EvalReport {
  double clean_acc = 0.0;         // full eval set, one stochastic pass
  double clean_subset_acc = 0.0;  // n_originally_correct / n_eval
  double aua = 0.0;
  double asr = 0.0;
  double avg_queries = 0.0;  // over attacked examples
  double avg_queries_success = 0.0;
  double reverify_rate = 0.0;  // mean verify_adversarial over successes
  std::size_t n_eval = 0;
  std::size_t n_originally_correct = 0;
  std::size_t n_flips = 0;
  std::size_t budget_violations = 0;
  // Echo.
  NoiseSpec noise;
  AttackConfig attack;
  std::uint64_t seed = 0;
};

// Clean accuracy over the whole `eval_set`; robustness over `n_samples`
// examples drawn without replacement. Examples the (defended) model gets
// wrong on the attack's first query count against AuA but are not attacked.
// Throws ConfigError if n_samples exceeds the set.
EvalReport evaluate(const LayeredClassifier& model, const Vocab& vocab,
                    const SynonymLexicon& lexicon, const NoiseSpec* noise,
                    const AttackConfig& attack, const LabeledCorpus& eval_set,
                    std::size_t n_samples, std::uint64_t seed,
                    Exec exec = Exec::kParallel);

// The seeded subset evaluate() attacks, in visiting order.
std::vector<std::size_t> sample_indices(std::size_t population,
                                        std::size_t n_samples,
                                        std::uint64_t seed);

struct AttackRun {
  std::size_t example_index = 0;
  AttackResult result;
  double reverify_rate = 0.0;
};

// Per-example attack runs behind evaluate(), exposed for tests and
// benchmarks. Run i uses derive_seed(seed, "attack", example index).
std::vector<AttackRun> run_attacks(const LayeredClassifier& model,
                                   const Vocab& vocab,
                                   const SynonymLexicon& lexicon,
                                   const NoiseSpec* noise,
                                   const AttackConfig& attack,
                                   const LabeledCorpus& eval_set,
                                   const std::vector<std::size_t>& indices,
                                   std::uint64_t seed, Exec exec);

}  // namespace advfool

#endif  // ADVFOOL_EVALUATE_H_
