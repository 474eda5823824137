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
#include "advfool/evaluate.h"

#include <algorithm>
#include <numeric>

#include "advfool/errors.h"

namespace advfool {

std::vector<std::size_t> sample_indices(std::size_t population,
                                        std::size_t n_samples,
                                        std::uint64_t seed) {
  if (n_samples > population) {
    throw ConfigError("requested " + std::to_string(n_samples) +
                      " samples from a set of " + std::to_string(population));
  }
  std::vector<std::size_t> all(population);
  std::iota(all.begin(), all.end(), 0);
  Rng rng = make_rng(seed, "subset");
  // Partial Fisher-Yates keeps the draw independent of the population tail.
  for (std::size_t i = 0; i < n_samples; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, population - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(n_samples);
  return all;
}

std::vector<AttackRun> run_attacks(const LayeredClassifier& model,
                                   const Vocab& vocab,
                                   const SynonymLexicon& lexicon,
                                   const NoiseSpec* noise,
                                   const AttackConfig& attack,
                                   const LabeledCorpus& eval_set,
                                   const std::vector<std::size_t>& indices,
                                   std::uint64_t seed, Exec exec) {
  const DefendedModel defended(model, noise ? *noise : NoiseSpec{});
  const CandidateProvider provider = make_provider(attack.kind, lexicon);
  std::vector<AttackRun> runs(indices.size());
  for_each_index(exec, indices.size(), [&](std::size_t k) {
    const std::size_t idx = indices[k];
    const Example& ex = eval_set.examples.at(idx);
    QueryOracle oracle(make_victim(defended, derive_seed(seed, "attack", idx)));
    AttackRun& run = runs[k];
    run.example_index = idx;
    run.result = greedy_attack(oracle, ex.tokens, ex.label, attack.budget,
                               provider, attack.ablation, vocab);
    if (run.result.success && attack.verify_redraws > 0) {
      Rng rng = make_rng(seed, "verify", idx);
      run.reverify_rate =
          verify_adversarial(defended, run.result, rng, attack.verify_redraws);
    }
  });
  return runs;
}

EvalReport evaluate(const LayeredClassifier& model, const Vocab& vocab,
                    const SynonymLexicon& lexicon, const NoiseSpec* noise,
                    const AttackConfig& attack, const LabeledCorpus& eval_set,
                    std::size_t n_samples, std::uint64_t seed, Exec exec) {
  attack.budget.validate();
  if (noise) noise->validate(model.num_layers());
  const auto indices = sample_indices(eval_set.size(), n_samples, seed);

  EvalReport report;
  report.noise = noise ? *noise : NoiseSpec{};
  report.attack = attack;
  report.seed = seed;
  report.n_eval = n_samples;
  report.clean_acc =
      clean_accuracy(model, eval_set, noise, derive_seed(seed, "clean"), exec);

  const auto runs = run_attacks(model, vocab, lexicon, noise, attack, eval_set,
                                indices, seed, exec);
  double query_sum = 0.0;
  double success_query_sum = 0.0;
  double reverify_sum = 0.0;
  for (const auto& run : runs) {
    const auto& r = run.result;
    const std::size_t length = r.adversarial.size();
    const std::size_t original_length =
        eval_set.examples[run.example_index].tokens.size();
    if (r.queries_used > r.q_max ||
        r.perturbed_indices.size() > attack.budget.max_perturbed(original_length) ||
        length != original_length) {
      ++report.budget_violations;
    }
    if (r.skipped) continue;
    ++report.n_originally_correct;
    query_sum += static_cast<double>(r.queries_used);
    if (r.success) {
      ++report.n_flips;
      success_query_sum += static_cast<double>(r.queries_used);
      reverify_sum += run.reverify_rate;
    }
  }
  const auto n_eval = static_cast<double>(report.n_eval);
  const auto n_correct = static_cast<double>(report.n_originally_correct);
  const auto n_flips = static_cast<double>(report.n_flips);
  if (report.n_eval > 0) {
    report.clean_subset_acc = n_correct / n_eval;
    report.aua = (n_correct - n_flips) / n_eval;
  }
  if (report.n_originally_correct > 0) {
    report.asr = n_flips / n_correct;
    report.avg_queries = query_sum / n_correct;
  }
  if (report.n_flips > 0) {
    report.avg_queries_success = success_query_sum / n_flips;
    report.reverify_rate = reverify_sum / n_flips;
  }
  return report;
}

}  // namespace advfool
