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
#ifndef ADVFOOL_ANALYSIS_H_
#define ADVFOOL_ANALYSIS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "advfool/attack.h"
#include "advfool/classifier.h"
#include "advfool/defense.h"
#include "advfool/evaluate.h"
#include "advfool/parallel.h"

namespace advfool {

// Summary of a sample, accumulated with Welford's update so that a constant
// sample reports its value exactly and zero variance.
struct SampleStats {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

SampleStats summarize(const std::vector<double>& samples);

// Kolmogorov-Smirnov distance between the sample and N(mean, variance).
double ks_distance_normal(std::vector<double> samples, double mean,
                          double variance);
// Asymptotic 99% critical value of the one-sample K-S statistic.
double ks_critical_99(std::size_t n);

// Distribution of the randomized importance score of one word when noise is
// injected at a single layer, next to two variance predictions:
//   unsquared:   nu * (|grad_x| + |grad_ablated|)
//   first order: nu * (|grad_x|^2 + |grad_ablated|^2)
struct TheoremCheck {
  std::size_t word_index = 0;
  int label = 0;
  int layer = 0;
  double nu = 0.0;
  double base_score = 0.0;
  SampleStats stats;
  double std_error = 0.0;
  double grad_norm_x = 0.0;
  double grad_norm_ablated = 0.0;
  double predicted_unsquared_var = 0.0;
  double predicted_firstorder_var = 0.0;
  double ks_statistic = 0.0;
  double ks_critical = 0.0;
  bool ks_pass = false;
  bool mean_within_3se = false;
};

// Draw d uses derive_seed(seed, "theorem", d); the x query and the ablated
// query consume independent noise. n_draws must be at least 1000.
TheoremCheck theorem1_check(const LayeredClassifier& model, const Vocab& vocab,
                            const TokenSeq& tokens, std::size_t word_index,
                            int y, double nu, int layer, std::size_t n_draws,
                            std::uint64_t seed, Exec exec = Exec::kParallel);

struct ImportanceShift {
  ImportanceProfile base;
  ImportanceProfile randomized;
  bool argmax_changed = false;
};

ImportanceShift importance_shift(const LayeredClassifier& model,
                                 const Vocab& vocab, const TokenSeq& tokens,
                                 int y, const NoiseSpec& noise,
                                 std::uint64_t seed);

struct ShiftSummary {
  std::size_t n_inputs = 0;
  std::size_t n_changed = 0;
  double fraction = 0.0;
};

// importance_shift over the given examples (length >= 2 only), using each
// example's noiseless prediction as y.
ShiftSummary importance_shift_rate(const LayeredClassifier& model,
                                   const Vocab& vocab,
                                   const LabeledCorpus& corpus,
                                   const std::vector<std::size_t>& indices,
                                   const NoiseSpec& noise, std::uint64_t seed,
                                   Exec exec = Exec::kParallel);

struct NamedPerturber {
  std::string name;
  Perturber perturber;
};

struct LossChangeStats {
  std::string name;
  SampleStats stats;
  std::vector<double> bin_edges;
  // counts[0] is (-inf, edges[0]); counts[k] is [edges[k-1], edges[k]);
  // the last bin is [edges.back(), +inf).
  std::vector<std::size_t> counts;
};

std::vector<double> default_loss_bin_edges();

std::vector<LossChangeStats> loss_change_report(
    const LayeredClassifier& model, const Vocab& vocab,
    const LabeledCorpus& corpus, const std::vector<NamedPerturber>& perturbers,
    std::size_t draws_per_example, std::uint64_t seed,
    const std::vector<double>& bin_edges = default_loss_bin_edges(),
    Exec exec = Exec::kParallel);

struct LayerChoice {
  std::string name;
  std::vector<int> layer_set;
  double nu = 0.0;
};

struct LayerAblationRow {
  LayerChoice choice;
  EvalReport report;
};

std::vector<LayerAblationRow> layer_ablation(
    const LayeredClassifier& model, const Vocab& vocab,
    const SynonymLexicon& lexicon, const LabeledCorpus& eval_set,
    const AttackConfig& attack, const std::vector<LayerChoice>& choices,
    std::size_t n_samples, std::uint64_t seed, Exec exec = Exec::kParallel);

struct SweepPoint {
  double nu = 0.0;
  double clean_acc = 0.0;
  double aua = 0.0;
  double asr = 0.0;
  double avg_queries = 0.0;
  EvalReport report;
};

// nu_list must be ascending and contain 0.
std::vector<SweepPoint> nu_sweep(const LayeredClassifier& model,
                                 const Vocab& vocab,
                                 const SynonymLexicon& lexicon,
                                 const LabeledCorpus& eval_set,
                                 const AttackConfig& attack,
                                 const std::vector<int>& layer_set,
                                 const std::vector<double>& nu_list,
                                 std::size_t n_samples, std::uint64_t seed,
                                 Exec exec = Exec::kParallel);

}  // namespace advfool

#endif  // ADVFOOL_ANALYSIS_H_
