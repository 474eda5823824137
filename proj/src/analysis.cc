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
#include "advfool/analysis.h"

#include <algorithm>
#include <cmath>

#include "advfool/errors.h"

namespace advfool {
namespace {

constexpr std::size_t kMinTheoremDraws = 1000;

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

}  // namespace

SampleStats summarize(const std::vector<double>& samples) {
  SampleStats s;
  double m2 = 0.0;
  for (double x : samples) {
    ++s.n;
    const double before = s.mean;
    s.mean += (x - before) / static_cast<double>(s.n);
    m2 += (x - before) * (x - s.mean);
  }
  if (s.n < 2) return s;
  s.variance = m2 / static_cast<double>(s.n - 1);
  double m3 = 0.0, m4 = 0.0;
  for (double x : samples) {
    const double d = x - s.mean;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double pop_var = m2 / static_cast<double>(s.n);
  if (pop_var > 0.0) {
    const double n = static_cast<double>(s.n);
    s.skewness = (m3 / n) / std::pow(pop_var, 1.5);
    s.excess_kurtosis = (m4 / n) / (pop_var * pop_var) - 3.0;
  }
  return s;
}

double ks_distance_normal(std::vector<double> samples, double mean,
                          double variance) {
  if (samples.empty() || !(variance > 0.0)) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double sd = std::sqrt(variance);
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = normal_cdf(samples[i], mean, sd);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

double ks_critical_99(std::size_t n) {
  return 1.6276 / std::sqrt(static_cast<double>(n));
}

TheoremCheck theorem1_check(const LayeredClassifier& model, const Vocab& vocab,
                            const TokenSeq& tokens, std::size_t word_index,
                            int y, double nu, int layer, std::size_t n_draws,
                            std::uint64_t seed, Exec exec) {
  if (layer < 0 || layer > model.num_layers()) {
    throw LayerIndex(layer, model.num_layers());
  }
  if (n_draws < kMinTheoremDraws) {
    throw ConfigError("theorem check needs at least 1000 draws");
  }
  if (word_index >= tokens.size()) throw ConfigError("word index out of range");
  if (y < 0 || y >= model.num_classes()) throw ConfigError("label out of range");

  const TokenSeq ablated =
      tokens.with_word(word_index, std::string(kUnkToken), vocab);
  const HiddenTrace trace_x = forward(model, tokens.ids);
  const HiddenTrace trace_w = forward(model, ablated.ids);

  TheoremCheck check;
  check.word_index = word_index;
  check.label = y;
  check.layer = layer;
  check.nu = nu;
  check.base_score = trace_x.logits[y] - trace_w.logits[y];
  check.grad_norm_x = head_gradient(model, trace_x, layer, y).norm();
  check.grad_norm_ablated = head_gradient(model, trace_w, layer, y).norm();
  check.predicted_unsquared_var = nu * (check.grad_norm_x + check.grad_norm_ablated);
  check.predicted_firstorder_var =
      nu * (check.grad_norm_x * check.grad_norm_x +
            check.grad_norm_ablated * check.grad_norm_ablated);

  const NoiseSpec noise{nu, {layer}, seed};
  noise.validate(model.num_layers());
  std::vector<double> samples(n_draws);
  for_each_index(exec, n_draws, [&](std::size_t d) {
    Rng rng = make_rng(seed, "theorem", d);
    const double fx = forward(model, tokens.ids, &noise, &rng).logits[y];
    const double fw = forward(model, ablated.ids, &noise, &rng).logits[y];
    samples[d] = fx - fw;
  });

  check.stats = summarize(samples);
  check.std_error =
      std::sqrt(check.stats.variance / static_cast<double>(check.stats.n));
  check.ks_statistic =
      ks_distance_normal(samples, check.stats.mean, check.stats.variance);
  check.ks_critical = ks_critical_99(n_draws);
  check.ks_pass = check.ks_statistic < check.ks_critical;
  check.mean_within_3se =
      std::abs(check.stats.mean - check.base_score) <= 3.0 * check.std_error;
  return check;
}

ImportanceShift importance_shift(const LayeredClassifier& model,
                                 const Vocab& vocab, const TokenSeq& tokens,
                                 int y, const NoiseSpec& noise,
                                 std::uint64_t seed) {
  if (tokens.size() < 2) throw ConfigError("importance shift needs >= 2 words");
  const DefendedModel base(model, NoiseSpec{});
  const DefendedModel defended(model, noise);
  QueryOracle base_oracle(make_victim(base, seed));
  QueryOracle noisy_oracle(make_victim(defended, derive_seed(seed, "shift")));
  ImportanceShift shift;
  shift.base = importance_profile(base_oracle, tokens, y, Ablation::kUnk, vocab);
  shift.randomized =
      importance_profile(noisy_oracle, tokens, y, Ablation::kUnk, vocab);
  shift.argmax_changed = shift.base.ranking.front() != shift.randomized.ranking.front();
  return shift;
}

ShiftSummary importance_shift_rate(const LayeredClassifier& model,
                                   const Vocab& vocab,
                                   const LabeledCorpus& corpus,
                                   const std::vector<std::size_t>& indices,
                                   const NoiseSpec& noise, std::uint64_t seed,
                                   Exec exec) {
  std::vector<signed char> changed(indices.size(), -1);
  for_each_index(exec, indices.size(), [&](std::size_t k) {
    const auto& tokens = corpus.examples.at(indices[k]).tokens;
    if (tokens.size() < 2) return;
    const int y = predict(model, tokens.ids);
    changed[k] = importance_shift(model, vocab, tokens, y, noise,
                                  derive_seed(seed, "shift-input", indices[k]))
                     .argmax_changed;
  });
  ShiftSummary summary;
  for (signed char c : changed) {
    if (c < 0) continue;
    ++summary.n_inputs;
    summary.n_changed += static_cast<std::size_t>(c);
  }
  if (summary.n_inputs > 0) {
    summary.fraction = static_cast<double>(summary.n_changed) /
                       static_cast<double>(summary.n_inputs);
  }
  return summary;
}

std::vector<double> default_loss_bin_edges() {
  std::vector<double> edges;
  for (int k = -20; k <= 20; ++k) edges.push_back(0.25 * k);
  return edges;
}

std::vector<LossChangeStats> loss_change_report(
    const LayeredClassifier& model, const Vocab& vocab,
    const LabeledCorpus& corpus, const std::vector<NamedPerturber>& perturbers,
    std::size_t draws_per_example, std::uint64_t seed,
    const std::vector<double>& bin_edges, Exec exec) {
  if (!std::is_sorted(bin_edges.begin(), bin_edges.end())) {
    throw ConfigError("histogram edges must be ascending");
  }
  std::vector<LossChangeStats> out;
  for (std::size_t p = 0; p < perturbers.size(); ++p) {
    const auto& named = perturbers[p];
    const std::uint64_t stream = derive_seed(seed, "loss-change", p);
    std::vector<double> samples(corpus.size() * draws_per_example);
    for_each_index(exec, corpus.size(), [&](std::size_t i) {
      Rng rng = make_rng(stream, "example", i);
      for (std::size_t d = 0; d < draws_per_example; ++d) {
        samples[i * draws_per_example + d] = loss_change_sample(
            model, vocab, corpus.examples[i], named.perturber, rng);
      }
    });
    LossChangeStats stats;
    stats.name = named.name;
    stats.stats = summarize(samples);
    stats.bin_edges = bin_edges;
    stats.counts.assign(bin_edges.size() + 1, 0);
    for (double x : samples) {
      const auto bin = std::upper_bound(bin_edges.begin(), bin_edges.end(), x) -
                       bin_edges.begin();
      ++stats.counts[static_cast<std::size_t>(bin)];
    }
    out.push_back(std::move(stats));
  }
  return out;
}

std::vector<LayerAblationRow> layer_ablation(
    const LayeredClassifier& model, const Vocab& vocab,
    const SynonymLexicon& lexicon, const LabeledCorpus& eval_set,
    const AttackConfig& attack, const std::vector<LayerChoice>& choices,
    std::size_t n_samples, std::uint64_t seed, Exec exec) {
  std::vector<LayerAblationRow> rows;
  for (const auto& choice : choices) {
    const NoiseSpec noise{choice.nu, choice.layer_set, seed};
    rows.push_back({choice, evaluate(model, vocab, lexicon, &noise, attack,
                                     eval_set, n_samples, seed, exec)});
  }
  return rows;
}

std::vector<SweepPoint> nu_sweep(const LayeredClassifier& model,
                                 const Vocab& vocab,
                                 const SynonymLexicon& lexicon,
                                 const LabeledCorpus& eval_set,
                                 const AttackConfig& attack,
                                 const std::vector<int>& layer_set,
                                 const std::vector<double>& nu_list,
                                 std::size_t n_samples, std::uint64_t seed,
                                 Exec exec) {
  if (!std::is_sorted(nu_list.begin(), nu_list.end()) ||
      std::find(nu_list.begin(), nu_list.end(), 0.0) == nu_list.end()) {
    throw ConfigError("nu list must be ascending and include 0");
  }
  std::vector<SweepPoint> points;
  for (double nu : nu_list) {
    const NoiseSpec noise{nu, layer_set, seed};
    SweepPoint pt;
    pt.nu = nu;
    pt.report = evaluate(model, vocab, lexicon, &noise, attack, eval_set,
                         n_samples, seed, exec);
    pt.clean_acc = pt.report.clean_acc;
    pt.aua = pt.report.aua;
    pt.asr = pt.report.asr;
    pt.avg_queries = pt.report.avg_queries;
    points.push_back(std::move(pt));
  }
  return points;
}

}  // namespace advfool
