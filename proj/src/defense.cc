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
#include "advfool/defense.h"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "advfool/errors.h"

namespace advfool {
namespace {

// Accuracies are ratios of counts; absorb the rounding of base - delta.
constexpr double kAccuracySlack = 1e-12;

double ratio(std::size_t hits, std::size_t n) {
  return n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
}

void check_grid(const std::vector<double>& grid, double delta) {
  if (grid.empty()) throw ConfigError("calibration grid is empty");
  if (grid.front() != 0.0) throw ConfigError("calibration grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw ConfigError("calibration grid must be strictly ascending");
    }
  }
  if (!(delta >= 0.0)) throw ConfigError("calibration delta must be >= 0");
}

template <typename AccuracyAt>
Calibration scan_grid(const std::vector<double>& grid, double delta,
                      double base_accuracy, AccuracyAt&& accuracy_at) {
  Calibration out;
  out.base_accuracy = base_accuracy;
  for (double v : grid) {
    const double acc = v == 0.0 ? base_accuracy : accuracy_at(v);
    out.grid.push_back({v, acc});
    if (acc >= base_accuracy - delta - kAccuracySlack) out.chosen = v;
  }
  return out;
}

}  // namespace

bool NoiseSpec::touches(int index) const {
  return std::find(layer_set.begin(), layer_set.end(), index) != layer_set.end();
}

void NoiseSpec::validate(int num_layers) const {
  if (!(nu >= 0.0)) throw ConfigError("nu must be >= 0");
  if (nu > 0.0 && layer_set.empty()) {
    throw ConfigError("noise needs a non-empty layer set");
  }
  for (int l : layer_set) {
    if (l < 0 || l > num_layers) throw LayerIndex(l, num_layers);
  }
}

std::vector<int> parse_layer_set(std::string_view choice, int num_layers) {
  if (num_layers < 1) throw ConfigError("model has no layers");
  if (choice == "all") {
    std::vector<int> all(static_cast<std::size_t>(num_layers));
    for (int l = 0; l < num_layers; ++l) all[static_cast<std::size_t>(l)] = l;
    return all;
  }
  if (choice == "first") return {0};
  if (choice == "middle") return {(num_layers - 1) / 2};
  if (choice == "last") return {num_layers - 1};
  std::vector<int> layers;
  std::size_t start = 0;
  while (start <= choice.size()) {
    std::size_t end = choice.find(',', start);
    if (end == std::string_view::npos) end = choice.size();
    auto part = choice.substr(start, end - start);
    int v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
      throw ConfigError("bad layer choice '" + std::string(choice) + "'");
    }
    if (v < 0 || v > num_layers) throw LayerIndex(v, num_layers);
    if (std::find(layers.begin(), layers.end(), v) == layers.end()) {
      layers.push_back(v);
    }
    start = end + 1;
  }
  std::sort(layers.begin(), layers.end());
  return layers;
}

std::string layer_set_string(const std::vector<int>& layers) {
  std::string out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(layers[i]);
  }
  return out;
}

DefendedModel::DefendedModel(const LayeredClassifier& model, NoiseSpec noise)
    : model_(&model), noise_(std::move(noise)) {
  noise_.validate(model.num_layers());
}

Eigen::VectorXd DefendedModel::query(std::span<const int> ids, Rng& rng) const {
  return forward(*model_, ids, &noise_, &rng).logits;
}

Eigen::VectorXd defended_query(const DefendedModel& defended,
                               const TokenSeq& tokens, Rng& rng) {
  return defended.query(tokens.ids, rng);
}

double clean_accuracy(const LayeredClassifier& model,
                      const LabeledCorpus& corpus, const NoiseSpec* noise,
                      std::uint64_t seed, Exec exec) {
  std::vector<char> hit(corpus.size(), 0);
  for_each_index(exec, corpus.size(), [&](std::size_t i) {
    Rng rng = make_rng(seed, "clean", i);
    const auto& ex = corpus.examples[i];
    hit[i] = predict(model, ex.tokens.ids, noise, &rng) == ex.label;
  });
  return ratio(static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1)),
               corpus.size());
}

Calibration calibrate_nu(const LayeredClassifier& model,
                         const LabeledCorpus& heldout,
                         const std::vector<int>& layer_set, double delta,
                         const std::vector<double>& nu_grid,
                         std::uint64_t seed, Exec exec) {
  check_grid(nu_grid, delta);
  if (heldout.examples.empty()) throw ConfigError("held-out set is empty");
  const double base = clean_accuracy(model, heldout, nullptr, seed, exec);
  return scan_grid(nu_grid, delta, base, [&](double nu) {
    NoiseSpec spec{nu, layer_set, seed};
    spec.validate(model.num_layers());
    return clean_accuracy(model, heldout, &spec, seed, exec);
  });
}

TokenSeq randomize_input(const TokenSeq& tokens, const InputRandomizer& r,
                         const Vocab& vocab, Rng& rng) {
  if (!(r.rate >= 0.0 && r.rate <= 1.0)) {
    throw ConfigError("randomizer rate must lie in [0, 1]");
  }
  TokenSeq out = tokens;
  if (r.rate == 0.0) return out;
  std::bernoulli_distribution coin(r.rate);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (r.kind == RandomizerKind::kMask) {
      if (coin(rng)) {
        out.words[i] = std::string(kUnkToken);
        out.ids[i] = kUnkId;
      }
      continue;
    }
    const auto* cands = r.lexicon ? r.lexicon->find(out.words[i]) : nullptr;
    if (!cands) continue;
    if (!coin(rng)) continue;
    std::uniform_int_distribution<std::size_t> pick(0, cands->size() - 1);
    out.words[i] = (*cands)[pick(rng)];
    out.ids[i] = vocab.lookup(out.words[i]);
  }
  return out;
}

double randomized_input_accuracy(const LayeredClassifier& model,
                                 const Vocab& vocab,
                                 const LabeledCorpus& corpus,
                                 const InputRandomizer& r, std::uint64_t seed,
                                 Exec exec) {
  std::vector<char> hit(corpus.size(), 0);
  for_each_index(exec, corpus.size(), [&](std::size_t i) {
    Rng rng = make_rng(seed, "input-clean", i);
    const auto& ex = corpus.examples[i];
    const TokenSeq noisy = randomize_input(ex.tokens, r, vocab, rng);
    hit[i] = predict(model, noisy.ids) == ex.label;
  });
  return ratio(static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1)),
               corpus.size());
}

Calibration calibrate_rate(const LayeredClassifier& model, const Vocab& vocab,
                           const LabeledCorpus& heldout,
                           InputRandomizer randomizer, double delta,
                           const std::vector<double>& rate_grid,
                           std::uint64_t seed, Exec exec) {
  check_grid(rate_grid, delta);
  if (rate_grid.back() > 1.0) throw ConfigError("rates must lie in [0, 1]");
  if (heldout.examples.empty()) throw ConfigError("held-out set is empty");
  const double base = clean_accuracy(model, heldout, nullptr, seed, exec);
  return scan_grid(rate_grid, delta, base, [&](double rate) {
    randomizer.rate = rate;
    return randomized_input_accuracy(model, vocab, heldout, randomizer, seed,
                                     exec);
  });
}

double loss_change_sample(const LayeredClassifier& model, const Vocab& vocab,
                          const Example& example, const Perturber& perturber,
                          Rng& rng) {
  const auto base = forward(model, example.tokens.ids).logits;
  Eigen::VectorXd randomized;
  if (const auto* noise = std::get_if<NoiseSpec>(&perturber)) {
    randomized = forward(model, example.tokens.ids, noise, &rng).logits;
  } else {
    const auto& r = std::get<InputRandomizer>(perturber);
    randomized =
        forward(model, randomize_input(example.tokens, r, vocab, rng).ids).logits;
  }
  return cross_entropy(randomized, example.label) -
         cross_entropy(base, example.label);
}

}  // namespace advfool
