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
#ifndef ADVFOOL_DEFENSE_H_
#define ADVFOOL_DEFENSE_H_

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "advfool/classifier.h"
#include "advfool/corpus.h"
#include "advfool/noise.h"
#include "advfool/parallel.h"
#include "advfool/rng.h"

namespace advfool {

inline constexpr double kDefaultCalibrationDelta = 0.01;

// Inference-time latent randomization around a fixed classifier. Every
// query draws fresh noise; there is no ensembling and no caching.
class DefendedModel {
 public:
  DefendedModel(const LayeredClassifier& model, NoiseSpec noise);

  const LayeredClassifier& model() const { return *model_; }
  const NoiseSpec& noise() const { return noise_; }

  Eigen::VectorXd query(std::span<const int> ids, Rng& rng) const;

 private:
  const LayeredClassifier* model_;
  NoiseSpec noise_;
};

Eigen::VectorXd defended_query(const DefendedModel& defended,
                               const TokenSeq& tokens, Rng& rng);

// Single stochastic pass per example; example i draws from
// derive_seed(seed, "clean", i). Null noise means the base model.
double clean_accuracy(const LayeredClassifier& model,
                      const LabeledCorpus& corpus, const NoiseSpec* noise,
                      std::uint64_t seed, Exec exec = Exec::kParallel);

struct GridPoint {
  double value = 0.0;
  double accuracy = 0.0;
};

struct Calibration {
  double chosen = 0.0;  // nu* (or rate*)
  double base_accuracy = 0.0;
  std::vector<GridPoint> grid;
};

// Largest grid nu whose stochastic clean accuracy stays within `delta` of the
// noiseless accuracy. The grid must be ascending and start at 0.
Calibration calibrate_nu(const LayeredClassifier& model,
                         const LabeledCorpus& heldout,
                         const std::vector<int>& layer_set, double delta,
                         const std::vector<double>& nu_grid,
                         std::uint64_t seed, Exec exec = Exec::kParallel);

enum class RandomizerKind { kMask, kSynonymSwap };

// Input-space randomization used as a baseline against latent noise.
struct InputRandomizer {
  RandomizerKind kind = RandomizerKind::kMask;
  double rate = 0.0;
  const SynonymLexicon* lexicon = nullptr;  // synonym swap only
};

// Mask: each word independently becomes UNK with probability `rate`.
// Synonym swap: each word with a lexicon entry is replaced, with probability
// `rate`, by a uniformly drawn candidate. Length is preserved.
TokenSeq randomize_input(const TokenSeq& tokens, const InputRandomizer& r,
                         const Vocab& vocab, Rng& rng);

double randomized_input_accuracy(const LayeredClassifier& model,
                                 const Vocab& vocab,
                                 const LabeledCorpus& corpus,
                                 const InputRandomizer& r, std::uint64_t seed,
                                 Exec exec = Exec::kParallel);

// Same contract as calibrate_nu, scanning randomizer rates instead.
Calibration calibrate_rate(const LayeredClassifier& model, const Vocab& vocab,
                           const LabeledCorpus& heldout,
                           InputRandomizer randomizer, double delta,
                           const std::vector<double>& rate_grid,
                           std::uint64_t seed, Exec exec = Exec::kParallel);

using Perturber = std::variant<NoiseSpec, InputRandomizer>;

// CE(randomized logits, label) - CE(base logits, label) for one draw.
double loss_change_sample(const LayeredClassifier& model, const Vocab& vocab,
                          const Example& example, const Perturber& perturber,
                          Rng& rng);

}  // namespace advfool

#endif  // ADVFOOL_DEFENSE_H_
