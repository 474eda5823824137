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
#ifndef ADVFOOL_CLASSIFIER_H_
#define ADVFOOL_CLASSIFIER_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "advfool/corpus.h"
#include "advfool/noise.h"
#include "advfool/rng.h"

namespace advfool {

enum class Activation { kRelu, kIdentity };

struct DenseLayer {
  Eigen::MatrixXd weight;  // d_out x d_in
  Eigen::VectorXd bias;    // d_out
  Activation activation = Activation::kRelu;
};

// Mean-pooled embedding -> dense layers h_1..h_L -> linear head g.
struct LayeredClassifier {
  EmbeddingTable embedding;
  std::vector<DenseLayer> layers;
  Eigen::MatrixXd head_weight;  // |C| x d_L
  Eigen::VectorXd head_bias;    // |C|

  int num_layers() const { return static_cast<int>(layers.size()); }
  int num_classes() const { return static_cast<int>(head_bias.size()); }
  Eigen::Index width(int index) const;  // dimension of z_index

  // Throws ModelShape on an inconsistent dimension chain or non-finite
  // parameters.
  void validate() const;
};

bool bitwise_equal(const LayeredClassifier& a, const LayeredClassifier& b);

// z[0] is the pooled embedding, z[l] the output of layer l.
struct HiddenTrace {
  std::vector<Eigen::VectorXd> z;
  Eigen::VectorXd logits;
};

// One forward pass. When `noise` is active, a fresh eps ~ N(0, nu I) is
// drawn from `rng` for every index in its layer set and added to that
// layer's input. Throws ModelShape on bad ids and NumericOverflow on
// non-finite activations.
HiddenTrace forward(const LayeredClassifier& model, std::span<const int> ids,
                    const NoiseSpec* noise = nullptr, Rng* rng = nullptr);

// Runs layers index+1..L and the head on `z`. No noise.
Eigen::VectorXd forward_from(const LayeredClassifier& model, int index,
                             const Eigen::VectorXd& z);

Eigen::VectorXd apply_head(const LayeredClassifier& model,
                           const Eigen::VectorXd& z_last);

// Ties go to the lowest index.
int argmax(const Eigen::VectorXd& logits);

int predict(const LayeredClassifier& model, std::span<const int> ids,
            const NoiseSpec* noise = nullptr, Rng* rng = nullptr);

// d logit_y / d z_l, back-propagated through layers l+1..L using the relu
// masks recorded in `trace`.
Eigen::VectorXd head_gradient(const LayeredClassifier& model,
                              const HiddenTrace& trace, int layer, int y);

double cross_entropy(const Eigen::VectorXd& logits, int label);

struct Architecture {
  int embed_dim = 16;
  std::vector<int> hidden_dims = {16, 16};
  Activation hidden_activation = Activation::kRelu;
};

struct TrainConfig {
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 0.5;
  std::uint64_t seed = 1;
  double init_scale = 1.0;
};

// Gaussian init scaled by init_scale / sqrt(fan_in); zero biases. When
// `pretrained` is given its rows seed the embedding table.
LayeredClassifier init_classifier(std::size_t vocab_size, int num_classes,
                                  const Architecture& arch, std::uint64_t seed,
                                  double init_scale,
                                  const EmbeddingTable* pretrained = nullptr);

// Mini-batch SGD on cross-entropy. Deterministic in cfg.seed. Appends the
// mean loss of each epoch to `epoch_losses` when given. Throws
// TrainingDiverged if the loss stops being finite.
LayeredClassifier train(const LabeledCorpus& corpus, std::size_t vocab_size,
                        const Architecture& arch, const TrainConfig& cfg,
                        std::vector<double>* epoch_losses = nullptr,
                        const EmbeddingTable* pretrained = nullptr);

double accuracy(const LayeredClassifier& model, const LabeledCorpus& corpus);

// Versioned text checkpoint holding the vocab and every parameter in
// shortest round-trip decimal form.
struct Checkpoint {
  LayeredClassifier model;
  Vocab vocab;
};

void write_checkpoint(std::ostream& out, const LayeredClassifier& model,
                      const Vocab& vocab);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path,
                     const LayeredClassifier& model, const Vocab& vocab);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace advfool

#endif  // ADVFOOL_CLASSIFIER_H_
