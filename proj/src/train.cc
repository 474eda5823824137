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
#include <algorithm>
#include <cmath>
#include <numeric>

#include "advfool/classifier.h"
#include "advfool/errors.h"

namespace advfool {
namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, double stddev,
                         Rng& rng) {
  std::normal_distribution<double> gauss(0.0, stddev);
  Eigen::MatrixXd m(rows, cols);
  // Fill row by row so the draw order matches the row-major checkpoint.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = gauss(rng);
  }
  return m;
}

struct Gradients {
  std::vector<Eigen::MatrixXd> weight;
  std::vector<Eigen::VectorXd> bias;
  Eigen::MatrixXd head_weight;
  Eigen::VectorXd head_bias;
  Eigen::MatrixXd embedding;
  std::vector<int> touched_rows;

  explicit Gradients(const LayeredClassifier& m) {
    for (const auto& l : m.layers) {
      weight.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
      bias.push_back(Eigen::VectorXd::Zero(l.bias.size()));
    }
    head_weight = Eigen::MatrixXd::Zero(m.head_weight.rows(), m.head_weight.cols());
    head_bias = Eigen::VectorXd::Zero(m.head_bias.size());
    embedding = Eigen::MatrixXd::Zero(m.embedding.rows(), m.embedding.dim());
  }

  void clear() {
    for (auto& w : weight) w.setZero();
    for (auto& b : bias) b.setZero();
    head_weight.setZero();
    head_bias.setZero();
    for (int r : touched_rows) embedding.row(r).setZero();
    touched_rows.clear();
  }
};

// Accumulates d loss / d params for one example; returns its loss.
double backprop(const LayeredClassifier& model, const Example& ex,
                Gradients& grads) {
  const HiddenTrace trace = forward(model, ex.tokens.ids);
  const double loss = cross_entropy(trace.logits, ex.label);

  Eigen::VectorXd probs = (trace.logits.array() - trace.logits.maxCoeff()).exp();
  probs /= probs.sum();
  Eigen::VectorXd delta = probs;
  delta[ex.label] -= 1.0;

  const int depth = model.num_layers();
  grads.head_weight.noalias() += delta * trace.z.back().transpose();
  grads.head_bias += delta;
  Eigen::VectorXd upstream = model.head_weight.transpose() * delta;
  for (int k = depth; k >= 1; --k) {
    const auto& layer = model.layers[static_cast<std::size_t>(k - 1)];
    const auto& out = trace.z[static_cast<std::size_t>(k)];
    if (layer.activation == Activation::kRelu) {
      for (Eigen::Index i = 0; i < upstream.size(); ++i) {
        if (!(out[i] > 0.0)) upstream[i] = 0.0;
      }
    }
    const auto idx = static_cast<std::size_t>(k - 1);
    grads.weight[idx].noalias() +=
        upstream * trace.z[static_cast<std::size_t>(k - 1)].transpose();
    grads.bias[idx] += upstream;
    upstream = layer.weight.transpose() * upstream;
  }
  const double share = 1.0 / static_cast<double>(ex.tokens.ids.size());
  for (int id : ex.tokens.ids) {
    grads.embedding.row(id) += share * upstream.transpose();
    grads.touched_rows.push_back(id);
  }
  return loss;
}

void apply(LayeredClassifier& model, Gradients& grads, double step) {
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    model.layers[l].weight -= step * grads.weight[l];
    model.layers[l].bias -= step * grads.bias[l];
  }
  model.head_weight -= step * grads.head_weight;
  model.head_bias -= step * grads.head_bias;
  std::sort(grads.touched_rows.begin(), grads.touched_rows.end());
  grads.touched_rows.erase(
      std::unique(grads.touched_rows.begin(), grads.touched_rows.end()),
      grads.touched_rows.end());
  for (int r : grads.touched_rows) {
    model.embedding.values.row(r) -= step * grads.embedding.row(r);
  }
}

}  // namespace

LayeredClassifier init_classifier(std::size_t vocab_size, int num_classes,
                                  const Architecture& arch, std::uint64_t seed,
                                  double init_scale,
                                  const EmbeddingTable* pretrained) {
  if (arch.hidden_dims.empty()) throw ModelShape("need at least one layer");
  if (arch.embed_dim <= 0 || num_classes < 1 || vocab_size < 2) {
    throw ModelShape("bad architecture");
  }
  Rng rng = make_rng(seed, "init");
  LayeredClassifier model;
  const auto rows = static_cast<Eigen::Index>(vocab_size);
  if (pretrained) {
    if (pretrained->rows() != rows || pretrained->dim() != arch.embed_dim) {
      throw ModelShape("pretrained embedding does not match vocab/embed_dim");
    }
    model.embedding = *pretrained;
  } else {
    model.embedding.values = gaussian(rows, arch.embed_dim, init_scale, rng);
    model.embedding.values.row(kPadId).setZero();
  }
  Eigen::Index in = arch.embed_dim;
  for (int width : arch.hidden_dims) {
    if (width <= 0) throw ModelShape("layer width must be positive");
    DenseLayer layer;
    layer.weight = gaussian(width, in, init_scale / std::sqrt(double(in)), rng);
    layer.bias = Eigen::VectorXd::Zero(width);
    layer.activation = arch.hidden_activation;
    model.layers.push_back(std::move(layer));
    in = width;
  }
  model.head_weight =
      gaussian(num_classes, in, init_scale / std::sqrt(double(in)), rng);
  model.head_bias = Eigen::VectorXd::Zero(num_classes);
  model.validate();
  return model;
}

LayeredClassifier train(const LabeledCorpus& corpus, std::size_t vocab_size,
                        const Architecture& arch, const TrainConfig& cfg,
                        std::vector<double>* epoch_losses,
                        const EmbeddingTable* pretrained) {
  if (corpus.examples.empty()) throw ConfigError("cannot train on empty corpus");
  if (cfg.epochs < 0 || cfg.batch_size <= 0 || !(cfg.learning_rate > 0.0) ||
      !(cfg.init_scale > 0.0)) {
    throw ConfigError("train config values must be positive");
  }
  LayeredClassifier model = init_classifier(vocab_size, corpus.num_classes, arch,
                                            cfg.seed, cfg.init_scale, pretrained);
  Rng order_rng = make_rng(cfg.seed, "batch-order");
  std::vector<std::size_t> order(corpus.examples.size());
  std::iota(order.begin(), order.end(), 0);
  Gradients grads(model);
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      grads.clear();
      try {
        for (std::size_t k = start; k < stop; ++k) {
          total += backprop(model, corpus.examples[order[k]], grads);
        }
      } catch (const NumericOverflow& e) {
        throw TrainingDiverged(e.what());
      }
      if (!std::isfinite(total)) {
        throw TrainingDiverged("loss became non-finite in epoch " +
                               std::to_string(epoch + 1));
      }
      apply(model, grads, cfg.learning_rate / static_cast<double>(stop - start));
    }
    if (epoch_losses) {
      epoch_losses->push_back(total / static_cast<double>(order.size()));
    }
  }
  try {
    model.validate();
  } catch (const ModelShape& e) {
    throw TrainingDiverged(e.what());
  }
  return model;
}

}  // namespace advfool
