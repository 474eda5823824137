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
#include "advfool/classifier.h"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "advfool/errors.h"

namespace advfool {
namespace {

Eigen::VectorXd activate(const Eigen::VectorXd& pre, Activation act) {
  if (act == Activation::kIdentity) return pre;
  return pre.cwiseMax(0.0);
}

void add_noise(Eigen::VectorXd& v, double nu, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(nu));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += gauss(rng);
}

void check_finite(const Eigen::VectorXd& v, const char* where) {
  if (!v.allFinite()) {
    throw NumericOverflow(std::string("non-finite activation at ") + where);
  }
}

bool same_bits(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a.data()[i]) !=
        std::bit_cast<std::uint64_t>(b.data()[i])) {
      return false;
    }
  }
  return true;
}

}  // namespace

Eigen::Index LayeredClassifier::width(int index) const {
  if (index < 0 || index > num_layers()) throw LayerIndex(index, num_layers());
  if (index == 0) return embedding.dim();
  return layers[static_cast<std::size_t>(index - 1)].weight.rows();
}

void LayeredClassifier::validate() const {
  if (layers.empty()) throw ModelShape("model needs at least one layer");
  if (embedding.rows() < 2) throw ModelShape("embedding lacks reserved rows");
  if (!embedding.values.allFinite()) throw ModelShape("non-finite embedding");
  Eigen::Index in = embedding.dim();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.weight.cols() != in || layer.bias.size() != layer.weight.rows()) {
      throw ModelShape("layer " + std::to_string(l + 1) +
                       " does not match its input width");
    }
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
      throw ModelShape("non-finite parameters in layer " +
                       std::to_string(l + 1));
    }
    in = layer.weight.rows();
  }
  if (head_weight.cols() != in || head_bias.size() != head_weight.rows() ||
      head_bias.size() < 1) {
    throw ModelShape("head does not match last layer width");
  }
  if (!head_weight.allFinite() || !head_bias.allFinite()) {
    throw ModelShape("non-finite head parameters");
  }
}

bool bitwise_equal(const LayeredClassifier& a, const LayeredClassifier& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].activation != b.layers[l].activation ||
        !same_bits(a.layers[l].weight, b.layers[l].weight) ||
        !same_bits(a.layers[l].bias, b.layers[l].bias)) {
      return false;
    }
  }
  return same_bits(a.embedding.values, b.embedding.values) &&
         same_bits(a.head_weight, b.head_weight) &&
         same_bits(a.head_bias, b.head_bias);
}

HiddenTrace forward(const LayeredClassifier& model, std::span<const int> ids,
                    const NoiseSpec* noise, Rng* rng) {
  if (ids.empty()) throw ModelShape("cannot run on an empty sequence");
  const bool noisy = noise != nullptr && noise->active();
  if (noisy && rng == nullptr) {
    throw std::invalid_argument("noisy forward needs an rng");
  }
  const int depth = model.num_layers();
  if (noisy) noise->validate(depth);

  HiddenTrace trace;
  trace.z.reserve(static_cast<std::size_t>(depth) + 1);
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(model.embedding.dim());
  for (int id : ids) {
    if (id < 0 || id >= model.embedding.rows()) {
      throw ModelShape("token id " + std::to_string(id) + " outside embedding");
    }
    pooled += model.embedding.values.row(id).transpose();
  }
  pooled /= static_cast<double>(ids.size());
  trace.z.push_back(std::move(pooled));

  for (int l = 0; l < depth; ++l) {
    const auto& layer = model.layers[static_cast<std::size_t>(l)];
    if (layer.weight.cols() != trace.z.back().size()) {
      throw ModelShape("layer " + std::to_string(l + 1) + " width mismatch");
    }
    Eigen::VectorXd input = trace.z.back();
    if (noisy && noise->touches(l)) add_noise(input, noise->nu, *rng);
    Eigen::VectorXd out =
        activate(layer.weight * input + layer.bias, layer.activation);
    check_finite(out, "hidden layer");
    trace.z.push_back(std::move(out));
  }

  Eigen::VectorXd head_in = trace.z.back();
  if (noisy && noise->touches(depth)) add_noise(head_in, noise->nu, *rng);
  trace.logits = apply_head(model, head_in);
  check_finite(trace.logits, "logits");
  return trace;
}

Eigen::VectorXd apply_head(const LayeredClassifier& model,
                           const Eigen::VectorXd& z_last) {
  if (model.head_weight.cols() != z_last.size()) {
    throw ModelShape("head width mismatch");
  }
  return model.head_weight * z_last + model.head_bias;
}

Eigen::VectorXd forward_from(const LayeredClassifier& model, int index,
                             const Eigen::VectorXd& z) {
  if (index < 0 || index > model.num_layers()) {
    throw LayerIndex(index, model.num_layers());
  }
  Eigen::VectorXd cur = z;
  for (int l = index; l < model.num_layers(); ++l) {
    const auto& layer = model.layers[static_cast<std::size_t>(l)];
    cur = activate(layer.weight * cur + layer.bias, layer.activation);
  }
  return apply_head(model, cur);
}

int argmax(const Eigen::VectorXd& logits) {
  int best = 0;
  for (Eigen::Index c = 1; c < logits.size(); ++c) {
    if (logits[c] > logits[best]) best = static_cast<int>(c);
  }
  return best;
}

int predict(const LayeredClassifier& model, std::span<const int> ids,
            const NoiseSpec* noise, Rng* rng) {
  return argmax(forward(model, ids, noise, rng).logits);
}

Eigen::VectorXd head_gradient(const LayeredClassifier& model,
                              const HiddenTrace& trace, int layer, int y) {
  const int depth = model.num_layers();
  if (layer < 0 || layer > depth) throw LayerIndex(layer, depth);
  if (y < 0 || y >= model.num_classes()) {
    throw ModelShape("class " + std::to_string(y) + " outside head");
  }
  if (static_cast<int>(trace.z.size()) != depth + 1) {
    throw ModelShape("trace does not belong to this model");
  }
  Eigen::VectorXd grad = model.head_weight.row(y).transpose();
  for (int k = depth; k > layer; --k) {
    const auto& dense = model.layers[static_cast<std::size_t>(k - 1)];
    if (dense.activation == Activation::kRelu) {
      const auto& out = trace.z[static_cast<std::size_t>(k)];
      for (Eigen::Index i = 0; i < grad.size(); ++i) {
        if (!(out[i] > 0.0)) grad[i] = 0.0;
      }
    }
    grad = dense.weight.transpose() * grad;
  }
  return grad;
}

double cross_entropy(const Eigen::VectorXd& logits, int label) {
  const double peak = logits.maxCoeff();
  const double log_sum = peak + std::log((logits.array() - peak).exp().sum());
  return log_sum - logits[label];
}

double accuracy(const LayeredClassifier& model, const LabeledCorpus& corpus) {
  if (corpus.examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& ex : corpus.examples) {
    if (predict(model, ex.tokens.ids) == ex.label) ++correct;
  }
  return static_cast<double>(correct) /
         static_cast<double>(corpus.examples.size());
}

}  // namespace advfool
