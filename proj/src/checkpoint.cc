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
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "advfool/classifier.h"
#include "advfool/errors.h"
#include "advfool/numfmt.h"

namespace advfool {
namespace {

constexpr std::string_view kMagic = "advfool-checkpoint";
constexpr int kVersion = 1;

void write_row(std::ostream& out, const double* data, Eigen::Index n,
               Eigen::Index stride) {
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i) out << ' ';
    out << format_double(data[i * stride]);
  }
  out << '\n';
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    write_row(out, m.data() + r, m.cols(), m.rows());
  }
}

const char* activation_name(Activation a) {
  return a == Activation::kRelu ? "relu" : "identity";
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::istringstream next() {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError(line_ + 1, "truncated checkpoint");
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return std::istringstream(line);
  }

  std::string next_raw() {
    std::string line;
    if (!std::getline(in_, line)) throw ParseError(line_ + 1, "truncated checkpoint");
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  // Expects "<keyword> n..." and returns the integers.
  std::vector<long> header(std::string_view keyword, std::size_t count) {
    auto ss = next();
    std::string word;
    ss >> word;
    if (word != keyword) fail("expected '" + std::string(keyword) + "'");
    std::vector<long> values(count);
    for (auto& v : values) {
      if (!(ss >> v) || v < 0) fail("bad dimensions after " + word);
    }
    return values;
  }

  Eigen::VectorXd row(Eigen::Index n) {
    auto ss = next();
    Eigen::VectorXd v(n);
    std::string tok;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(ss >> tok)) fail("row too short");
      auto d = parse_double(tok);
      if (!d) fail("bad number '" + tok + "'");
      v[i] = *d;
    }
    if (ss >> tok) fail("row too long");
    return v;
  }

  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = row(cols).transpose();
    return m;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(line_, what);
  }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

}  // namespace

void write_checkpoint(std::ostream& out, const LayeredClassifier& model,
                      const Vocab& vocab) {
  model.validate();
  if (static_cast<std::size_t>(model.embedding.rows()) != vocab.size()) {
    throw ModelShape("vocab size does not match embedding rows");
  }
  out << kMagic << ' ' << kVersion << '\n';
  out << "vocab " << vocab.size() << '\n';
  for (const auto& tok : vocab.tokens()) out << tok << '\n';
  out << "embedding " << model.embedding.rows() << ' ' << model.embedding.dim()
      << '\n';
  write_matrix(out, model.embedding.values);
  out << "layers " << model.layers.size() << '\n';
  for (const auto& layer : model.layers) {
    out << "layer " << layer.weight.rows() << ' ' << layer.weight.cols() << ' '
        << activation_name(layer.activation) << '\n';
    write_matrix(out, layer.weight);
    write_row(out, layer.bias.data(), layer.bias.size(), 1);
  }
  out << "head " << model.head_weight.rows() << ' ' << model.head_weight.cols()
      << '\n';
  write_matrix(out, model.head_weight);
  write_row(out, model.head_bias.data(), model.head_bias.size(), 1);
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  Reader reader(in);
  {
    auto ss = reader.next();
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != kMagic) reader.fail("not an advfool checkpoint");
    if (version != kVersion) {
      reader.fail("unsupported checkpoint version " + std::to_string(version));
    }
  }
  Checkpoint cp;
  const long vocab_size = reader.header("vocab", 1)[0];
  std::vector<std::string> tokens;
  for (long i = 0; i < vocab_size; ++i) tokens.push_back(reader.next_raw());
  if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken) {
    reader.fail("vocab must start with reserved tokens");
  }
  for (const auto& t : tokens) cp.vocab.add(t);
  if (static_cast<long>(cp.vocab.size()) != vocab_size) {
    reader.fail("duplicate vocab tokens");
  }
  const auto emb = reader.header("embedding", 2);
  cp.model.embedding.values = reader.matrix(emb[0], emb[1]);
  const long depth = reader.header("layers", 1)[0];
  for (long l = 0; l < depth; ++l) {
    auto ss = reader.next();
    std::string word, act;
    long rows = 0, cols = 0;
    ss >> word >> rows >> cols >> act;
    if (word != "layer" || rows <= 0 || cols <= 0) reader.fail("bad layer header");
    DenseLayer layer;
    if (act == "relu") {
      layer.activation = Activation::kRelu;
    } else if (act == "identity") {
      layer.activation = Activation::kIdentity;
    } else {
      reader.fail("unknown activation '" + act + "'");
    }
    layer.weight = reader.matrix(rows, cols);
    layer.bias = reader.row(rows);
    cp.model.layers.push_back(std::move(layer));
  }
  const auto head = reader.header("head", 2);
  cp.model.head_weight = reader.matrix(head[0], head[1]);
  cp.model.head_bias = reader.row(head[0]);
  if (reader.next_raw() != "end") reader.fail("missing end marker");
  cp.model.validate();
  if (static_cast<std::size_t>(cp.model.embedding.rows()) != cp.vocab.size()) {
    throw ModelShape("vocab size does not match embedding rows");
  }
  return cp;
}

void save_checkpoint(const std::filesystem::path& path,
                     const LayeredClassifier& model, const Vocab& vocab) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_checkpoint(out, model, vocab);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace advfool
