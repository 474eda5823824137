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
#include "advfool/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "advfool/errors.h"
#include "advfool/numfmt.h"

namespace advfool {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n\f\v";
  std::size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

Vocab::Vocab() {
  add(kPadToken);
  add(kUnkToken);
}

int Vocab::add(std::string_view token) {
  auto it = index_.find(std::string(token));
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.emplace_back(token);
  index_.emplace(tokens_.back(), id);
  return id;
}

int Vocab::lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnkId : it->second;
}

bool Vocab::contains(std::string_view token) const {
  return index_.count(std::string(token)) != 0;
}

const std::string& Vocab::token(int id) const {
  return tokens_.at(static_cast<std::size_t>(id));
}

std::vector<int> Vocab::encode(std::span<const std::string> words) const {
  std::vector<int> ids;
  ids.reserve(words.size());
  for (const auto& w : words) ids.push_back(lookup(w));
  return ids;
}

std::string TokenSeq::text() const {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

TokenSeq TokenSeq::from_words(std::vector<std::string> words,
                              const Vocab& vocab) {
  TokenSeq seq;
  seq.ids = vocab.encode(words);
  seq.words = std::move(words);
  return seq;
}

TokenSeq TokenSeq::with_word(std::size_t index, std::string word,
                             const Vocab& vocab) const {
  TokenSeq seq = *this;
  seq.ids.at(index) = vocab.lookup(word);
  seq.words.at(index) = std::move(word);
  return seq;
}

TokenSeq TokenSeq::without_word(std::size_t index) const {
  TokenSeq seq = *this;
  seq.words.erase(seq.words.begin() + static_cast<std::ptrdiff_t>(index));
  seq.ids.erase(seq.ids.begin() + static_cast<std::ptrdiff_t>(index));
  return seq;
}

LabeledCorpus parse_dataset(std::istream& in, const Vocab& vocab,
                            std::optional<int> num_classes) {
  LabeledCorpus corpus;
  std::string line;
  std::size_t lineno = 0;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(lineno, "missing tab");
    std::string_view label_text(line.data(), tab);
    int label = 0;
    auto [ptr, ec] = std::from_chars(label_text.data(),
                                     label_text.data() + label_text.size(),
                                     label);
    if (ec != std::errc() || ptr != label_text.data() + label_text.size() ||
        label_text.empty() || label < 0) {
      throw ParseError(lineno, "bad label '" + std::string(label_text) + "'");
    }
    if (num_classes && label >= *num_classes) {
      throw LabelRange(lineno, label, *num_classes);
    }
    std::vector<std::string> words;
    try {
      words = tokenize_words(std::string_view(line).substr(tab + 1));
    } catch (const EmptyInput&) {
      throw ParseError(lineno, "empty text");
    }
    corpus.examples.push_back(
        {TokenSeq::from_words(std::move(words), vocab), label});
    max_label = std::max(max_label, label);
  }
  if (corpus.examples.empty()) throw ParseError(lineno, "no examples");
  corpus.num_classes = num_classes ? *num_classes : max_label + 1;
  return corpus;
}

LabeledCorpus load_dataset(const std::filesystem::path& path,
                           const Vocab& vocab, std::optional<int> num_classes) {
  auto in = open_input(path);
  return parse_dataset(in, vocab, num_classes);
}

void write_dataset(std::ostream& out, const LabeledCorpus& corpus) {
  for (const auto& ex : corpus.examples) {
    out << ex.label << '\t' << ex.tokens.text() << '\n';
  }
}

void save_dataset(const std::filesystem::path& path,
                  const LabeledCorpus& corpus) {
  auto out = open_output(path);
  write_dataset(out, corpus);
}

void reencode(LabeledCorpus& corpus, const Vocab& vocab) {
  for (auto& ex : corpus.examples) ex.tokens.ids = vocab.encode(ex.tokens.words);
}

Vocab build_vocab(const LabeledCorpus& corpus, const SynonymLexicon* lexicon) {
  Vocab vocab;
  for (const auto& ex : corpus.examples) {
    for (const auto& w : ex.tokens.words) vocab.add(w);
  }
  if (lexicon) {
    for (const auto& [word, cands] : lexicon->entries()) {
      vocab.add(word);
      for (const auto& c : cands) vocab.add(c);
    }
  }
  return vocab;
}

void SynonymLexicon::add(std::string_view word,
                         std::span<const std::string> candidates) {
  std::vector<std::string> fresh;
  auto it = entries_.find(word);
  const std::vector<std::string>* existing =
      it == entries_.end() ? nullptr : &it->second;
  for (const auto& c : candidates) {
    if (c.empty() || c == word) continue;
    if (std::find(fresh.begin(), fresh.end(), c) != fresh.end()) continue;
    if (existing &&
        std::find(existing->begin(), existing->end(), c) != existing->end()) {
      continue;
    }
    fresh.push_back(c);
  }
  if (fresh.empty()) return;
  auto& slot = entries_[std::string(word)];
  slot.insert(slot.end(), fresh.begin(), fresh.end());
}

const std::vector<std::string>* SynonymLexicon::find(
    std::string_view word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

SynonymLexicon parse_synonyms(std::istream& in) {
  SynonymLexicon lexicon;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(lineno, "missing tab");
    std::string word(trim(std::string_view(line).substr(0, tab)));
    if (word.empty()) throw ParseError(lineno, "empty headword");
    std::vector<std::string> cands;
    for (const auto& part : split(std::string_view(line).substr(tab + 1), ',')) {
      auto t = trim(part);
      if (!t.empty()) cands.emplace_back(t);
    }
    lexicon.add(word, cands);
  }
  return lexicon;
}

SynonymLexicon load_synonyms(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_synonyms(in);
}

void write_synonyms(std::ostream& out, const SynonymLexicon& lexicon) {
  for (const auto& [word, cands] : lexicon.entries()) {
    out << word << '\t';
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (i) out << ',';
      out << cands[i];
    }
    out << '\n';
  }
}

void save_synonyms(const std::filesystem::path& path,
                   const SynonymLexicon& lexicon) {
  auto out = open_output(path);
  write_synonyms(out, lexicon);
}

LoadedEmbeddings parse_embeddings(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  std::istringstream header(line);
  long rows = -1, dim = -1;
  if (!(header >> rows >> dim) || rows < 0 || dim <= 0) {
    throw ParseError(1, "header must be 'V d'");
  }
  std::vector<std::string> tokens;
  std::vector<double> values;
  tokens.reserve(static_cast<std::size_t>(rows));
  values.reserve(static_cast<std::size_t>(rows * dim));
  for (long r = 0; r < rows; ++r) {
    ++lineno;
    if (!std::getline(in, line)) throw ParseError(lineno, "missing row");
    strip_cr(line);
    auto fields = split(line, ' ');
    fields.erase(std::remove(fields.begin(), fields.end(), std::string()),
                 fields.end());
    if (fields.size() != static_cast<std::size_t>(dim) + 1) {
      throw ParseError(lineno, "expected token and " + std::to_string(dim) +
                                   " values");
    }
    tokens.push_back(fields[0]);
    for (long c = 0; c < dim; ++c) {
      auto v = parse_double(fields[static_cast<std::size_t>(c) + 1]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(lineno, "bad value '" + fields[c + 1] + "'");
      }
      values.push_back(*v);
    }
  }
  LoadedEmbeddings out;
  std::vector<long> row_of_id;
  row_of_id.push_back(-1);  // PAD
  row_of_id.push_back(-1);  // UNK
  for (long r = 0; r < rows; ++r) {
    const auto before = out.vocab.size();
    const int id = out.vocab.add(tokens[static_cast<std::size_t>(r)]);
    if (out.vocab.size() == before && id > kUnkId) {
      throw ParseError(static_cast<std::size_t>(r) + 2,
                       "duplicate token " + tokens[r]);
    }
    if (static_cast<std::size_t>(id) < row_of_id.size()) {
      row_of_id[static_cast<std::size_t>(id)] = r;
    } else {
      row_of_id.push_back(r);
    }
  }
  out.table.values = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(out.vocab.size()), dim);
  for (std::size_t id = 0; id < row_of_id.size(); ++id) {
    const long r = row_of_id[id];
    if (r < 0) continue;
    for (long c = 0; c < dim; ++c) {
      out.table.values(static_cast<Eigen::Index>(id), c) =
          values[static_cast<std::size_t>(r * dim + c)];
    }
  }
  return out;
}

LoadedEmbeddings load_embeddings(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_embeddings(in);
}

void write_embeddings(std::ostream& out, const Vocab& vocab,
                      const EmbeddingTable& table) {
  if (static_cast<std::size_t>(table.rows()) != vocab.size()) {
    throw Error("embedding rows do not match vocab size");
  }
  out << table.rows() << ' ' << table.dim() << '\n';
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    out << vocab.token(static_cast<int>(r));
    for (Eigen::Index c = 0; c < table.dim(); ++c) {
      out << ' ' << format_double(table.values(r, c));
    }
    out << '\n';
  }
}

std::pair<LabeledCorpus, LabeledCorpus> split_corpus(
    const LabeledCorpus& corpus, double train_fraction) {
  const auto n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(corpus.size())));
  LabeledCorpus train{{}, corpus.num_classes};
  LabeledCorpus test{{}, corpus.num_classes};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (i < n_train ? train : test).examples.push_back(corpus.examples[i]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace advfool
