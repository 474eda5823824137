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
#ifndef ADVFOOL_CORPUS_H_
#define ADVFOOL_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace advfool {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";

// Token <-> id map. Ids are dense; PAD=0 and UNK=1 always exist.
class Vocab {
 public:
  Vocab();

  // Returns the id of `token`, inserting it if absent.
  int add(std::string_view token);
  // Unknown tokens map to kUnkId.
  int lookup(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(int id) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<int> encode(std::span<const std::string> words) const;

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// A tokenized sentence: surface words with their parallel vocab ids.
struct TokenSeq {
  std::vector<std::string> words;
  std::vector<int> ids;

  std::size_t size() const { return words.size(); }
  std::string text() const;

  static TokenSeq from_words(std::vector<std::string> words,
                             const Vocab& vocab);
  TokenSeq with_word(std::size_t index, std::string word,
                     const Vocab& vocab) const;
  TokenSeq without_word(std::size_t index) const;

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
};

// Lowercases, splits on whitespace and detaches leading/trailing punctuation
// into one token per character. Internal punctuation ("don't") is kept.
// Throws EmptyInput when nothing but whitespace is given.
std::vector<std::string> tokenize_words(std::string_view text);
TokenSeq tokenize(std::string_view text, const Vocab& vocab);

struct Example {
  TokenSeq tokens;
  int label = 0;

  friend bool operator==(const Example&, const Example&) = default;
};

struct LabeledCorpus {
  std::vector<Example> examples;
  int num_classes = 0;

  std::size_t size() const { return examples.size(); }
  friend bool operator==(const LabeledCorpus&, const LabeledCorpus&) = default;
};

// TSV "label<TAB>text". |C| is max label + 1 unless `num_classes` is given,
// in which case larger labels raise LabelRange.
LabeledCorpus parse_dataset(std::istream& in, const Vocab& vocab,
                            std::optional<int> num_classes = std::nullopt);
LabeledCorpus load_dataset(const std::filesystem::path& path,
                           const Vocab& vocab,
                           std::optional<int> num_classes = std::nullopt);
void write_dataset(std::ostream& out, const LabeledCorpus& corpus);
void save_dataset(const std::filesystem::path& path,
                  const LabeledCorpus& corpus);

// Re-resolves all ids against `vocab`.
void reencode(LabeledCorpus& corpus, const Vocab& vocab);

class SynonymLexicon;

// Vocab over every corpus word, plus lexicon headwords and candidates.
Vocab build_vocab(const LabeledCorpus& corpus,
                  const SynonymLexicon* lexicon = nullptr);

// word -> ordered candidate list. Self-mentions and duplicates are dropped;
// repeated headwords merge in order; empty entries are omitted.
class SynonymLexicon {
 public:
  void add(std::string_view word, std::span<const std::string> candidates);
  // nullptr when the word has no entry.
  const std::vector<std::string>* find(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::vector<std::string>, std::less<>>&
  entries() const {
    return entries_;
  }

  friend bool operator==(const SynonymLexicon&,
                         const SynonymLexicon&) = default;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

SynonymLexicon parse_synonyms(std::istream& in);
SynonymLexicon load_synonyms(const std::filesystem::path& path);
void write_synonyms(std::ostream& out, const SynonymLexicon& lexicon);
void save_synonyms(const std::filesystem::path& path,
                   const SynonymLexicon& lexicon);

// V x d word-embedding matrix; row i belongs to vocab id i.
struct EmbeddingTable {
  Eigen::MatrixXd values;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index dim() const { return values.cols(); }
};

struct LoadedEmbeddings {
  Vocab vocab;
  EmbeddingTable table;
};

// "V d" header then "token v_1 ... v_d" per line. Reserved tokens missing
// from the file are added with zero rows.
LoadedEmbeddings parse_embeddings(std::istream& in);
LoadedEmbeddings load_embeddings(const std::filesystem::path& path);
void write_embeddings(std::ostream& out, const Vocab& vocab,
                      const EmbeddingTable& table);

// Desk-scale keyword classification task.
struct SynthData {
  LabeledCorpus corpus;
  SynonymLexicon lexicon;
  Vocab vocab;
};

struct SynthShape {
  std::size_t min_length = 10;
  std::size_t max_length = 20;
  std::size_t min_keywords = 4;
  std::size_t max_keywords = 8;
  std::size_t max_distractors = 0;  // cross-class keywords, always < own count
  std::size_t filler_synonyms = 6;
};

// Each class owns a disjoint keyword set; every example holds keywords of its
// class among filler words. Keywords map to a same-class and a cross-class
// keyword in the lexicon, fillers to other fillers.
// `vocab_size` counts generated words (PAD/UNK excluded) and must be at
// least 4 * num_classes.
SynthData synth_corpus(std::uint64_t seed, std::size_t n,
                       std::size_t vocab_size, int num_classes,
                       const SynthShape& shape = {});

// Deterministic train/test split: the first `train_fraction` of examples
// (rounded down) train, the rest test.
std::pair<LabeledCorpus, LabeledCorpus> split_corpus(
    const LabeledCorpus& corpus, double train_fraction);

}  // namespace advfool

#endif  // ADVFOOL_CORPUS_H_
