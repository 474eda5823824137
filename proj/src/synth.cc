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
#include <numeric>
#include <stdexcept>

#include "advfool/corpus.h"
#include "advfool/errors.h"
#include "advfool/rng.h"

namespace advfool {
namespace {

std::string keyword_name(int cls, std::size_t j) {
  return "kw" + std::to_string(cls) + "x" + std::to_string(j);
}

std::string filler_name(std::size_t j) { return "w" + std::to_string(j); }

}  // namespace

SynthData synth_corpus(std::uint64_t seed, std::size_t n,
                       std::size_t vocab_size, int num_classes,
                       const SynthShape& shape) {
  if (num_classes < 2) throw ConfigError("synth_corpus needs >= 2 classes");
  const auto classes = static_cast<std::size_t>(num_classes);
  if (vocab_size < 4 * classes) {
    throw ConfigError("synth_corpus needs vocab_size >= 4 * num_classes");
  }
  if (n == 0) throw ConfigError("synth_corpus needs n >= 1");
  if (shape.min_keywords < 1 || shape.min_keywords > shape.max_keywords ||
      shape.min_length > shape.max_length ||
      shape.max_keywords + shape.max_distractors > shape.min_length ||
      (shape.max_distractors > 0 && shape.min_keywords < 2)) {
    throw ConfigError("synth_corpus: inconsistent shape");
  }

  const std::size_t per_class = std::max<std::size_t>(2, vocab_size / (4 * classes));
  const std::size_t fillers = vocab_size - per_class * classes;

  SynthData data;
  std::vector<std::vector<std::string>> keywords(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t j = 0; j < per_class; ++j) {
      keywords[c].push_back(keyword_name(static_cast<int>(c), j));
      data.vocab.add(keywords[c].back());
    }
  }
  std::vector<std::string> filler_words;
  for (std::size_t j = 0; j < fillers; ++j) {
    filler_words.push_back(filler_name(j));
    data.vocab.add(filler_words.back());
  }

  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t j = 0; j < per_class; ++j) {
      const std::vector<std::string> cands = {
          keywords[c][(j + 1) % per_class],
          keywords[(c + 1) % classes][j]};
      data.lexicon.add(keywords[c][j], cands);
    }
  }
  for (std::size_t j = 0; j < fillers; ++j) {
    std::vector<std::string> cands;
    for (std::size_t k = 1; k <= shape.filler_synonyms; ++k) {
      // alternate forward and backward neighbours
      const std::size_t step = (k + 1) / 2;
      cands.push_back(k % 2 ? filler_words[(j + step) % fillers]
                            : filler_words[(j + fillers - step % fillers) % fillers]);
    }
    data.lexicon.add(filler_words[j], cands);
  }

  Rng rng(derive_seed(seed, "synth_corpus"));
  std::uniform_int_distribution<int> pick_label(0, num_classes - 1);
  std::uniform_int_distribution<std::size_t> pick_len(shape.min_length,
                                                      shape.max_length);
  std::uniform_int_distribution<std::size_t> pick_count(shape.min_keywords,
                                                        shape.max_keywords);
  std::uniform_int_distribution<std::size_t> pick_kw(0, per_class - 1);
  std::uniform_int_distribution<std::size_t> pick_filler(0, fillers - 1);

  data.corpus.num_classes = num_classes;
  data.corpus.examples.reserve(n);
  for (std::size_t e = 0; e < n; ++e) {
    const int label = pick_label(rng);
    const std::size_t len = pick_len(rng);
    const std::size_t count = pick_count(rng);
    std::size_t distract = 0;
    if (shape.max_distractors > 0) {
      std::uniform_int_distribution<std::size_t> pick_d(
          0, std::min(shape.max_distractors, count - 1));
      distract = pick_d(rng);
    }
    int other = label;
    if (distract > 0) {
      std::uniform_int_distribution<int> pick_other(1, num_classes - 1);
      other = (label + pick_other(rng)) % num_classes;
    }
    std::vector<std::size_t> slots(len);
    std::iota(slots.begin(), slots.end(), 0);
    // Partial Fisher-Yates: the first `count` slots hold own keywords, the
    // next `distract` hold keywords of `other`.
    for (std::size_t i = 0; i < count + distract; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, len - 1);
      std::swap(slots[i], slots[pick(rng)]);
    }
    std::vector<std::string> words(len);
    for (std::size_t i = 0; i < len; ++i) {
      if (i < count) {
        words[slots[i]] = keywords[static_cast<std::size_t>(label)][pick_kw(rng)];
      } else if (i < count + distract) {
        words[slots[i]] = keywords[static_cast<std::size_t>(other)][pick_kw(rng)];
      } else {
        words[slots[i]] = filler_words[pick_filler(rng)];
      }
    }
    data.corpus.examples.push_back(
        {TokenSeq::from_words(std::move(words), data.vocab), label});
  }
  return data;
}

}  // namespace advfool
