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
#include <cctype>

#include "advfool/corpus.h"
#include "advfool/errors.h"

namespace advfool {
namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_punct(unsigned char c) { return c < 0x80 && std::ispunct(c) != 0; }

void split_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::size_t begin = 0;
  std::size_t end = chunk.size();
  while (begin < end && is_punct(chunk[begin])) {
    out.emplace_back(1, chunk[begin]);
    ++begin;
  }
  std::size_t trail = end;
  while (trail > begin && is_punct(chunk[trail - 1])) --trail;
  if (trail > begin) out.emplace_back(chunk.substr(begin, trail - begin));
  for (std::size_t i = trail; i < end; ++i) out.emplace_back(1, chunk[i]);
}

}  // namespace

std::vector<std::string> tokenize_words(std::string_view text) {
  std::string lowered(text);
  for (char& c : lowered) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x80) c = static_cast<char>(std::tolower(u));
  }
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < lowered.size()) {
    while (i < lowered.size() && is_space(lowered[i])) ++i;
    std::size_t j = i;
    while (j < lowered.size() && !is_space(lowered[j])) ++j;
    if (j > i) split_chunk(std::string_view(lowered).substr(i, j - i), words);
    i = j;
  }
  if (words.empty()) throw EmptyInput();
  return words;
}

TokenSeq tokenize(std::string_view text, const Vocab& vocab) {
  return TokenSeq::from_words(tokenize_words(text), vocab);
}

}  // namespace advfool
