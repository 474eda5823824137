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
#include "advfool/attack.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "advfool/errors.h"

namespace advfool {
namespace {

// Guards ceil(rho * L) against products such as 0.3 * 10 landing one ulp
// above an integer.
constexpr double kCeilSlack = 1e-9;

char look_alike(char c) {
  switch (c) {
    case 'o': return '0';
    case 'l': return '1';
    case 'a': return '@';
    case 'e': return '3';
    case 's': return '5';
    default: return '\0';
  }
}

void push_unique(std::vector<std::string>& out, std::string cand,
                 std::string_view original) {
  if (cand == original) return;
  if (std::find(out.begin(), out.end(), cand) != out.end()) return;
  out.push_back(std::move(cand));
}

}  // namespace

QueryOracle::QueryOracle(Fn fn, std::size_t budget)
    : fn_(std::move(fn)), budget_(budget) {}

Eigen::VectorXd QueryOracle::query(const TokenSeq& tokens) {
  if (used_ >= budget_) throw BudgetExhausted(budget_);
  ++used_;
  return fn_(tokens);
}

void QueryOracle::set_budget(std::size_t budget) {
  if (used_ != 0) throw std::logic_error("oracle budget set after first query");
  budget_ = budget;
}

QueryOracle::Fn make_victim(const DefendedModel& defended, std::uint64_t seed) {
  return [defended, rng = Rng(seed)](const TokenSeq& tokens) mutable {
    return defended.query(tokens.ids, rng);
  };
}

std::size_t AttackBudget::q_max(std::size_t length) const {
  return static_cast<std::size_t>(k_max) * length;
}

std::size_t AttackBudget::max_perturbed(std::size_t length) const {
  return static_cast<std::size_t>(
      std::ceil(rho_max * static_cast<double>(length) - kCeilSlack));
}

void AttackBudget::validate() const {
  if (k_max < 1) throw ConfigError("k_max must be >= 1");
  if (!(rho_max > 0.0 && rho_max <= 1.0)) {
    throw ConfigError("rho_max must lie in (0, 1]");
  }
}

std::vector<std::size_t> rank_scores(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

ImportanceProfile importance_profile(
    QueryOracle& oracle, const TokenSeq& tokens, int y, Ablation ablation,
    const Vocab& vocab, const std::optional<Eigen::VectorXd>& base_logits) {
  if (tokens.size() == 0) throw EmptyInput();
  const double base = base_logits ? (*base_logits)[y] : oracle.query(tokens)[y];
  const bool can_delete = ablation == Ablation::kDelete && tokens.size() > 1;
  ImportanceProfile profile;
  profile.scores.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const TokenSeq ablated =
        can_delete ? tokens.without_word(i)
                   : tokens.with_word(i, std::string(kUnkToken), vocab);
    profile.scores.push_back(base - oracle.query(ablated)[y]);
  }
  profile.ranking = rank_scores(profile.scores);
  return profile;
}

std::vector<std::string> lexicon_candidates(std::string_view word,
                                            const SynonymLexicon& lexicon,
                                            int k_max) {
  const auto* cands = lexicon.find(word);
  if (!cands || k_max <= 0) return {};
  const auto n = std::min(cands->size(), static_cast<std::size_t>(k_max));
  return {cands->begin(), cands->begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<std::string> char_bug_candidates(std::string_view word) {
  if (word.empty()) throw EmptyInput();
  const std::size_t n = word.size();
  std::vector<std::string> out;
  const std::string base(word);

  if (n >= 2) {
    std::string split = base;
    split.insert(n / 2, 1, ' ');
    push_unique(out, std::move(split), word);
  }
  if (n >= 3) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      std::string del = base;
      del.erase(i, 1);
      push_unique(out, std::move(del), word);
    }
  }
  if (n >= 2) {
    // Pair starts ordered by distance from the middle pair.
    const auto mid = static_cast<long>((n - 2) / 2);
    for (long step = 0; step < static_cast<long>(n); ++step) {
      bool found = false;
      for (long i : {mid + step, mid - step}) {
        if (i < 0 || i + 1 >= static_cast<long>(n)) continue;
        const auto at = static_cast<std::size_t>(i);
        if (base[at] == base[at + 1]) continue;
        std::string swapped = base;
        std::swap(swapped[at], swapped[at + 1]);
        push_unique(out, std::move(swapped), word);
        found = true;
        break;
      }
      if (found) break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (char sub = look_alike(base[i])) {
      std::string alike = base;
      alike[i] = sub;
      push_unique(out, std::move(alike), word);
      break;
    }
  }
  return out;
}

CandidateProvider make_provider(AttackKind kind, const SynonymLexicon& lexicon) {
  return [kind, &lexicon](const TokenSeq& seq, std::size_t index, int k_max) {
    const std::string& word = seq.words.at(index);
    std::vector<std::string> out;
    if (kind != AttackKind::kCharBug) {
      out = lexicon_candidates(word, lexicon, k_max);
    }
    if (kind != AttackKind::kLexicon) {
      for (auto& c : char_bug_candidates(word)) push_unique(out, std::move(c), word);
    }
    if (out.size() > static_cast<std::size_t>(k_max)) {
      out.resize(static_cast<std::size_t>(k_max));
    }
    return out;
  };
}

AttackResult greedy_attack(QueryOracle& oracle, const TokenSeq& tokens,
                           std::optional<int> ground_truth,
                           const AttackBudget& budget,
                           const CandidateProvider& provider, Ablation ablation,
                           const Vocab& vocab) {
  if (tokens.size() == 0) throw EmptyInput();
  budget.validate();
  const std::size_t length = tokens.size();
  oracle.set_budget(budget.q_max(length));

  AttackResult result;
  result.q_max = oracle.budget();
  result.adversarial = tokens;
  try {
    const Eigen::VectorXd original = oracle.query(tokens);
    const int y = argmax(original);
    result.orig_label = y;
    result.final_label = y;
    result.final_logits = original;
    if (ground_truth && *ground_truth != y) {
      result.skipped = true;
      result.queries_used = oracle.queries_used();
      return result;
    }

    const ImportanceProfile profile =
        importance_profile(oracle, tokens, y, ablation, vocab, original);
    const std::size_t cap = budget.max_perturbed(length);
    TokenSeq& working = result.adversarial;
    double current = original[y];

    for (std::size_t index : profile.ranking) {
      if (result.perturbed_indices.size() >= cap) break;
      const auto cands = provider(working, index, budget.k_max);
      std::optional<TokenSeq> best;
      Eigen::VectorXd best_logits;
      double best_score = current;
      for (const auto& cand : cands) {
        TokenSeq trial = working.with_word(index, cand, vocab);
        Eigen::VectorXd out = oracle.query(trial);
        if (argmax(out) != y) {
          working = std::move(trial);
          result.perturbed_indices.push_back(index);
          result.success = true;
          result.final_label = argmax(out);
          result.final_logits = std::move(out);
          result.queries_used = oracle.queries_used();
          return result;
        }
        if (out[y] < best_score) {
          best_score = out[y];
          best = std::move(trial);
          best_logits = std::move(out);
        }
      }
      if (best) {
        working = std::move(*best);
        current = best_score;
        result.perturbed_indices.push_back(index);
        result.final_logits = std::move(best_logits);
        result.final_label = argmax(result.final_logits);
      }
    }
  } catch (const BudgetExhausted&) {
    // Falls through with the best state reached so far.
  }
  result.queries_used = oracle.queries_used();
  return result;
}

double verify_adversarial(const DefendedModel& defended,
                          const AttackResult& result, Rng& rng, int n_redraws) {
  if (n_redraws <= 0) throw ConfigError("n_redraws must be positive");
  int still = 0;
  for (int i = 0; i < n_redraws; ++i) {
    if (argmax(defended.query(result.adversarial.ids, rng)) != result.orig_label) {
      ++still;
    }
  }
  return static_cast<double>(still) / static_cast<double>(n_redraws);
}

std::string_view attack_kind_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::kLexicon: return "lexicon";
    case AttackKind::kCharBug: return "charbug";
    case AttackKind::kBoth: return "both";
  }
  return "?";
}

AttackKind parse_attack_kind(std::string_view name) {
  if (name == "lexicon") return AttackKind::kLexicon;
  if (name == "charbug") return AttackKind::kCharBug;
  if (name == "both") return AttackKind::kBoth;
  throw ConfigError("unknown attack '" + std::string(name) + "'");
}

std::string_view ablation_name(Ablation ablation) {
  return ablation == Ablation::kUnk ? "unk" : "delete";
}

Ablation parse_ablation(std::string_view name) {
  if (name == "unk") return Ablation::kUnk;
  if (name == "delete") return Ablation::kDelete;
  throw ConfigError("unknown ablation '" + std::string(name) + "'");
}

}  // namespace advfool
