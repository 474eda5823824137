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
#include "advfool/config.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "advfool/errors.h"
#include "advfool/numfmt.h"

namespace advfool {
namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> parts;
  if (trim(s).empty()) return parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(',', start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_int(std::string_view key, std::string_view text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("key '" + std::string(key) + "': expected an integer, got '" +
                      std::string(text) + "'");
  }
  return v;
}

double parse_real(std::string_view key, std::string_view text) {
  auto v = parse_double(text);
  if (!v) {
    throw ConfigError("key '" + std::string(key) + "': expected a number, got '" +
                      std::string(text) + "'");
  }
  return *v;
}

// 0 then 1e-4 * 1.2^k up to 10, four significant digits.
std::string default_nu_grid() {
  std::string out = "0";
  char buf[32];
  for (double v = 1e-4; v <= 10.0; v *= 1.2) {
    std::snprintf(buf, sizeof buf, ",%.4g", v);
    out += buf;
  }
  return out;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>&
ExperimentConfig::defaults() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      // data
      {"dataset", "synth"},
      {"synth_seed", "1"},
      {"synth_n", "2000"},
      {"synth_vocab", "200"},
      {"synth_classes", "2"},
      {"synth_min_len", "10"},
      {"synth_max_len", "20"},
      {"synth_min_keywords", "4"},
      {"synth_max_keywords", "8"},
      {"synth_distractors", "0"},
      {"synth_filler_synonyms", "6"},
      {"train_fraction", "0.75"},
      {"train_data", ""},
      {"test_data", ""},
      {"lexicon", ""},
      {"embeddings", ""},
      // model
      {"train", "auto"},
      {"checkpoint", ""},
      {"embed_dim", "16"},
      {"hidden", "16,16"},
      {"activation", "relu"},
      {"epochs", "30"},
      {"batch_size", "32"},
      {"learning_rate", "0.5"},
      {"init_scale", "1"},
      // defense
      {"nu", ""},
      {"layers", "all"},
      {"calibrate_delta", "0.01"},
      {"nu_grid", default_nu_grid()},
      // attack
      {"attack", "lexicon"},
      {"kmax", "50"},
      {"rho_max", "0.3"},
      {"ablation", "unk"},
      {"samples", "200"},
      {"verify_redraws", "20"},
      // analyses
      {"theorem_example", "0"},
      {"theorem_layer", "head"},
      {"theorem_draws", "100000"},
      {"loss_examples", "500"},
      {"loss_draws", "10"},
      {"rate_grid",
       "0,0.0025,0.005,0.0075,0.01,0.015,0.02,0.03,0.05,0.075,0.1,0.15,0.2,"
       "0.3,0.5"},
      {"shift_inputs", "100"},
      {"nu_list", ""},
      {"excess_factor", "10"},
      {"exec", "parallel"},
      {"seed", "1"},
  };
  return table;
}

ExperimentConfig::ExperimentConfig() {
  for (const auto& [k, v] : defaults()) {
    values_[k] = v;
    explicit_[k] = false;
  }
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const auto key = trim(view.substr(0, eq));
    if (cfg.is_set(key)) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + std::string(key) + "'");
    }
    try {
      cfg.set(key, trim(view.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
  it->second = std::string(value);
  explicit_[std::string(key)] = true;
}

bool ExperimentConfig::is_set(std::string_view key) const {
  auto it = explicit_.find(key);
  return it != explicit_.end() && it->second;
}

const std::string& ExperimentConfig::str(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
  return it->second;
}

double ExperimentConfig::real(std::string_view key) const {
  return parse_real(key, str(key));
}

std::int64_t ExperimentConfig::integer(std::string_view key) const {
  return parse_int<std::int64_t>(key, str(key));
}

std::uint64_t ExperimentConfig::u64(std::string_view key) const {
  return parse_int<std::uint64_t>(key, str(key));
}

bool ExperimentConfig::flag(std::string_view key) const {
  const auto& v = str(key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("key '" + std::string(key) + "': expected true/false");
}

std::vector<double> ExperimentConfig::reals(std::string_view key) const {
  std::vector<double> out;
  for (auto part : split_commas(str(key))) out.push_back(parse_real(key, part));
  return out;
}

std::vector<int> ExperimentConfig::integers(std::string_view key) const {
  std::vector<int> out;
  for (auto part : split_commas(str(key))) out.push_back(parse_int<int>(key, part));
  return out;
}

void ExperimentConfig::validate() const {
  const auto& train = str("train");
  const bool has_checkpoint = !str("checkpoint").empty();
  if (train != "auto" && train != "true" && train != "false") {
    throw ConfigError("train must be auto, true or false");
  }
  if (train == "true" && has_checkpoint) {
    throw ConfigError("config names both train and checkpoint model sources");
  }
  if (train == "false" && !has_checkpoint) {
    throw ConfigError("config names no model source");
  }
  const auto& dataset = str("dataset");
  if (dataset != "synth" && dataset != "tsv") {
    throw ConfigError("dataset must be synth or tsv");
  }
  if (dataset == "tsv" && (str("train_data").empty() || str("test_data").empty())) {
    throw ConfigError("tsv dataset needs train_data and test_data");
  }
  if (str("exec") != "parallel" && str("exec") != "serial") {
    throw ConfigError("exec must be parallel or serial");
  }
  // Typed keys must parse.
  for (const char* k : {"synth_n", "synth_vocab", "synth_classes",
                        "synth_min_len", "synth_max_len", "synth_min_keywords",
                        "synth_max_keywords", "synth_distractors",
                        "synth_filler_synonyms", "embed_dim",
                        "epochs", "batch_size", "kmax", "samples",
                        "verify_redraws", "theorem_example", "theorem_draws",
                        "loss_examples", "loss_draws", "shift_inputs"}) {
    if (integer(k) < 0) throw ConfigError(std::string(k) + " must be >= 0");
  }
  for (const char* k : {"train_fraction", "learning_rate", "init_scale",
                        "calibrate_delta", "rho_max", "excess_factor"}) {
    (void)real(k);
  }
  (void)u64("seed");
  (void)u64("synth_seed");
  (void)reals("nu_grid");
  (void)reals("rate_grid");
  (void)reals("nu_list");
  (void)integers("hidden");
  if (!str("nu").empty()) (void)real("nu");
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace advfool
