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
#ifndef ADVFOOL_CONFIG_H_
#define ADVFOOL_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace advfool {

// Line-oriented "key = value" experiment configuration. '#' starts a
// comment. Every key has a default; unknown keys are rejected.
class ExperimentConfig {
 public:
  ExperimentConfig();

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);

  // Throws ConfigError for unknown keys.
  void set(std::string_view key, std::string_view value);
  bool is_set(std::string_view key) const;  // explicitly given (not default)

  const std::string& str(std::string_view key) const;
  double real(std::string_view key) const;
  std::int64_t integer(std::string_view key) const;
  std::uint64_t u64(std::string_view key) const;
  bool flag(std::string_view key) const;
  std::vector<double> reals(std::string_view key) const;
  std::vector<int> integers(std::string_view key) const;

  // Checks cross-key rules such as "train or checkpoint, not both".
  void validate() const;

  // All keys with resolved values, sorted.
  const std::map<std::string, std::string, std::less<>>& values() const {
    return values_;
  }
  // "key = value" lines; hashed to name report files.
  std::string canonical() const;

  static const std::vector<std::pair<std::string, std::string>>& defaults();

 private:
  std::map<std::string, std::string, std::less<>> values_;
  std::map<std::string, bool, std::less<>> explicit_;
};

}  // namespace advfool

#endif  // ADVFOOL_CONFIG_H_
