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
#ifndef ADVFOOL_NOISE_H_
#define ADVFOOL_NOISE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace advfool {

// Latent noise parameters. Index l perturbs the input of hidden layer l+1, so
// 0 is the pooled embedding output. Index L (one past the last hidden layer)
// perturbs the head input.
struct NoiseSpec {
  double nu = 0.0;  // per-coordinate variance
  std::vector<int> layer_set;
  std::uint64_t seed = 0;

  bool active() const { return nu > 0.0; }
  bool touches(int index) const;
  // Throws ConfigError unless nu >= 0, indices lie in [0, num_layers] and
  // the set is non-empty whenever nu > 0.
  void validate(int num_layers) const;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

// Named layer choices over hidden-layer inputs {0, ..., L-1}:
// first = {0}, middle = {(L-1)/2}, last = {L-1}, all = every index.
// Also accepts an explicit comma list such as "0,2".
std::vector<int> parse_layer_set(std::string_view choice, int num_layers);
std::string layer_set_string(const std::vector<int>& layers);

}  // namespace advfool

#endif  // ADVFOOL_NOISE_H_
