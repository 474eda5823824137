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
#ifndef ADVFOOL_RNG_H_
#define ADVFOOL_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace advfool {

using Rng = std::mt19937_64;

// Child seed for (master, purpose, index). Every stochastic quantity in the
// library is drawn from a stream seeded this way, so results do not depend on
// execution order or thread count.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t master, std::string_view tag,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(master, tag, index));
}

// 64-bit FNV-1a, also used to name report files after their config.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace advfool

#endif  // ADVFOOL_RNG_H_
