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
#ifndef ADVFOOL_PARALLEL_H_
#define ADVFOOL_PARALLEL_H_

#include <cstddef>
#include <exception>

namespace advfool {

// Execution policy for the data-parallel kernels. kSerial is the reference
// path; kParallel must produce bit-identical results because every index
// owns its own rng stream and reductions run serially over per-index output.
enum class Exec { kSerial, kParallel };

template <typename Fn>
void for_each_index(Exec exec, std::size_t n, Fn&& fn) {
  if (exec == Exec::kSerial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(advfool_for_each_index)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace advfool

#endif  // ADVFOOL_PARALLEL_H_
