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
// Serial reference vs OpenMP path for the data-parallel kernels.
#include <numeric>

#include <benchmark/benchmark.h>

#include "advfool/analysis.h"
#include "advfool/config.h"
#include "advfool/defense.h"
#include "advfool/evaluate.h"
#include "advfool/experiment.h"

namespace {

using advfool::Exec;

const advfool::Workspace& ws() {
  static const advfool::Workspace w = advfool::prepare_workspace(advfool::ExperimentConfig());
  return w;
}

Exec exec_arg(const benchmark::State& state) {
  return state.range(0) ? Exec::kParallel : Exec::kSerial;
}

void BM_CleanAccuracy(benchmark::State& state) {
  const advfool::NoiseSpec noise{0.01, {0, 1}, 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        advfool::clean_accuracy(*ws().model, ws().test, &noise, 1, exec_arg(state)));
  }
}
BENCHMARK(BM_CleanAccuracy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RunAttacks(benchmark::State& state) {
  advfool::AttackConfig attack;
  attack.budget = {10, 0.3};
  attack.verify_redraws = 5;
  const advfool::NoiseSpec noise{0.01, {0, 1}, 0};
  const auto idx = advfool::sample_indices(ws().test.size(), 100, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(advfool::run_attacks(*ws().model, ws().vocab,
                                                  ws().lexicon, &noise, attack,
                                                  ws().test, idx, 1, exec_arg(state)));
  }
}
BENCHMARK(BM_RunAttacks)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_TheoremCheck(benchmark::State& state) {
  const auto& ex = ws().test.examples[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(advfool::theorem1_check(
        *ws().model, ws().vocab, ex.tokens, 0, ex.label, 0.01,
        ws().model->num_layers(), 20000, 1, exec_arg(state)));
  }
}
BENCHMARK(BM_TheoremCheck)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LossChange(benchmark::State& state) {
  const std::vector<advfool::NamedPerturber> perturbers = {
      {"latent", advfool::NoiseSpec{0.01, {0, 1}, 0}},
      {"mask", advfool::InputRandomizer{advfool::RandomizerKind::kMask, 0.05}}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(advfool::loss_change_report(
        *ws().model, ws().vocab, ws().test, perturbers, 4, 1,
        advfool::default_loss_bin_edges(), exec_arg(state)));
  }
}
BENCHMARK(BM_LossChange)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  ws();  // train outside the timed region
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
