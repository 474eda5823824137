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
// Command-line front end: one subcommand per experiment.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "advfool/config.h"
#include "advfool/errors.h"
#include "advfool/experiment.h"

namespace {

struct Overrides {
  std::string config_path;
  std::string out_dir = "reports";
  std::optional<std::string> seed;
  std::optional<std::string> samples;
  std::optional<std::string> nu;
  std::optional<std::string> layers;
  std::optional<std::string> calibrate_delta;
  std::optional<std::string> nu_grid;
  std::optional<std::string> attack;
  std::optional<std::string> kmax;
  std::optional<std::string> rho_max;
  std::optional<std::string> ablation;
};

const std::map<std::string, std::string> kHelp = {
    {"synth-data", "write the synthetic train/test/lexicon files"},
    {"train", "train (or load) the classifier and save a checkpoint"},
    {"calibrate", "choose nu on the held-out split and recheck it"},
    {"attack-eval", "attack the undefended and defended model"},
    {"theorem-check", "importance-score distribution under noise at one layer"},
    {"loss-change", "loss change under latent noise vs input randomization"},
    {"importance-shift", "how often noise changes the top-importance word"},
    {"ablate-layers", "robustness for first/middle/last/all noise sites"},
    {"sweep-nu", "clean accuracy and robustness over a range of nu"},
};

void apply(const Overrides& o, advfool::ExperimentConfig& cfg) {
  auto put = [&](const char* key, const std::optional<std::string>& v) {
    if (v) cfg.set(key, *v);
  };
  put("seed", o.seed);
  put("samples", o.samples);
  put("nu", o.nu);
  put("layers", o.layers);
  put("calibrate_delta", o.calibrate_delta);
  put("nu_grid", o.nu_grid);
  put("attack", o.attack);
  put("kmax", o.kmax);
  put("rho_max", o.rho_max);
  put("ablation", o.ablation);
  cfg.validate();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent-noise defense and word-substitution attack sandbox"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config_path, "key = value experiment config");
  app.add_option("--out", o.out_dir, "report directory")->capture_default_str();
  app.add_option("--seed", o.seed, "master seed (u64)");
  app.add_option("--samples", o.samples, "attacked samples");
  app.add_option("--nu", o.nu, "noise variance; skips calibration");
  app.add_option("--layers", o.layers, "all|first|middle|last|0,3,5");
  app.add_option("--calibrate-delta", o.calibrate_delta, "max clean accuracy drop");
  app.add_option("--nu-grid", o.nu_grid, "ascending comma list starting at 0");
  app.add_option("--attack", o.attack, "lexicon|charbug|both");
  app.add_option("--kmax", o.kmax, "candidates per word");
  app.add_option("--rho-max", o.rho_max, "max fraction of perturbed words");
  app.add_option("--ablation", o.ablation, "unk|delete");

  for (const auto& name : advfool::experiment_commands()) {
    app.add_subcommand(name, kHelp.at(name))->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    auto cfg = o.config_path.empty()
                   ? advfool::ExperimentConfig()
                   : advfool::ExperimentConfig::load(o.config_path);
    apply(o, cfg);
    const auto out = advfool::run_experiment(command, cfg, o.out_dir);
    std::cout << out.report_path.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "advfool " << command << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
