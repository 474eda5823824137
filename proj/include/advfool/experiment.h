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
#ifndef ADVFOOL_EXPERIMENT_H_
#define ADVFOOL_EXPERIMENT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "advfool/classifier.h"
#include "advfool/config.h"
#include "advfool/corpus.h"
#include "advfool/report_json.h"

namespace advfool {

// Data, vocab, lexicon and model resolved from a config.
struct Workspace {
  LabeledCorpus train;
  LabeledCorpus test;
  Vocab vocab;
  SynonymLexicon lexicon;
  std::optional<LayeredClassifier> model;
  std::vector<double> epoch_losses;
};

// Loads or generates data; trains or loads the model when `need_model`.
Workspace prepare_workspace(const ExperimentConfig& cfg, bool need_model = true);

const std::vector<std::string>& experiment_commands();

struct RunOutput {
  std::string command;
  std::string report_text;  // exact bytes written
  std::filesystem::path report_path;
};

// Runs one subcommand and writes its report to
// `<out_dir>/<command>-<config hash>-<seed>.json`. Existing reports are never
// overwritten with different bytes. Side outputs (datasets, checkpoints) go
// to the same directory.
RunOutput run_experiment(std::string_view command, const ExperimentConfig& cfg,
                         const std::filesystem::path& out_dir);

// Report for `command` without touching the filesystem beyond side outputs
// written under `out_dir`.
Json build_report(std::string_view command, const ExperimentConfig& cfg,
                  const std::filesystem::path& out_dir);

}  // namespace advfool

#endif  // ADVFOOL_EXPERIMENT_H_
