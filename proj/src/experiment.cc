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
#include "advfool/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "advfool/analysis.h"
#include "advfool/attack.h"
#include "advfool/defense.h"
#include "advfool/errors.h"
#include "advfool/evaluate.h"
#include "advfool/rng.h"

namespace advfool {
namespace {

constexpr int kReportVersion = 1;

Exec exec_of(const ExperimentConfig& cfg) {
  return cfg.str("exec") == "serial" ? Exec::kSerial : Exec::kParallel;
}

std::size_t count(const ExperimentConfig& cfg, std::string_view key) {
  return static_cast<std::size_t>(cfg.integer(key));
}

Architecture architecture_of(const ExperimentConfig& cfg) {
  Architecture arch;
  arch.embed_dim = static_cast<int>(cfg.integer("embed_dim"));
  arch.hidden_dims = cfg.integers("hidden");
  const auto& act = cfg.str("activation");
  if (act == "relu") {
    arch.hidden_activation = Activation::kRelu;
  } else if (act == "identity") {
    arch.hidden_activation = Activation::kIdentity;
  } else {
    throw ConfigError("activation must be relu or identity");
  }
  return arch;
}

TrainConfig train_config_of(const ExperimentConfig& cfg) {
  TrainConfig tc;
  tc.epochs = static_cast<int>(cfg.integer("epochs"));
  tc.batch_size = static_cast<int>(cfg.integer("batch_size"));
  tc.learning_rate = cfg.real("learning_rate");
  tc.init_scale = cfg.real("init_scale");
  tc.seed = derive_seed(cfg.u64("seed"), "train");
  return tc;
}

AttackConfig attack_config_of(const ExperimentConfig& cfg) {
  AttackConfig a;
  a.kind = parse_attack_kind(cfg.str("attack"));
  a.budget.k_max = static_cast<int>(cfg.integer("kmax"));
  a.budget.rho_max = cfg.real("rho_max");
  a.ablation = parse_ablation(cfg.str("ablation"));
  a.verify_redraws = static_cast<int>(cfg.integer("verify_redraws"));
  a.budget.validate();
  return a;
}

// Pretrained rows aligned to `vocab`; words missing from the file get zeros.
EmbeddingTable align_embeddings(const LoadedEmbeddings& loaded,
                                const Vocab& vocab) {
  EmbeddingTable table;
  table.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vocab.size()),
                                       loaded.table.dim());
  for (std::size_t id = 0; id < vocab.size(); ++id) {
    const auto& tok = vocab.token(static_cast<int>(id));
    if (!loaded.vocab.contains(tok)) continue;
    table.values.row(static_cast<Eigen::Index>(id)) =
        loaded.table.values.row(loaded.vocab.lookup(tok));
  }
  return table;
}

struct NuChoice {
  double nu = 0.0;
  std::optional<Calibration> calibration;
};

NuChoice resolve_nu(const Workspace& ws, const ExperimentConfig& cfg,
                    const std::vector<int>& layers, std::string_view purpose) {
  if (!cfg.str("nu").empty()) return {cfg.real("nu"), std::nullopt};
  auto cal = calibrate_nu(*ws.model, ws.test, layers, cfg.real("calibrate_delta"),
                          cfg.reals("nu_grid"),
                          derive_seed(cfg.u64("seed"), purpose), exec_of(cfg));
  return {cal.chosen, cal};
}

Json nu_json(const NuChoice& choice) {
  Json j{{"nu", choice.nu}, {"calibrated", choice.calibration.has_value()}};
  if (choice.calibration) j["calibration"] = to_json(*choice.calibration);
  return j;
}

Json profile_json(const ImportanceProfile& p) {
  return Json{{"scores", p.scores}, {"ranking", p.ranking}};
}

Json run_synth_data(const ExperimentConfig& cfg, const Workspace& ws,
                    const std::filesystem::path& out_dir) {
  if (cfg.str("dataset") != "synth") {
    throw ConfigError("synth-data needs dataset = synth");
  }
  std::filesystem::create_directories(out_dir);
  save_dataset(out_dir / "train.tsv", ws.train);
  save_dataset(out_dir / "test.tsv", ws.test);
  save_synonyms(out_dir / "lexicon.tsv", ws.lexicon);
  return Json{{"n_train", ws.train.size()},
              {"n_test", ws.test.size()},
              {"num_classes", ws.train.num_classes},
              {"vocab_size", ws.vocab.size()},
              {"lexicon_entries", ws.lexicon.size()},
              {"files", Json::array({"train.tsv", "test.tsv", "lexicon.tsv"})}};
}

Json run_train(const ExperimentConfig& cfg, const Workspace& ws,
               const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string name = "model-" + std::to_string(cfg.u64("seed")) + ".ckpt";
  save_checkpoint(out_dir / name, *ws.model, ws.vocab);
  return Json{{"epoch_losses", ws.epoch_losses},
              {"train_acc", accuracy(*ws.model, ws.train)},
              {"test_acc", accuracy(*ws.model, ws.test)},
              {"checkpoint", name}};
}

Json run_calibrate(const ExperimentConfig& cfg, const Workspace& ws) {
  const auto layers = parse_layer_set(cfg.str("layers"), ws.model->num_layers());
  const double delta = cfg.real("calibrate_delta");
  const auto cal = calibrate_nu(*ws.model, ws.test, layers, delta,
                                cfg.reals("nu_grid"),
                                derive_seed(cfg.u64("seed"), "calibrate"),
                                exec_of(cfg));
  const NoiseSpec noise{cal.chosen, layers, 0};
  const double recheck = clean_accuracy(*ws.model, ws.test, &noise,
                                        derive_seed(cfg.u64("seed"), "recheck"),
                                        exec_of(cfg));
  const double n = static_cast<double>(ws.test.size());
  const double se = std::sqrt(recheck * (1.0 - recheck) / n);
  const double drop = cal.base_accuracy - recheck;
  return Json{{"layer_set", layers},
              {"delta", delta},
              {"calibration", to_json(cal)},
              {"recheck",
               Json{{"accuracy", recheck},
                    {"drop", drop},
                    {"binomial_se", se},
                    {"within_bound", drop <= delta + 2.0 * se}}}};
}

Json run_attack_eval(const ExperimentConfig& cfg, const Workspace& ws) {
  const auto layers = parse_layer_set(cfg.str("layers"), ws.model->num_layers());
  const auto choice = resolve_nu(ws, cfg, layers, "calibrate");
  const auto attack = attack_config_of(cfg);
  const std::uint64_t seed = derive_seed(cfg.u64("seed"), "evaluate");
  const NoiseSpec noise{choice.nu, layers, seed};
  const auto base = evaluate(*ws.model, ws.vocab, ws.lexicon, nullptr, attack,
                             ws.test, count(cfg, "samples"), seed, exec_of(cfg));
  const auto defended = evaluate(*ws.model, ws.vocab, ws.lexicon, &noise, attack,
                                 ws.test, count(cfg, "samples"), seed, exec_of(cfg));
  return Json{{"defense", nu_json(choice)},
              {"undefended", to_json(base)},
              {"defended", to_json(defended)}};
}

Json run_theorem_check(const ExperimentConfig& cfg, const Workspace& ws) {
  const auto& model = *ws.model;
  const auto index = count(cfg, "theorem_example");
  if (index >= ws.test.size()) throw ConfigError("theorem_example out of range");
  const auto& tokens = ws.test.examples[index].tokens;
  const int layer = cfg.str("theorem_layer") == "head"
                        ? model.num_layers()
                        : static_cast<int>(cfg.integer("theorem_layer"));
  const auto choice = resolve_nu(ws, cfg, {layer}, "calibrate");
  const int y = predict(model, tokens.ids);
  QueryOracle oracle(make_victim(DefendedModel(model, NoiseSpec{}), 0));
  const auto profile =
      importance_profile(oracle, tokens, y, Ablation::kUnk, ws.vocab);
  const std::size_t word = profile.ranking.front();
  const auto draws = count(cfg, "theorem_draws");
  const std::uint64_t seed = derive_seed(cfg.u64("seed"), "theorem");
  const auto at_nu = theorem1_check(model, ws.vocab, tokens, word, y, choice.nu,
                                    layer, draws, seed, exec_of(cfg));
  const auto at_2nu = theorem1_check(model, ws.vocab, tokens, word, y,
                                     2.0 * choice.nu, layer, draws,
                                     derive_seed(seed, "double"), exec_of(cfg));
  const double ratio = at_nu.stats.variance > 0
                           ? at_2nu.stats.variance / at_nu.stats.variance
                           : 0.0;
  return Json{{"example_index", index},
              {"defense", nu_json(choice)},
              {"at_nu", to_json(at_nu)},
              {"at_2nu", to_json(at_2nu)},
              {"variance_ratio_2nu_over_nu", ratio}};
}

Json run_loss_change(const ExperimentConfig& cfg, const Workspace& ws) {
  const auto& model = *ws.model;
  const auto layers = parse_layer_set(cfg.str("layers"), model.num_layers());
  const auto latent = resolve_nu(ws, cfg, layers, "calibrate");
  const double delta = cfg.real("calibrate_delta");
  const std::uint64_t seed = cfg.u64("seed");
  const auto rates = cfg.reals("rate_grid");
  const auto mask_cal = calibrate_rate(
      model, ws.vocab, ws.test, InputRandomizer{RandomizerKind::kMask, 0, nullptr},
      delta, rates, derive_seed(seed, "calibrate-mask"), exec_of(cfg));
  const auto swap_cal = calibrate_rate(
      model, ws.vocab, ws.test,
      InputRandomizer{RandomizerKind::kSynonymSwap, 0, &ws.lexicon}, delta, rates,
      derive_seed(seed, "calibrate-swap"), exec_of(cfg));

  LabeledCorpus subset{{}, ws.test.num_classes};
  const auto n = std::min(count(cfg, "loss_examples"), ws.test.size());
  subset.examples.assign(ws.test.examples.begin(),
                         ws.test.examples.begin() + static_cast<std::ptrdiff_t>(n));
  const std::vector<NamedPerturber> perturbers = {
      {"latent", NoiseSpec{latent.nu, layers, 0}},
      {"mask", InputRandomizer{RandomizerKind::kMask, mask_cal.chosen, nullptr}},
      {"synonym_swap", InputRandomizer{RandomizerKind::kSynonymSwap,
                                       swap_cal.chosen, &ws.lexicon}},
  };
  const auto stats =
      loss_change_report(model, ws.vocab, subset, perturbers,
                         count(cfg, "loss_draws"), derive_seed(seed, "loss-change"),
                         default_loss_bin_edges(), exec_of(cfg));
  Json rows = Json::array();
  for (const auto& s : stats) rows.push_back(to_json(s));
  return Json{{"n_examples", n},
              {"draws_per_example", count(cfg, "loss_draws")},
              {"latent", nu_json(latent)},
              {"mask_calibration", to_json(mask_cal)},
              {"swap_calibration", to_json(swap_cal)},
              {"perturbers", rows}};
}

Json run_importance_shift(const ExperimentConfig& cfg, const Workspace& ws) {
  const auto& model = *ws.model;
  const auto layers = parse_layer_set(cfg.str("layers"), model.num_layers());
  const auto choice = resolve_nu(ws, cfg, layers, "calibrate");
  const std::uint64_t seed = cfg.u64("seed");
  const auto indices =
      sample_indices(ws.test.size(), std::min(count(cfg, "shift_inputs"), ws.test.size()),
                     derive_seed(seed, "shift-subset"));
  const NoiseSpec noise{choice.nu, layers, 0};
  const auto summary = importance_shift_rate(model, ws.vocab, ws.test, indices,
                                             noise, derive_seed(seed, "shift"),
                                             exec_of(cfg));
  Json examples = Json::array();
  for (std::size_t k = 0; k < std::min<std::size_t>(3, indices.size()); ++k) {
    const auto& tokens = ws.test.examples[indices[k]].tokens;
    if (tokens.size() < 2) continue;
    const auto shift =
        importance_shift(model, ws.vocab, tokens, predict(model, tokens.ids), noise,
                         derive_seed(derive_seed(seed, "shift"), "shift-input",
                                     indices[k]));
    examples.push_back(Json{{"example_index", indices[k]},
                            {"words", tokens.words},
                            {"base", profile_json(shift.base)},
                            {"randomized", profile_json(shift.randomized)},
                            {"argmax_changed", shift.argmax_changed}});
  }
  return Json{{"defense", nu_json(choice)},
              {"n_inputs", summary.n_inputs},
              {"n_changed", summary.n_changed},
              {"fraction_changed", summary.fraction},
              {"examples", examples}};
}

Json run_ablate_layers(const ExperimentConfig& cfg, const Workspace& ws) {
  const auto& model = *ws.model;
  const auto attack = attack_config_of(cfg);
  const std::uint64_t seed = cfg.u64("seed");
  std::vector<LayerChoice> choices;
  Json calibrations = Json::object();
  for (const char* name : {"first", "middle", "last", "all"}) {
    const auto layers = parse_layer_set(name, model.num_layers());
    const auto choice =
        resolve_nu(ws, cfg, layers, std::string("calibrate-") + name);
    calibrations[name] = nu_json(choice);
    choices.push_back({name, layers, choice.nu});
  }
  const std::uint64_t eval_seed = derive_seed(seed, "evaluate");
  const auto base = evaluate(model, ws.vocab, ws.lexicon, nullptr, attack, ws.test,
                             count(cfg, "samples"), eval_seed, exec_of(cfg));
  const auto rows = layer_ablation(model, ws.vocab, ws.lexicon, ws.test, attack,
                                   choices, count(cfg, "samples"), eval_seed,
                                   exec_of(cfg));
  Json table = Json::array();
  for (const auto& row : rows) table.push_back(to_json(row));
  return Json{{"undefended", to_json(base)},
              {"calibrations", calibrations},
              {"rows", table}};
}

Json run_sweep_nu(const ExperimentConfig& cfg, const Workspace& ws) {
  const auto& model = *ws.model;
  const auto layers = parse_layer_set(cfg.str("layers"), model.num_layers());
  std::vector<double> nu_list = cfg.reals("nu_list");
  Json defense = Json::object();
  if (nu_list.empty()) {
    const auto choice = resolve_nu(ws, cfg, layers, "calibrate");
    defense = nu_json(choice);
    const double star = choice.nu;
    std::set<double> grid = {0.0};
    for (double f : {0.25, 0.5, 1.0, 2.0, 5.0, cfg.real("excess_factor")}) {
      grid.insert(f * star);
    }
    nu_list.assign(grid.begin(), grid.end());
  }
  const auto points = nu_sweep(model, ws.vocab, ws.lexicon, ws.test,
                               attack_config_of(cfg), layers, nu_list,
                               count(cfg, "samples"),
                               derive_seed(cfg.u64("seed"), "evaluate"), exec_of(cfg));
  Json arr = Json::array();
  for (const auto& p : points) arr.push_back(to_json(p));
  return Json{{"layer_set", layers}, {"defense", defense}, {"points", arr}};
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> commands = {
      "train",        "attack-eval",      "calibrate",
      "theorem-check", "loss-change",     "importance-shift",
      "ablate-layers", "sweep-nu",        "synth-data"};
  return commands;
}

Workspace prepare_workspace(const ExperimentConfig& cfg, bool need_model) {
  cfg.validate();
  Workspace ws;
  std::optional<Checkpoint> checkpoint;
  if (need_model && !cfg.str("checkpoint").empty()) {
    checkpoint = load_checkpoint(cfg.str("checkpoint"));
  }

  if (cfg.str("dataset") == "synth") {
    SynthShape shape;
    shape.min_length = count(cfg, "synth_min_len");
    shape.max_length = count(cfg, "synth_max_len");
    shape.min_keywords = count(cfg, "synth_min_keywords");
    shape.max_keywords = count(cfg, "synth_max_keywords");
    shape.max_distractors = count(cfg, "synth_distractors");
    shape.filler_synonyms = count(cfg, "synth_filler_synonyms");
    auto data = synth_corpus(cfg.u64("synth_seed"), count(cfg, "synth_n"),
                             count(cfg, "synth_vocab"),
                             static_cast<int>(cfg.integer("synth_classes")),
                             shape);
    std::tie(ws.train, ws.test) = split_corpus(data.corpus, cfg.real("train_fraction"));
    ws.vocab = std::move(data.vocab);
    ws.lexicon = std::move(data.lexicon);
  } else {
    if (!cfg.str("lexicon").empty()) ws.lexicon = load_synonyms(cfg.str("lexicon"));
    ws.train = load_dataset(cfg.str("train_data"), ws.vocab);
    ws.test = load_dataset(cfg.str("test_data"), ws.vocab);
    const int classes = std::max(ws.train.num_classes, ws.test.num_classes);
    ws.train.num_classes = ws.test.num_classes = classes;
    ws.vocab = build_vocab(ws.train, &ws.lexicon);
  }
  if (checkpoint) ws.vocab = checkpoint->vocab;
  reencode(ws.train, ws.vocab);
  reencode(ws.test, ws.vocab);
  if (ws.train.examples.empty() || ws.test.examples.empty()) {
    throw ConfigError("train and test splits must both be non-empty");
  }

  if (!need_model) return ws;
  if (checkpoint) {
    if (checkpoint->model.num_classes() < ws.test.num_classes) {
      throw ConfigError("checkpoint has fewer classes than the dataset");
    }
    ws.model = std::move(checkpoint->model);
    return ws;
  }
  std::optional<EmbeddingTable> pretrained;
  Architecture arch = architecture_of(cfg);
  if (!cfg.str("embeddings").empty()) {
    pretrained = align_embeddings(load_embeddings(cfg.str("embeddings")), ws.vocab);
    arch.embed_dim = static_cast<int>(pretrained->dim());
  }
  ws.model = train(ws.train, ws.vocab.size(), arch, train_config_of(cfg),
                   &ws.epoch_losses, pretrained ? &*pretrained : nullptr);
  return ws;
}

Json build_report(std::string_view command, const ExperimentConfig& cfg,
                  const std::filesystem::path& out_dir) {
  const auto& commands = experiment_commands();
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    throw ConfigError("unknown command '" + std::string(command) + "'");
  }
  const bool need_model = command != "synth-data";
  const Workspace ws = prepare_workspace(cfg, need_model);

  Json results;
  if (command == "synth-data") {
    results = run_synth_data(cfg, ws, out_dir);
  } else if (command == "train") {
    results = run_train(cfg, ws, out_dir);
  } else if (command == "calibrate") {
    results = run_calibrate(cfg, ws);
  } else if (command == "attack-eval") {
    results = run_attack_eval(cfg, ws);
  } else if (command == "theorem-check") {
    results = run_theorem_check(cfg, ws);
  } else if (command == "loss-change") {
    results = run_loss_change(cfg, ws);
  } else if (command == "importance-shift") {
    results = run_importance_shift(cfg, ws);
  } else if (command == "ablate-layers") {
    results = run_ablate_layers(cfg, ws);
  } else {
    results = run_sweep_nu(cfg, ws);
  }

  Json config = Json::object();
  for (const auto& [k, v] : cfg.values()) config[k] = v;
  return Json{{"version", kReportVersion},
              {"command", std::string(command)},
              {"seed", cfg.u64("seed")},
              {"config", config},
              {"results", results}};
}

RunOutput run_experiment(std::string_view command, const ExperimentConfig& cfg,
                         const std::filesystem::path& out_dir) {
  RunOutput out;
  out.command = std::string(command);
  out.report_text = dump_report(build_report(command, cfg, out_dir));
  const std::string hash = hex16(fnv1a64(out.command + "\n" + cfg.canonical()));
  std::filesystem::create_directories(out_dir);
  out.report_path = out_dir / (out.command + "-" + hash + "-" +
                               std::to_string(cfg.u64("seed")) + ".json");
  if (std::filesystem::exists(out.report_path)) {
    std::ifstream in(out.report_path, std::ios::binary);
    std::stringstream existing;
    existing << in.rdbuf();
    if (existing.str() != out.report_text) {
      throw Error("refusing to overwrite " + out.report_path.string() +
                  " with a different report");
    }
    return out;
  }
  std::ofstream file(out.report_path, std::ios::binary);
  if (!file) throw Error("cannot write " + out.report_path.string());
  file << out.report_text;
  return out;
}

}  // namespace advfool
