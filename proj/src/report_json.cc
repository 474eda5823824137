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
#include "advfool/report_json.h"

#include <cmath>

#include "advfool/numfmt.h"

namespace advfool {
namespace {

void emit(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        emit(it.value(), depth + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        emit(j[i], depth + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double17(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

Json layers_json(const std::vector<int>& layers) {
  Json arr = Json::array();
  for (int l : layers) arr.push_back(l);
  return arr;
}

}  // namespace

std::string dump_report(const Json& j) {
  std::string out;
  emit(j, 0, out);
  out += '\n';
  return out;
}

Json to_json(const EvalReport& r) {
  return Json{
      {"clean_acc", r.clean_acc},
      {"clean_subset_acc", r.clean_subset_acc},
      {"aua", r.aua},
      {"asr", r.asr},
      {"avg_queries", r.avg_queries},
      {"avg_queries_success", r.avg_queries_success},
      {"reverify_rate", r.reverify_rate},
      {"n_eval", r.n_eval},
      {"n_originally_correct", r.n_originally_correct},
      {"n_flips", r.n_flips},
      {"budget_violations", r.budget_violations},
      {"nu", r.noise.nu},
      {"layer_set", layers_json(r.noise.layer_set)},
      {"attack", std::string(attack_kind_name(r.attack.kind))},
      {"kmax", r.attack.budget.k_max},
      {"rho_max", r.attack.budget.rho_max},
      {"ablation", std::string(ablation_name(r.attack.ablation))},
      {"verify_redraws", r.attack.verify_redraws},
      {"seed", r.seed},
  };
}

Json to_json(const Calibration& c) {
  Json grid = Json::array();
  for (const auto& p : c.grid) {
    grid.push_back(Json{{"value", p.value}, {"accuracy", p.accuracy}});
  }
  return Json{{"chosen", c.chosen}, {"base_accuracy", c.base_accuracy},
              {"grid", grid}};
}

Json to_json(const SampleStats& s) {
  return Json{{"n", s.n},
              {"mean", s.mean},
              {"variance", s.variance},
              {"skewness", s.skewness},
              {"excess_kurtosis", s.excess_kurtosis}};
}

Json to_json(const TheoremCheck& t) {
  const double var = t.stats.variance;
  return Json{
      {"word_index", t.word_index},
      {"label", t.label},
      {"layer", t.layer},
      {"nu", t.nu},
      {"base_score", t.base_score},
      {"stats", to_json(t.stats)},
      {"std_error", t.std_error},
      {"grad_norm_x", t.grad_norm_x},
      {"grad_norm_ablated", t.grad_norm_ablated},
      {"predicted_unsquared_var", t.predicted_unsquared_var},
      {"predicted_firstorder_var", t.predicted_firstorder_var},
      {"ratio_empirical_to_unsquared",
       t.predicted_unsquared_var > 0 ? var / t.predicted_unsquared_var : 0.0},
      {"ratio_empirical_to_firstorder",
       t.predicted_firstorder_var > 0 ? var / t.predicted_firstorder_var : 0.0},
      {"ks_statistic", t.ks_statistic},
      {"ks_critical_99", t.ks_critical},
      {"ks_pass", t.ks_pass},
      {"mean_within_3se", t.mean_within_3se},
  };
}

Json to_json(const LossChangeStats& s) {
  return Json{{"name", s.name},
              {"stats", to_json(s.stats)},
              {"bin_edges", s.bin_edges},
              {"counts", s.counts}};
}

Json to_json(const SweepPoint& p) {
  return Json{{"nu", p.nu},
              {"clean_acc", p.clean_acc},
              {"aua", p.aua},
              {"asr", p.asr},
              {"avg_queries", p.avg_queries},
              {"report", to_json(p.report)}};
}

Json to_json(const LayerAblationRow& row) {
  return Json{{"choice", row.choice.name},
              {"layer_set", layers_json(row.choice.layer_set)},
              {"nu", row.choice.nu},
              {"report", to_json(row.report)}};
}

}  // namespace advfool
