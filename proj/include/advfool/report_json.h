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
#ifndef ADVFOOL_REPORT_JSON_H_
#define ADVFOOL_REPORT_JSON_H_

#include <string>

#include "json.hpp"

#include "advfool/analysis.h"
#include "advfool/defense.h"
#include "advfool/evaluate.h"

namespace advfool {

using Json = nlohmann::json;

// Two-space indented, keys sorted, floats printed with 17 significant digits
// (non-finite floats become null), trailing newline.
std::string dump_report(const Json& j);

Json to_json(const EvalReport& r);
Json to_json(const Calibration& c);
Json to_json(const TheoremCheck& t);
Json to_json(const LossChangeStats& s);
Json to_json(const SweepPoint& p);
Json to_json(const LayerAblationRow& row);
Json to_json(const SampleStats& s);

}  // namespace advfool

#endif  // ADVFOOL_REPORT_JSON_H_
