/*
 * Copyright 2026 The fiboost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FIBOOST_SERIALIZE_HPP_
#define FIBOOST_SERIALIZE_HPP_

// JSON documents exchanged through the C API and written by the CLI.
// Readers reject unknown keys so configuration typos surface as errors.

#include <string>

#include <json.hpp>

#include "boost.hpp"
#include "experiment.hpp"
#include "partition.hpp"
#include "wrapper.hpp"

namespace fiboost {

using Json = nlohmann::json;

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

Json partition_to_json(const ConstraintPartition& p);
ConstraintPartition partition_from_json(const Json& j);

Json params_to_json(const TrainParams& p);
// Fields absent from `j` keep their value from `defaults`.
TrainParams params_from_json(const Json& j, TrainParams defaults = {});

Json wrapper_to_json(const WrapperConfig& c);
WrapperConfig wrapper_from_json(const Json& j, WrapperConfig defaults = {});

Json grid_to_json(const TuningGrid& g);
TuningGrid grid_from_json(const Json& j, TuningGrid defaults = {});

BenchmarkConfig benchmark_config_from_json(const Json& j, BenchmarkConfig defaults = {});

// {"kind": "none"} | {"kind": "fixed", "partition": [[...]]} |
// {"kind": "per_residual", "first_x": n, "wrapper": {...},
//  "first_tree_partition": [[...]]}
Json schedule_to_json(const ConstraintSchedule& s);
ConstraintSchedule schedule_from_json(const Json& j);

Json ensemble_to_json(const Ensemble& e);
// Throws DataError on a malformed model document.
Ensemble ensemble_from_json(const Json& j);

Json trace_to_json(const WrapperTrace& t);

Json report_to_json(const BenchmarkReport& r);
BenchmarkReport report_from_json(const Json& j);
// One row per variant entry.
std::string report_to_csv(const BenchmarkReport& r);

}  // namespace fiboost

#endif  // FIBOOST_SERIALIZE_HPP_
