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

#include "fiboost/c_api.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "boost.hpp"
#include "data.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "serialize.hpp"
#include "wrapper.hpp"

struct FibDataset {
  fiboost::Dataset data;
};

struct FibModel {
  fiboost::Ensemble ensemble;
};

namespace {

thread_local std::string g_last_error;

int fail(int status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
int guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return FIB_OK;
  } catch (const fiboost::ConfigError& e) {
    return fail(FIB_ERR_CONFIG, e.what());
  } catch (const fiboost::DataError& e) {
    return fail(FIB_ERR_DATA, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(FIB_ERR_CONFIG, std::string("invalid JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(FIB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FIB_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FIB_ERR_INTERNAL, "unknown error");
  }
}

char* to_c_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* name) {
  if (!p) throw fiboost::ConfigError(std::string(name) + " must not be NULL");
}

fiboost::Json parse_or_empty(const char* json) {
  if (!json || !*json) return fiboost::Json::object();
  return fiboost::Json::parse(json);
}

}  // namespace

extern "C" {

const char* fib_version(void) { return "0.1.0"; }

const char* fib_last_error(void) { return g_last_error.c_str(); }

void fib_string_free(char* s) { std::free(s); }

int fib_dataset_load_csv(const char* path, const char* target_column, const char* task,
                         FibDataset** out) {
  return guarded([&] {
    require(path, "path");
    require(target_column, "target_column");
    require(task, "task");
    require(out, "out");
    *out = nullptr;
    auto ds = fiboost::load_csv(path, target_column, fiboost::parse_task(task));
    *out = new FibDataset{std::move(ds)};
  });
}

int fib_dataset_load_features_csv(const char* path, const char* drop_column,
                                  FibDataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    std::optional<std::string_view> drop;
    if (drop_column) drop = drop_column;
    *out = new FibDataset{fiboost::load_features_csv(path, drop)};
  });
}

int fib_dataset_shape(const FibDataset* ds, size_t* n_rows, size_t* n_features) {
  return guarded([&] {
    require(ds, "dataset");
    if (n_rows) *n_rows = ds->data.n_rows();
    if (n_features) *n_features = ds->data.n_features();
  });
}

void fib_dataset_free(FibDataset* ds) { delete ds; }

int fib_discover(const FibDataset* ds, const char* wrapper_json, char** partition_json,
                 char** log_json) {
  return guarded([&] {
    require(ds, "dataset");
    require(partition_json, "partition_json");
    *partition_json = nullptr;
    if (log_json) *log_json = nullptr;
    const auto cfg = fiboost::wrapper_from_json(parse_or_empty(wrapper_json));
    fiboost::WrapperTrace trace;
    const auto partition = fiboost::discover_constraints(
        ds->data, fiboost::RowIndexSet::all(ds->data.n_rows()), cfg, &trace);
    std::string partition_text = partition.to_string();
    std::string log_text = fiboost::trace_to_json(trace).dump(2);
    *partition_json = to_c_string(partition_text);
    if (log_json) *log_json = to_c_string(log_text);
  });
}

int fib_train(const FibDataset* ds, const char* params_json, const char* schedule_json,
              FibModel** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(out, "out");
    *out = nullptr;
    const auto params = fiboost::params_from_json(parse_or_empty(params_json));
    const auto rows = fiboost::RowIndexSet::all(ds->data.n_rows());

    fiboost::ConstraintSchedule schedule = fiboost::NoConstraints{};
    auto sched = parse_or_empty(schedule_json);
    if (!sched.empty()) {
      if (sched.value("kind", "") == "per_residual" && !sched.contains("first_tree_partition")) {
        const auto cfg = sched.contains("wrapper")
                             ? fiboost::wrapper_from_json(sched["wrapper"])
                             : fiboost::WrapperConfig{};
        sched["first_tree_partition"] =
            fiboost::partition_to_json(fiboost::discover_constraints(ds->data, rows, cfg));
      }
      schedule = fiboost::schedule_from_json(sched);
    }
    auto ens = fiboost::train(ds->data, rows, params, schedule);
    *out = new FibModel{std::move(ens)};
  });
}

int fib_model_to_json(const FibModel* model, char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = nullptr;
    *out = to_c_string(fiboost::ensemble_to_json(model->ensemble).dump(2));
  });
}

int fib_model_from_json(const char* json, FibModel** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = nullptr;
    fiboost::Json doc;
    try {
      doc = fiboost::Json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      throw fiboost::DataError(std::string("model file is not valid JSON: ") + e.what());
    }
    *out = new FibModel{fiboost::ensemble_from_json(doc)};
  });
}

int fib_model_num_features(const FibModel* model, size_t* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = model->ensemble.n_features();
  });
}

int fib_model_predict(const FibModel* model, const FibDataset* ds, double* out, size_t len) {
  return guarded([&] {
    require(model, "model");
    require(ds, "dataset");
    require(out, "out");
    if (len != ds->data.n_rows()) {
      throw fiboost::ConfigError("output length does not match the dataset row count");
    }
    const auto pred = fiboost::predict(model->ensemble, ds->data,
                                       fiboost::RowIndexSet::all(ds->data.n_rows()));
    std::copy(pred.begin(), pred.end(), out);
  });
}

void fib_model_free(FibModel* model) { delete model; }

int fib_tune(const FibDataset* ds, const char* tune_json, char** params_json) {
  return guarded([&] {
    require(ds, "dataset");
    require(params_json, "params_json");
    *params_json = nullptr;
    const auto cfg = parse_or_empty(tune_json);
    if (!cfg.is_object()) throw fiboost::ConfigError("tune config must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      if (key != "grid" && key != "k" && key != "seed" && key != "params") {
        throw fiboost::ConfigError("unknown key '" + key + "' in tune config");
      }
    }
    const auto grid = cfg.contains("grid") ? fiboost::grid_from_json(cfg["grid"])
                                           : fiboost::TuningGrid{};
    const std::size_t k = cfg.value("k", std::size_t{3});
    const std::uint64_t seed = cfg.value("seed", std::uint64_t{0});
    const auto base = cfg.contains("params") ? fiboost::params_from_json(cfg["params"])
                                             : fiboost::TrainParams{};
    const auto tuned = fiboost::tune(ds->data, fiboost::RowIndexSet::all(ds->data.n_rows()),
                                     grid, k, seed, base);
    *params_json = to_c_string(fiboost::params_to_json(tuned).dump(2));
  });
}

int fib_benchmark(const FibDataset* ds, const char* config_json, const char* dataset_name,
                  char** report_json, char** report_csv) {
  return guarded([&] {
    require(ds, "dataset");
    require(report_json, "report_json");
    *report_json = nullptr;
    if (report_csv) *report_csv = nullptr;
    const auto cfg = fiboost::benchmark_config_from_json(parse_or_empty(config_json));
    const auto report = fiboost::benchmark(ds->data, cfg, dataset_name ? dataset_name : "");
    std::string json_text = fiboost::report_to_json(report).dump(2);
    std::string csv_text = fiboost::report_to_csv(report);
    *report_json = to_c_string(json_text);
    if (report_csv) *report_csv = to_c_string(csv_text);
  });
}

}  // extern "C"
