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

// fiboost command-line tool. Links only the public C API.
//
//   fiboost discover  --data d.csv --target y --task regression --out-dir out
//   fiboost train     ... [--constraints c.json | --partial-x 5]
//   fiboost predict   --model out/model.json --data d.csv --out-dir out
//   fiboost tune      ...
//   fiboost benchmark ...
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fiboost/c_api.h"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

// Error carrying the process exit code.
struct CliError {
  int code;
  std::string message;
};

struct SharedOptions {
  std::string data;
  std::string target;
  std::string task;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

struct Owned {
  char* ptr = nullptr;
  ~Owned() { fib_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

struct DatasetHandle {
  FibDataset* ptr = nullptr;
  ~DatasetHandle() { fib_dataset_free(ptr); }
};

struct ModelHandle {
  FibModel* ptr = nullptr;
  ~ModelHandle() { fib_model_free(ptr); }
};

void check(int status) {
  if (status != FIB_OK) throw CliError{status, fib_last_error()};
}

std::string read_file(const std::string& path, int error_code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{error_code, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError{kExitData, "cannot write '" + tmp.string() + "'"};
    out << content;
    if (!out) throw CliError{kExitData, "failed writing '" + tmp.string() + "'"};
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw CliError{kExitData, "cannot move output into '" + path.string() + "'"};
}

// The run configuration: the --config document with command-line flags
// applied on top.
class RunConfig {
 public:
  explicit RunConfig(const SharedOptions& opts) {
    if (!opts.config.empty()) {
      try {
        doc_ = Json::parse(read_file(opts.config, kExitUsage));
      } catch (const Json::exception& e) {
        throw CliError{kExitUsage, "config '" + opts.config + "' is not valid JSON: " + e.what()};
      }
      if (!doc_.is_object()) throw CliError{kExitUsage, "config must be a JSON object"};
    }
    if (!opts.data.empty()) doc_["data"] = opts.data;
    if (!opts.target.empty()) doc_["target"] = opts.target;
    if (!opts.task.empty()) doc_["task"] = opts.task;
    if (opts.seed) doc_["seed"] = *opts.seed;
    if (!opts.out_dir.empty()) doc_["out_dir"] = opts.out_dir;
  }

  std::string str(const char* key, const std::optional<std::string>& fallback = {}) const {
    if (doc_.contains(key)) {
      if (!doc_[key].is_string()) {
        throw CliError{kExitUsage, std::string("config field '") + key + "' must be a string"};
      }
      return doc_[key].get<std::string>();
    }
    if (fallback) return *fallback;
    throw CliError{kExitUsage, std::string("missing required setting '") + key + "'"};
  }

  std::uint64_t seed() const {
    if (!doc_.contains("seed")) return 0;
    if (!doc_["seed"].is_number_unsigned()) {
      throw CliError{kExitUsage, "config field 'seed' must be a non-negative integer"};
    }
    return doc_["seed"].get<std::uint64_t>();
  }

  // Sub-object `key` (empty object if absent).
  Json section(const char* key) const {
    if (!doc_.contains(key)) return Json::object();
    if (!doc_[key].is_object()) {
      throw CliError{kExitUsage, std::string("config field '") + key + "' must be an object"};
    }
    return doc_[key];
  }

  const Json& doc() const { return doc_; }

  fs::path out_dir() const {
    fs::path dir = str("out_dir", std::string("."));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError{kExitData, "cannot create output directory '" + dir.string() + "'"};
    return dir;
  }

  // Wrapper settings with the master seed filled in when none is given.
  Json wrapper() const {
    Json w = section("wrapper");
    if (!w.contains("seed")) w["seed"] = seed();
    return w;
  }

  Json params() const {
    Json p = section("params");
    if (!p.contains("seed")) p["seed"] = seed();
    return p;
  }

  void load_dataset(DatasetHandle& ds) const {
    const std::string data = str("data");
    const std::string target = str("target");
    const std::string task = str("task", std::string("regression"));
    check(fib_dataset_load_csv(data.c_str(), target.c_str(), task.c_str(), &ds.ptr));
  }

 private:
  Json doc_ = Json::object();
};

void add_shared(CLI::App* cmd, SharedOptions& o) {
  cmd->add_option("--data", o.data, "Dataset CSV (header row, numeric cells)");
  cmd->add_option("--target", o.target, "Target column name");
  cmd->add_option("--task", o.task, "regression | classification");
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--seed", o.seed, "Master seed for every seeded step");
  cmd->add_option("--out-dir", o.out_dir, "Directory for output files");
}

int run_discover(const SharedOptions& opts) {
  const RunConfig cfg(opts);
  DatasetHandle ds;
  cfg.load_dataset(ds);
  Owned partition;
  Owned log;
  check(fib_discover(ds.ptr, cfg.wrapper().dump().c_str(), &partition.ptr, &log.ptr));
  const fs::path dir = cfg.out_dir();
  write_atomic(dir / "partition.json", partition.str() + "\n");
  write_atomic(dir / "discover_log.json", log.str() + "\n");
  std::cout << partition.str() << "\n";
  return 0;
}

struct TrainOptions {
  std::string constraints;
  std::optional<std::size_t> partial_x;
  std::optional<std::size_t> n_trees;
  std::optional<std::size_t> max_depth;
  std::optional<double> learning_rate;
};

int run_train(const SharedOptions& opts, const TrainOptions& topts) {
  const RunConfig cfg(opts);
  Json params = cfg.params();
  if (topts.n_trees) params["n_trees"] = *topts.n_trees;
  if (topts.max_depth) params["max_depth"] = *topts.max_depth;
  if (topts.learning_rate) params["learning_rate"] = *topts.learning_rate;

  std::string constraints = topts.constraints;
  if (constraints.empty() && cfg.doc().contains("constraints")) constraints = cfg.str("constraints");
  std::optional<std::size_t> partial_x = topts.partial_x;
  if (!partial_x && cfg.doc().contains("partial_x")) {
    const Json& v = cfg.doc()["partial_x"];
    if (!v.is_number_unsigned()) throw CliError{kExitUsage, "'partial_x' must be a positive integer"};
    partial_x = v.get<std::size_t>();
  }
  if (!constraints.empty() && partial_x) {
    throw CliError{kExitUsage, "--constraints and --partial-x are mutually exclusive"};
  }

  Json schedule = {{"kind", "none"}};
  if (!constraints.empty()) {
    Json partition;
    try {
      partition = Json::parse(read_file(constraints, kExitUsage));
    } catch (const Json::exception& e) {
      throw CliError{kExitUsage, "constraints file '" + constraints + "' is not valid JSON"};
    }
    schedule = {{"kind", "fixed"}, {"partition", partition}};
  } else if (partial_x) {
    schedule = {{"kind", "per_residual"}, {"first_x", *partial_x}, {"wrapper", cfg.wrapper()}};
  }

  DatasetHandle ds;
  cfg.load_dataset(ds);
  ModelHandle model;
  check(fib_train(ds.ptr, params.dump().c_str(), schedule.dump().c_str(), &model.ptr));
  Owned text;
  check(fib_model_to_json(model.ptr, &text.ptr));
  const fs::path out = cfg.out_dir() / "model.json";
  write_atomic(out, text.str() + "\n");
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int run_predict(const SharedOptions& opts, const std::string& model_flag) {
  const RunConfig cfg(opts);
  const std::string model_path = model_flag.empty() ? cfg.str("model") : model_flag;
  const std::string model_text = read_file(model_path, kExitData);
  ModelHandle model;
  check(fib_model_from_json(model_text.c_str(), &model.ptr));

  const std::string data = cfg.str("data");
  const std::string target = cfg.str("target", std::string());
  DatasetHandle ds;
  check(fib_dataset_load_features_csv(data.c_str(), target.empty() ? nullptr : target.c_str(),
                                      &ds.ptr));
  std::size_t n_rows = 0;
  check(fib_dataset_shape(ds.ptr, &n_rows, nullptr));
  std::vector<double> pred(n_rows);
  check(fib_model_predict(model.ptr, ds.ptr, pred.data(), pred.size()));

  std::string out = "prediction\n";
  char buf[64];
  for (double v : pred) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out += buf;
  }
  const fs::path path = cfg.out_dir() / "predictions.csv";
  write_atomic(path, out);
  std::cout << "wrote " << path.string() << " (" << n_rows << " rows)\n";
  return 0;
}

Json benchmark_config(const RunConfig& cfg) {
  Json b = cfg.section("benchmark");
  const std::uint64_t seed = cfg.seed();
  for (const char* key : {"split_seed", "tune_seed", "random_seed"}) {
    if (!b.contains(key)) b[key] = seed;
  }
  if (!b.contains("wrapper")) b["wrapper"] = cfg.wrapper();
  if (!b.contains("grid") && cfg.doc().contains("grid")) b["grid"] = cfg.section("grid");
  if (!b.contains("k") && cfg.doc().contains("k")) b["k"] = cfg.doc()["k"];
  if (!b.contains("params") && cfg.doc().contains("params")) b["params"] = cfg.params();
  return b;
}

int run_tune(const SharedOptions& opts) {
  const RunConfig cfg(opts);
  Json t = {{"seed", cfg.seed()}, {"params", cfg.params()}};
  if (cfg.doc().contains("grid")) t["grid"] = cfg.section("grid");
  if (cfg.doc().contains("k")) t["k"] = cfg.doc()["k"];
  DatasetHandle ds;
  cfg.load_dataset(ds);
  Owned params;
  check(fib_tune(ds.ptr, t.dump().c_str(), &params.ptr));
  write_atomic(cfg.out_dir() / "params.json", params.str() + "\n");
  std::cout << params.str() << "\n";
  return 0;
}

int run_benchmark(const SharedOptions& opts) {
  const RunConfig cfg(opts);
  const Json b = benchmark_config(cfg);
  DatasetHandle ds;
  cfg.load_dataset(ds);
  const std::string name =
      cfg.str("name", fs::path(cfg.str("data")).stem().string());
  Owned report;
  Owned csv;
  check(fib_benchmark(ds.ptr, b.dump().c_str(), name.c_str(), &report.ptr, &csv.ptr));
  const fs::path dir = cfg.out_dir();
  write_atomic(dir / "report.json", report.str() + "\n");
  write_atomic(dir / "report.csv", csv.str());

  const Json doc = Json::parse(report.str());
  const std::string metric = doc["metric"].get<std::string>();
  for (const auto& v : doc["variants"]) {
    char line[256];
    const double change = v["percent_change"].is_null() ? 0.0 : v["percent_change"].get<double>();
    std::snprintf(line, sizeof(line), "%-24s %s=%.6f  change=%+.4f%%",
                  v["id"].get<std::string>().c_str(), metric.c_str(),
                  v["test_score"].get<double>(), change);
    std::cout << line << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fiboost: boosted trees with discovered feature-interaction constraints"};
  app.require_subcommand(1);

  SharedOptions discover_opts, train_opts, predict_opts, tune_opts, bench_opts;
  TrainOptions train_extra;
  std::string model_path;

  auto* discover = app.add_subcommand("discover", "Discover an interaction partition");
  add_shared(discover, discover_opts);

  auto* train = app.add_subcommand("train", "Train a boosted ensemble");
  add_shared(train, train_opts);
  train->add_option("--constraints", train_extra.constraints,
                    "Partition JSON ([[...],[...]]) applied to every tree");
  train->add_option("--partial-x", train_extra.partial_x,
                    "Rediscover constraints from residuals for the first x trees")
      ->check(CLI::PositiveNumber);
  train->add_option("--n-trees", train_extra.n_trees, "Number of trees");
  train->add_option("--max-depth", train_extra.max_depth, "Maximum tree depth");
  train->add_option("--learning-rate", train_extra.learning_rate, "Shrinkage");

  auto* predict = app.add_subcommand("predict", "Predict with a saved model");
  add_shared(predict, predict_opts);
  predict->add_option("--model", model_path, "Model JSON written by 'train'");

  auto* tune = app.add_subcommand("tune", "Cross-validated grid search");
  add_shared(tune, tune_opts);

  auto* bench = app.add_subcommand("benchmark", "Compare constraint variants");
  add_shared(bench, bench_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*discover) return run_discover(discover_opts);
    if (*train) return run_train(train_opts, train_extra);
    if (*predict) return run_predict(predict_opts, model_path);
    if (*tune) return run_tune(tune_opts);
    if (*bench) return run_benchmark(bench_opts);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
