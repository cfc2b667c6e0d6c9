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

#include <doctest.h>

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "api_util.hpp"
#include "fiboost/c_api.h"

using nlohmann::json;
namespace at = fiboost::api_testing;
namespace fs = std::filesystem;

namespace {

const std::string kCli = FIBOOST_CLI_PATH;

at::RunResult cli(const std::string& args, const fs::path& scratch) {
  return at::run(kCli, args, scratch);
}

std::vector<double> read_predictions(const fs::path& path) {
  std::istringstream in(at::read_text(path));
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "prediction");
  std::vector<double> out;
  while (std::getline(in, line)) out.push_back(std::stod(line));
  return out;
}

std::string data_csv(const fs::path& dir) {
  const auto path = dir / "data.csv";
  at::write_text(path, at::synthetic_csv(
                           200, 4, 11, [](const auto& r) { return r[0] * r[1] + 0.5 * r[3]; },
                           0.1));
  return at::quote(path);
}

}  // namespace

TEST_CASE("CLI: discover on a one-feature file") {
  const auto dir = at::temp_dir("cli_one");
  at::write_text(dir / "one.csv", "x,y\n1,2\n2,4.1\n3,5.9\n4,8.2\n5,9.9\n6,12\n");
  const auto r = cli("discover --data " + at::quote(dir / "one.csv") +
                         " --target y --out-dir " + at::quote(dir / "out"),
                     dir);
  REQUIRE(r.exit_code == 0);
  CHECK(json::parse(at::read_text(dir / "out" / "partition.json")) == json::parse("[[0]]"));
  CHECK(json::parse(at::read_text(dir / "out" / "discover_log.json")).contains("steps"));
}

TEST_CASE("CLI: discover is byte-identical across runs") {
  const auto dir = at::temp_dir("cli_det");
  const std::string data = data_csv(dir);
  for (const char* sub : {"a", "b"}) {
    REQUIRE(cli("discover --data " + data + " --target y --seed 9 --out-dir " +
                    at::quote(dir / sub),
                dir)
                .exit_code == 0);
  }
  for (const char* file : {"partition.json", "discover_log.json"}) {
    CHECK(at::read_text(dir / "a" / file) == at::read_text(dir / "b" / file));
  }
}

TEST_CASE("CLI: error exit codes") {
  const auto dir = at::temp_dir("cli_err");
  const std::string data = data_csv(dir);

  auto r = cli("discover --data " + data + " --target nope --out-dir " + at::quote(dir), dir);
  CHECK(r.exit_code == FIB_ERR_DATA);
  CHECK(r.err.find("nope") != std::string::npos);

  r = cli("discover --data " + at::quote(dir / "missing.csv") + " --target y", dir);
  CHECK(r.exit_code == FIB_ERR_DATA);

  r = cli("discover --target y", dir);  // no data path
  CHECK(r.exit_code == FIB_ERR_CONFIG);

  r = cli("frobnicate", dir);
  CHECK(r.exit_code == FIB_ERR_CONFIG);

  at::write_text(dir / "overlap.json", "[[0,1],[1,2,3]]");
  r = cli("train --data " + data + " --target y --constraints " +
              at::quote(dir / "overlap.json") + " --out-dir " + at::quote(dir / "t"),
          dir);
  CHECK(r.exit_code == FIB_ERR_CONFIG);
  CHECK_FALSE(fs::exists(dir / "t" / "model.json"));

  at::write_text(dir / "bad_grid.json", R"({"grid": {"n_trees": []}})");
  r = cli("benchmark --data " + data + " --target y --config " +
              at::quote(dir / "bad_grid.json") + " --out-dir " + at::quote(dir / "b"),
          dir);
  CHECK(r.exit_code == FIB_ERR_CONFIG);

  at::write_text(dir / "broken.json", "{");
  r = cli("tune --data " + data + " --target y --config " + at::quote(dir / "broken.json"), dir);
  CHECK(r.exit_code == FIB_ERR_CONFIG);

  at::write_text(dir / "model.json", R"({"format": "fiboost-model"})");
  r = cli("predict --data " + data + " --target y --model " + at::quote(dir / "model.json") +
              " --out-dir " + at::quote(dir / "p"),
          dir);
  CHECK(r.exit_code == FIB_ERR_DATA);
}

TEST_CASE("CLI: train then predict reproduces in-memory predictions") {
  const auto dir = at::temp_dir("cli_train");
  const std::string data = data_csv(dir);
  at::write_text(dir / "groups.json", "[[0,1],[2],[3]]");
  REQUIRE(cli("train --data " + data + " --target y --n-trees 15 --max-depth 3 --constraints " +
                  at::quote(dir / "groups.json") + " --out-dir " + at::quote(dir),
              dir)
              .exit_code == 0);
  REQUIRE(cli("predict --data " + data + " --target y --model " +
                  at::quote(dir / "model.json") + " --out-dir " + at::quote(dir),
              dir)
              .exit_code == 0);
  const auto from_file = read_predictions(dir / "predictions.csv");

  const std::string model_text = at::read_text(dir / "model.json");
  FibModel* model = nullptr;
  REQUIRE(fib_model_from_json(model_text.c_str(), &model) == FIB_OK);
  FibDataset* ds = nullptr;
  REQUIRE(fib_dataset_load_features_csv((dir / "data.csv").string().c_str(), "y", &ds) == FIB_OK);
  std::vector<double> in_memory(200);
  REQUIRE(fib_model_predict(model, ds, in_memory.data(), in_memory.size()) == FIB_OK);
  CHECK(from_file == in_memory);

  // Same data trained through the C API gives the same model document.
  FibDataset* train_ds = nullptr;
  REQUIRE(fib_dataset_load_csv((dir / "data.csv").string().c_str(), "y", "regression",
                               &train_ds) == FIB_OK);
  FibModel* direct = nullptr;
  REQUIRE(fib_train(train_ds, R"({"n_trees": 15, "max_depth": 3, "seed": 0})",
                    R"({"kind": "fixed", "partition": [[0,1],[2],[3]]})", &direct) == FIB_OK);
  char* direct_text = nullptr;
  REQUIRE(fib_model_to_json(direct, &direct_text) == FIB_OK);
  CHECK(json::parse(direct_text) == json::parse(model_text));
  fib_string_free(direct_text);
  fib_model_free(direct);
  fib_dataset_free(train_ds);
  fib_dataset_free(ds);
  fib_model_free(model);

  // Prediction on a file with the wrong width fails with a data error.
  at::write_text(dir / "narrow.csv", "a,b\n1,2\n");
  const auto r = cli("predict --data " + at::quote(dir / "narrow.csv") + " --model " +
                         at::quote(dir / "model.json") + " --out-dir " + at::quote(dir / "n"),
                     dir);
  CHECK(r.exit_code == FIB_ERR_DATA);
}

TEST_CASE("CLI: zero trees predict the transformed base score") {
  const auto dir = at::temp_dir("cli_zero");
  at::write_text(dir / "c.csv", at::synthetic_csv(80, 2, 3, [](const auto& r) { return r[0]; },
                                                  0.2, true));
  REQUIRE(cli("train --data " + at::quote(dir / "c.csv") +
                  " --target y --task classification --n-trees 0 --out-dir " + at::quote(dir),
              dir)
              .exit_code == 0);
  REQUIRE(cli("predict --data " + at::quote(dir / "c.csv") + " --target y --model " +
                  at::quote(dir / "model.json") + " --out-dir " + at::quote(dir),
              dir)
              .exit_code == 0);
  const auto pred = read_predictions(dir / "predictions.csv");
  REQUIRE(pred.size() == 80);
  const double base = json::parse(at::read_text(dir / "model.json"))["base_score"].get<double>();
  for (double p : pred) CHECK(p == doctest::Approx(1.0 / (1.0 + std::exp(-base))).epsilon(1e-15));
  CHECK(std::set<double>(pred.begin(), pred.end()).size() == 1);
}

TEST_CASE("CLI: partial-x training logs the first trees") {
  const auto dir = at::temp_dir("cli_partial");
  const std::string data = data_csv(dir);
  REQUIRE(cli("train --data " + data + " --target y --n-trees 6 --partial-x 2 --out-dir " +
                  at::quote(dir),
              dir)
              .exit_code == 0);
  const json m = json::parse(at::read_text(dir / "model.json"));
  REQUIRE(m["constraint_log"].size() == 6);
  for (std::size_t t = 0; t < 6; ++t) CHECK(m["constraint_log"][t].is_null() == (t >= 2));
}

TEST_CASE("CLI: tune and benchmark are deterministic") {
  const auto dir = at::temp_dir("cli_bench");
  const std::string data = data_csv(dir);
  at::write_text(dir / "cfg.json", R"({
    "seed": 4,
    "grid": {"n_trees": [10, 20], "max_depth": [2, 3], "learning_rate": [0.3]},
    "benchmark": {"partial_x_list": [5, 10], "random_runs": 2}
  })");
  for (const char* sub : {"a", "b"}) {
    const auto out = dir / sub;
    auto r = cli("tune --data " + data + " --target y --config " + at::quote(dir / "cfg.json") +
                     " --out-dir " + at::quote(out),
                 dir);
    REQUIRE(r.exit_code == 0);
    r = cli("benchmark --data " + data + " --target y --config " +
                at::quote(dir / "cfg.json") + " --out-dir " + at::quote(out),
            dir);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("interaction_10") != std::string::npos);
    CHECK(r.out.find("change=") != std::string::npos);
  }
  for (const char* file : {"params.json", "report.json", "report.csv"}) {
    CHECK(at::read_text(dir / "a" / file) == at::read_text(dir / "b" / file));
  }
  const json report = json::parse(at::read_text(dir / "a" / "report.json"));
  std::vector<std::string> ids;
  for (const auto& v : report["variants"]) ids.push_back(v["id"]);
  CHECK(ids == std::vector<std::string>{"baseline", "full_interaction", "interaction_5",
                                        "interaction_10", "random_interaction",
                                        "random_interaction_1", "random_interaction_2"});
  CHECK(report["seeds"]["split"] == 4);
  CHECK(report["dataset"] == "data");
  const json params = json::parse(at::read_text(dir / "a" / "params.json"));
  CHECK(params["learning_rate"] == 0.3);
}
