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

// Acceptance checks for criteria 1-9. Prints one line per criterion and
// exits nonzero when a hard criterion fails.
//
// usage: fiboost_acceptance <path-to-fiboost-cli>
// Criterion 7 reads FIBOOST_CLEVE_CSV (or tests/data/cleve.csv); the target
// column is FIBOOST_CLEVE_TARGET or the last header column.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "boost.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "linmod.hpp"
#include "random.hpp"
#include "test_util.hpp"
#include "wrapper.hpp"

namespace fs = std::filesystem;
using namespace fiboost;

namespace {

enum class Outcome { kPass, kFail, kWarn, kSkip };

struct Result {
  Outcome outcome;
  std::string detail;
};

const char* label(Outcome o) {
  switch (o) {
    case Outcome::kPass:
      return "PASS";
    case Outcome::kFail:
      return "FAIL";
    case Outcome::kWarn:
      return "WARN";
    case Outcome::kSkip:
      return "SKIP";
  }
  return "?";
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

// y = x0*x1 + x2*x3 + 0.1*x4 + N(0, 0.1^2), six U(-1, 1) features.
Dataset criterion4_data(std::uint64_t seed, std::size_t n = 2000) {
  return testing::synthetic(
      n, 6, seed, [](const auto& r) { return r[0] * r[1] + r[2] * r[3] + 0.1 * r[4]; }, 0.1);
}

double test_rmse(const Ensemble& ens, const Dataset& ds, const RowIndexSet& test) {
  const auto pred = predict(ens, ds, test);
  return rmse(testing::gather(ds.target(), test), pred);
}

Result constraint_enforcement() {
  Timer timer;
  std::mt19937_64 rng(1001);
  std::size_t violations = 0, paths = 0;
  for (int run = 0; run < 100; ++run) {
    const std::size_t p = 2 + rng() % 9;
    const std::size_t n = 50 + rng() % 451;
    const Task task = run % 3 == 0 ? Task::kBinaryClassification : Task::kRegression;
    const Dataset ds = testing::random_small(rng, n, p, task, run % 2 ? 6 : 0);
    TrainParams params;
    params.n_trees = 1 + rng() % 20;
    params.max_depth = 1 + rng() % 6;
    params.learning_rate = 0.05 + 0.95 * static_cast<double>(rng() % 100) / 100.0;
    params.lambda = static_cast<double>(rng() % 3);
    params.gamma = static_cast<double>(rng() % 2) * 0.01;
    params.min_child_samples = 1 + rng() % 5;
    const ConstraintPartition part = random_partition(p, 1 + rng() % p, rng());
    const Ensemble ens = train(ds, RowIndexSet::all(n), params, FixedConstraints{part});
    for (const Tree& tree : ens.trees) {
      for (const auto& path : tree.path_features()) {
        ++paths;
        if (path.empty()) continue;
        const auto g = part.group_of(path.front());
        for (std::size_t f : path) {
          if (part.group_of(f) != g) {
            ++violations;
            break;
          }
        }
      }
    }
  }
  const double secs = timer.seconds();
  const bool ok = violations == 0 && secs < 60.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("100 runs, %zu paths, %zu mixing groups, %.1f s", paths, violations, secs)};
}

Result stump_oracle() {
  std::mt19937_64 rng(2002);
  int mismatches = 0, compared = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + rng() % 96;
    const std::size_t p = 1 + rng() % 5;
    const Task task = trial % 2 ? Task::kBinaryClassification : Task::kRegression;
    const Dataset ds = testing::random_small(rng, n, p, task);
    for (double lambda : {0.0, 1.0}) {
      TrainParams params;
      params.n_trees = 1;
      params.max_depth = 1;
      params.lambda = lambda;
      params.learning_rate = 1.0;
      const RowIndexSet rows = RowIndexSet::all(n);
      const Ensemble ens = train(ds, rows, params);
      const std::vector<double> raw(n, ens.base_score);
      const GradHess gh = grad_hess(task, ds.target(), raw);
      const auto oracle = testing::brute_force_stump(ds, rows, gh.g, gh.h, params);
      const Tree& tree = ens.trees.front();
      const Node& root = tree.nodes[tree.root];
      const double tol = lambda == 0.0 ? 0.0 : 1e-10;
      bool ok = root.is_leaf == !oracle.found;
      if (ok && oracle.found) {
        const Node& l = tree.nodes[static_cast<std::size_t>(root.left)];
        const Node& r = tree.nodes[static_cast<std::size_t>(root.right)];
        ok = root.feature == oracle.feature && root.threshold == oracle.threshold &&
             std::abs(l.weight - oracle.left_weight) <= tol &&
             std::abs(r.weight - oracle.right_weight) <= tol;
      } else if (ok) {
        ok = std::abs(root.weight - oracle.root_weight) <= tol;
      }
      ++compared;
      mismatches += ok ? 0 : 1;
    }
  }
  return {mismatches == 0 ? Outcome::kPass : Outcome::kFail,
          fmt("%d stumps (lambda 0 exact, lambda 1 to 1e-10), %d mismatches", compared,
              mismatches)};
}

Result linear_oracles() {
  std::mt19937_64 rng(3003);
  std::normal_distribution<double> z(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  auto random_matrix = [&](Eigen::Index n, Eigen::Index p) {
    Eigen::MatrixXd m(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < p; ++j) m(i, j) = z(rng);
    return m;
  };
  auto design = [](const Eigen::MatrixXd& cols) {
    DesignMatrix d;
    d.columns = cols;
    for (Eigen::Index j = 0; j < cols.cols(); ++j) {
      d.spec.push_back(Term{static_cast<std::size_t>(j), std::nullopt});
    }
    return d;
  };

  double worst_ols = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const Eigen::Index n = 4 + static_cast<Eigen::Index>(rng() % 7);
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng() % 4);
    Eigen::MatrixXd x = random_matrix(n, p);
    if (p >= 2 && inst % 2 == 0) x.col(1) = x.col(0);
    const Eigen::VectorXd y = random_matrix(n, 1).col(0);
    const LinearModel m = fit_ols(design(x), std::span<const double>(y.data(), y.size()));
    const auto fitted = predict(m, design(x));
    Eigen::MatrixXd a(n, p + 1);
    a.col(0).setOnes();
    a.rightCols(p) = x;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    const Eigen::VectorXd oracle = a * svd.solve(y);
    for (Eigen::Index i = 0; i < n; ++i) {
      worst_ols = std::max(worst_ols, std::abs(fitted[static_cast<std::size_t>(i)] - oracle[i]));
    }
  }

  double worst_grad = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng() % 4);
    const Eigen::MatrixXd x = random_matrix(15, p);
    std::vector<double> y(15);
    for (auto& v : y) v = coin(rng) ? 1.0 : 0.0;
    const DesignMatrix d = design(x);
    for (int point = 0; point < 10; ++point) {
      Eigen::VectorXd theta(p + 1);
      for (Eigen::Index j = 0; j <= p; ++j) theta[j] = z(rng);
      const Eigen::VectorXd grad = logistic_gradient(d, y, kDefaultLogisticRidge, theta);
      for (Eigen::Index j = 0; j <= p; ++j) {
        Eigen::VectorXd up = theta, down = theta;
        up[j] += 1e-5;
        down[j] -= 1e-5;
        const double fd = (logistic_objective(d, y, kDefaultLogisticRidge, up) -
                           logistic_objective(d, y, kDefaultLogisticRidge, down)) /
                          2e-5;
        worst_grad =
            std::max(worst_grad, std::abs(fd - grad[j]) / std::max(1.0, std::abs(grad[j])));
      }
    }
  }
  const bool ok = worst_ols <= 1e-6 && worst_grad <= 1e-4;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("OLS max |fitted - min-norm| %.2e over 50 instances; logistic gradient max rel "
              "err %.2e over 500 points",
              worst_ols, worst_grad)};
}

Result wrapper_recovery() {
  Timer timer;
  int hits = 0;
  std::string seen;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset ds = criterion4_data(40000 + seed);
    WrapperConfig cfg;
    cfg.seed = seed;
    const ConstraintPartition p = discover_constraints(ds, RowIndexSet::all(ds.n_rows()), cfg);
    const auto g0 = p.group_of(0), g2 = p.group_of(2);
    const bool ok = g0 == p.group_of(1) && g2 == p.group_of(3) && g0 != g2;
    hits += ok ? 1 : 0;
    if (seed == 0) seen = p.to_string();
  }
  const double secs = timer.seconds();
  return {hits >= 8 && secs < 120.0 ? Outcome::kPass : Outcome::kFail,
          fmt("%d/10 seeds recover {0,1} and {2,3} (seed 0: %s), %.1f s", hits, seen.c_str(),
              secs)};
}

TuningGrid acceptance_grid() {
  TuningGrid g;
  g.n_trees = {50, 100, 200};
  g.max_depth = {3, 4};
  g.learning_rate = {0.1, 0.3};
  return g;
}

Result constraint_benefit() {
  int hits = 0;
  double full_sum = 0.0, mis_sum = 0.0;
  const ConstraintPartition mis({{0, 2}, {1, 3}, {4}, {5}});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset ds = criterion4_data(50000 + seed);
    const auto [train_rows, test_rows] = split_rows(ds.n_rows(), 0.25, seed);
    const TrainParams tuned = tune(ds, train_rows, acceptance_grid(), 3, seed);
    WrapperConfig cfg;
    cfg.seed = seed;
    const ConstraintPartition found = discover_constraints(ds, train_rows, cfg);
    const double full = test_rmse(train(ds, train_rows, tuned, FixedConstraints{found}), ds, test_rows);
    const double wrong = test_rmse(train(ds, train_rows, tuned, FixedConstraints{mis}), ds, test_rows);
    hits += full <= wrong ? 1 : 0;
    full_sum += full;
    mis_sum += wrong;
  }
  return {hits >= 8 ? Outcome::kPass : Outcome::kFail,
          fmt("%d/10 seeds full_interaction RMSE <= mis-specified; mean RMSE %.4f vs %.4f", hits,
              full_sum / 10, mis_sum / 10)};
}

Result partial_vs_full() {
  int hits5 = 0, hits10 = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset ds = testing::synthetic(
        2000, 6, 60000 + seed, [](const auto& r) { return r[0] * r[1] + 0.3 * r[2] * r[3]; },
        0.1);
    const auto [train_rows, test_rows] = split_rows(ds.n_rows(), 0.25, seed);
    TrainParams params;
    params.n_trees = 100;
    params.max_depth = 2;
    params.learning_rate = 0.1;
    WrapperConfig cfg;
    cfg.seed = seed;
    const ConstraintPartition found = discover_constraints(ds, train_rows, cfg);
    const double full = test_rmse(
        build_variant(Variant::full_interaction(), ds, train_rows, params, cfg, found).ensemble,
        ds, test_rows);
    const double p5 = test_rmse(
        build_variant(Variant::partial_interaction(5), ds, train_rows, params, cfg, found).ensemble,
        ds, test_rows);
    const double p10 = test_rmse(
        build_variant(Variant::partial_interaction(10), ds, train_rows, params, cfg, found)
            .ensemble,
        ds, test_rows);
    hits5 += p5 <= full ? 1 : 0;
    hits10 += p10 <= full ? 1 : 0;
  }
  const bool ok = hits5 >= 6 && hits10 >= 6;
  return {ok ? Outcome::kPass : Outcome::kWarn,
          fmt("interaction_5 <= full in %d/10 seeds, interaction_10 <= full in %d/10 seeds%s",
              hits5, hits10, ok ? "" : " (soft check)")};
}

std::optional<fs::path> cleve_path() {
  if (const char* env = std::getenv("FIBOOST_CLEVE_CSV")) {
    if (fs::exists(env)) return fs::path(env);
  }
  const fs::path local = fs::path(FIBOOST_SOURCE_DIR) / "tests" / "data" / "cleve.csv";
  if (fs::exists(local)) return local;
  return std::nullopt;
}

Result table1_anchor() {
  const auto path = cleve_path();
  if (!path) return {Outcome::kSkip, "cleve CSV not found (set FIBOOST_CLEVE_CSV)"};
  std::string target;
  if (const char* env = std::getenv("FIBOOST_CLEVE_TARGET")) {
    target = env;
  } else {
    std::ifstream in(*path);
    std::string header;
    std::getline(in, header);
    while (!header.empty() && (header.back() == '\r' || header.back() == '\n')) header.pop_back();
    target = header.substr(header.find_last_of(',') + 1);
  }
  const Dataset ds = load_csv(*path, target, Task::kBinaryClassification);

  double baseline_sum = 0.0;
  int splits = 0, winners = 0, wins_total = 0;
  for (std::uint64_t split_seed = 0; split_seed < 5; ++split_seed, ++splits) {
    const auto [train_rows, test_rows] = split_rows(ds.n_rows(), 0.25, split_seed);
    const auto y_test = testing::gather(ds.target(), test_rows);
    const TrainParams tuned = tune(ds, train_rows, TuningGrid{}, 3, split_seed);
    const double base =
        100.0 * accuracy(y_test, predict(train(ds, train_rows, tuned), ds, test_rows));
    baseline_sum += base;
    int wins = 0;
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto part = random_partition(ds.n_features(), std::min<std::size_t>(2, ds.n_features()),
                                         derive_seed(split_seed, i));
      const Ensemble ens = train(ds, train_rows, tuned, FixedConstraints{part});
      wins += 100.0 * accuracy(y_test, predict(ens, ds, test_rows)) > base ? 1 : 0;
    }
    wins_total += wins;
    winners += wins > 0 ? 1 : 0;
  }
  const double mean_base = baseline_sum / splits;
  const bool ok = std::abs(mean_base - 84.615385) <= 5.0 && winners > 0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("mean baseline accuracy %.2f%% over %d splits; %d of %d random partitions beat "
              "baseline",
              mean_base, splits, wins_total, 20 * splits)};
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = "\"" + cli + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result cli_determinism(const std::string& cli) {
  const fs::path dir = fs::temp_directory_path() / "fiboost_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_csv(criterion4_data(70000, 600), dir / "data.csv");
  {
    std::ofstream(dir / "groups.json") << "[[0,1],[2,3],[4],[5]]";
    std::ofstream(dir / "cfg.json")
        << R"({"seed": 11, "grid": {"n_trees": [20, 40], "max_depth": [2, 3], "learning_rate": [0.3]},)"
        << R"( "benchmark": {"partial_x_list": [1, 5], "random_runs": 2}})";
  }
  const std::string data = "--data \"" + (dir / "data.csv").string() + "\" --target target";
  const std::string cfg = " --config \"" + (dir / "cfg.json").string() + "\"";
  int files = 0, diffs = 0, failures = 0;
  for (const char* run : {"a", "b"}) {
    const fs::path out = dir / run;
    const std::string o = " --out-dir \"" + out.string() + "\"";
    failures += run_cli(cli, "discover " + data + cfg + o) != 0;
    failures += run_cli(cli, "tune " + data + cfg + o) != 0;
    failures += run_cli(cli, "benchmark " + data + cfg + o) != 0;
    failures += run_cli(cli, "train " + data + cfg + " --n-trees 30 --constraints \"" +
                                 (dir / "groups.json").string() + "\"" + o) != 0;
    failures += run_cli(cli, "predict " + data + cfg + " --model \"" +
                                 (out / "model.json").string() + "\"" + o) != 0;
    fs::rename(out / "model.json", out / "model_fixed.json");
    fs::rename(out / "predictions.csv", out / "predictions_fixed.csv");
    failures += run_cli(cli, "train " + data + cfg + " --n-trees 30 --partial-x 3" + o) != 0;
    failures += run_cli(cli, "predict " + data + cfg + " --model \"" +
                                 (out / "model.json").string() + "\"" + o) != 0;
  }
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    ++files;
    const fs::path other = dir / "b" / entry.path().filename();
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++diffs;
  }
  const bool ok = failures == 0 && diffs == 0 && files == 9;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("5 commands run twice: %d output files compared, %d differ, %d failed runs", files,
              diffs, failures)};
}

Result mse_monotonicity() {
  std::mt19937_64 rng(9009);
  int bad = 0;
  std::size_t rounds = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset ds = testing::random_small(rng, 30 + rng() % 300, 1 + rng() % 8,
                                             Task::kRegression, trial % 2 ? 5 : 0);
    TrainParams params;
    params.n_trees = 10 + rng() % 60;
    params.max_depth = 1 + rng() % 5;
    params.learning_rate = 0.05 + 0.95 * static_cast<double>(rng() % 100) / 100.0;
    params.lambda = 0.0;
    params.gamma = 0.0;
    const Ensemble ens = train(ds, RowIndexSet::all(ds.n_rows()), params);
    std::vector<double> pred(ds.n_rows(), ens.base_score);
    auto mse = [&] {
      double s = 0.0;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        s += (pred[i] - ds.target()[i]) * (pred[i] - ds.target()[i]);
      }
      return s / static_cast<double>(pred.size());
    };
    double prev = mse();
    bool ok = true;
    for (const Tree& tree : ens.trees) {
      for (std::size_t i = 0; i < pred.size(); ++i) {
        pred[i] += params.learning_rate * tree.predict(ds, i);
      }
      const double cur = mse();
      ok = ok && cur <= prev * (1.0 + 1e-12);
      prev = cur;
      ++rounds;
    }
    bad += ok ? 0 : 1;
  }
  return {bad == 0 ? Outcome::kPass : Outcome::kFail,
          fmt("20 datasets, %zu rounds, %d datasets with an MSE increase", rounds, bad)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: fiboost_acceptance <path-to-fiboost-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"constraint enforcement", constraint_enforcement},
      {"stump oracle", stump_oracle},
      {"linear-model oracles", linear_oracles},
      {"wrapper recovery", wrapper_recovery},
      {"constraint benefit", constraint_benefit},
      {"partial vs full", partial_vs_full},
      {"random-partition anchor", table1_anchor},
      {"CLI determinism", [&] { return cli_determinism(cli); }},
      {"training-loss monotonicity", mse_monotonicity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r{Outcome::kFail, ""};
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    if (r.outcome == Outcome::kFail) ++failed;
    std::cout << "criterion " << (i + 1) << " " << label(r.outcome) << " " << criteria[i].first
              << ": " << r.detail << std::endl;
  }
  std::cout << (failed == 0 ? "acceptance: all hard criteria passed"
                            : "acceptance: " + std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
