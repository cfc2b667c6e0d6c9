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

#include "experiment.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "linmod.hpp"
#include "random.hpp"

namespace fiboost {
namespace {

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<double> gather(std::span<const double> values, const RowIndexSet& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(values[r]);
  return out;
}

}  // namespace

void TuningGrid::validate() const {
  if (n_trees.empty() || max_depth.empty() || learning_rate.empty()) {
    throw ConfigError("tuning grid lists must be non-empty");
  }
  for (std::size_t d : max_depth) {
    if (d < 1) throw ConfigError("tuning grid max_depth entries must be >= 1");
  }
  for (double lr : learning_rate) {
    if (!(lr > 0.0 && lr <= 1.0)) {
      throw ConfigError("tuning grid learning_rate entries must lie in (0, 1]");
    }
  }
}

double score_predictions(Task task, std::span<const double> y,
                         std::span<const double> pred) {
  return task == Task::kRegression ? r_squared(y, pred) : accuracy(y, pred);
}

double rmse(std::span<const double> y, std::span<const double> pred) {
  if (y.size() != pred.size() || y.empty()) throw DataError("rmse needs equal, non-zero lengths");
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (y[i] - pred[i]) * (y[i] - pred[i]);
  return std::sqrt(ss / static_cast<double>(y.size()));
}

TrainParams tune(const Dataset& ds, const RowIndexSet& train_rows,
                 const TuningGrid& grid, std::size_t k, std::uint64_t seed,
                 const TrainParams& base) {
  grid.validate();
  const auto trees = sorted_unique(grid.n_trees);
  const auto depths = sorted_unique(grid.max_depth);
  const auto rates = sorted_unique(grid.learning_rate);
  const std::size_t max_trees = trees.back();
  const FoldPlan plan = kfold(train_rows.size(), k, derive_seed(seed, seed_stream::kTuneFolds));

  // score_sum[t][d][r], summed over folds in fold order.
  std::vector<double> score_sum(trees.size() * depths.size() * rates.size(), 0.0);
  auto cell = [&](std::size_t t, std::size_t d, std::size_t r) {
    return (t * depths.size() + d) * rates.size() + r;
  };

  for (const Fold& fold : plan.folds) {
    const RowIndexSet fit_rows = train_rows.select(fold.train.indices());
    const RowIndexSet val_rows = train_rows.select(fold.validation.indices());
    const auto y_val = gather(ds.target(), val_rows);
    for (std::size_t d = 0; d < depths.size(); ++d) {
      for (std::size_t r = 0; r < rates.size(); ++r) {
        TrainParams params = base;
        params.n_trees = max_trees;
        params.max_depth = depths[d];
        params.learning_rate = rates[r];
        // Trees never depend on n_trees, so every prefix of one long run is
        // the model that a shorter run would have produced.
        const Ensemble ens = train(ds, fit_rows, params);
        std::vector<double> raw(val_rows.size(), ens.base_score);
        std::size_t next = 0;
        for (std::size_t t = 0; t <= max_trees && next < trees.size(); ++t) {
          if (t == trees[next]) {
            std::vector<double> pred = raw;
            if (ds.task() == Task::kBinaryClassification) {
              for (double& v : pred) v = sigmoid(v);
            }
            score_sum[cell(next, d, r)] += score_predictions(ds.task(), y_val, pred);
            ++next;
          }
          if (t == max_trees) break;
          for (std::size_t i = 0; i < val_rows.size(); ++i) {
            raw[i] += params.learning_rate * ens.trees[t].predict(ds, val_rows[i]);
          }
        }
      }
    }
  }

  TrainParams best = base;
  bool have_best = false;
  double best_score = 0.0;
  for (std::size_t t = 0; t < trees.size(); ++t) {
    for (std::size_t d = 0; d < depths.size(); ++d) {
      for (std::size_t r = 0; r < rates.size(); ++r) {
        const double mean = score_sum[cell(t, d, r)] / static_cast<double>(plan.folds.size());
        if (!have_best || mean > best_score) {
          have_best = true;
          best_score = mean;
          best.n_trees = trees[t];
          best.max_depth = depths[d];
          best.learning_rate = rates[r];
        }
      }
    }
  }
  return best;
}

ConstraintPartition random_partition(std::size_t n_features, std::size_t n_groups,
                                     std::uint64_t seed) {
  if (n_groups < 1 || n_groups > n_features) {
    throw ConfigError("random partition needs 1 <= n_groups <= n_features (n_groups=" +
                      std::to_string(n_groups) + ", n_features=" +
                      std::to_string(n_features) + ")");
  }
  Rng rng(seed);
  const auto perm = rng.permutation(n_features);
  std::vector<std::vector<std::size_t>> groups(n_groups);
  for (std::size_t i = 0; i < perm.size(); ++i) groups[i % n_groups].push_back(perm[i]);
  return ConstraintPartition(std::move(groups));
}

std::string Variant::id() const {
  switch (kind) {
    case Kind::kBaseline:
      return "baseline";
    case Kind::kFullInteraction:
      return "full_interaction";
    case Kind::kPartialInteraction:
      return "interaction_" + std::to_string(partial_x);
    case Kind::kRandomInteraction:
      return "random_interaction";
  }
  return "unknown";
}

VariantFit build_variant(const Variant& variant, const Dataset& ds,
                         const RowIndexSet& train_rows, const TrainParams& params,
                         const WrapperConfig& wrapper_cfg,
                         const std::optional<ConstraintPartition>& original_partition) {
  auto original = [&] {
    return original_partition ? *original_partition
                              : discover_constraints(ds, train_rows, wrapper_cfg);
  };

  ConstraintSchedule schedule = NoConstraints{};
  switch (variant.kind) {
    case Variant::Kind::kBaseline:
      break;
    case Variant::Kind::kFullInteraction:
      schedule = FixedConstraints{original()};
      break;
    case Variant::Kind::kPartialInteraction:
      if (variant.partial_x < 1) throw ConfigError("partial interaction needs x >= 1");
      schedule = PerResidualConstraints{variant.partial_x, wrapper_cfg, original()};
      break;
    case Variant::Kind::kRandomInteraction:
      schedule = FixedConstraints{
          random_partition(ds.n_features(), variant.random_groups, variant.random_seed)};
      break;
  }
  Ensemble ens = train(ds, train_rows, params, schedule);
  return {std::move(schedule), std::move(ens)};
}

void BenchmarkConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0, 1)");
  }
  grid.validate();
  if (k < 2) throw ConfigError("benchmark k must be at least 2");
  wrapper.validate();
  for (std::size_t x : partial_x_list) {
    if (x < 1) throw ConfigError("partial_x_list entries must be >= 1");
  }
  if (random_groups < 1) throw ConfigError("random_groups must be at least 1");
}

const VariantEntry* BenchmarkReport::find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::optional<double> percent_change(double variant, double baseline) {
  if (baseline == 0.0) return std::nullopt;
  return (variant - baseline) / std::abs(baseline) * 100.0;
}

BenchmarkReport benchmark(const Dataset& ds, const BenchmarkConfig& cfg,
                          const std::string& dataset_name) {
  cfg.validate();
  const auto [train_rows, test_rows] = split_rows(ds.n_rows(), cfg.test_fraction, cfg.split_seed);
  const auto y_test = gather(ds.target(), test_rows);

  BenchmarkReport report;
  report.dataset_name = dataset_name;
  report.task = ds.task();
  report.metric = ds.task() == Task::kRegression ? "r2" : "accuracy";
  report.n_train = train_rows.size();
  report.n_test = test_rows.size();
  report.split_seed = cfg.split_seed;
  report.tune_seed = cfg.tune_seed;
  report.wrapper_seed = cfg.wrapper.seed;
  report.random_seed = cfg.random_seed;
  report.tuned = tune(ds, train_rows, cfg.grid, cfg.k, cfg.tune_seed, cfg.base_params);
  report.discovered = discover_constraints(ds, train_rows, cfg.wrapper);

  auto evaluate = [&](const Variant& v, std::string id, std::string detail) {
    const VariantFit fit = build_variant(v, ds, train_rows, report.tuned, cfg.wrapper,
                                         report.discovered);
    const auto pred = predict(fit.ensemble, ds, test_rows);
    VariantEntry e;
    e.id = std::move(id);
    e.constraint_detail = std::move(detail);
    e.test_score = score_predictions(ds.task(), y_test, pred);
    if (ds.task() == Task::kRegression) e.test_rmse = rmse(y_test, pred);
    return e;
  };

  const std::string discovered = report.discovered.to_string();
  report.entries.push_back(evaluate(Variant::baseline(), "baseline", "none"));
  report.entries.push_back(
      evaluate(Variant::full_interaction(), "full_interaction", discovered));
  for (std::size_t x : cfg.partial_x_list) {
    const Variant v = Variant::partial_interaction(x);
    report.entries.push_back(evaluate(
        v, v.id(), "first " + std::to_string(x) + " trees; tree 1 " + discovered));
  }
  std::vector<VariantEntry> runs;
  const std::uint64_t random_base = derive_seed(cfg.random_seed, seed_stream::kRandomPartition);
  for (std::size_t i = 0; i < cfg.random_runs; ++i) {
    const Variant v = Variant::random_interaction(
        std::min(cfg.random_groups, ds.n_features()), derive_seed(random_base, i));
    const auto partition = random_partition(ds.n_features(), v.random_groups, v.random_seed);
    runs.push_back(evaluate(v, "random_interaction_" + std::to_string(i + 1),
                            partition.to_string()));
  }
  if (!runs.empty()) {
    VariantEntry mean;
    mean.id = "random_interaction";
    mean.constraint_detail = "mean of " + std::to_string(runs.size()) + " runs";
    double sum = 0.0;
    double rmse_sum = 0.0;
    for (const auto& r : runs) {
      sum += r.test_score;
      if (r.test_rmse) rmse_sum += *r.test_rmse;
    }
    mean.test_score = sum / static_cast<double>(runs.size());
    if (ds.task() == Task::kRegression) {
      mean.test_rmse = rmse_sum / static_cast<double>(runs.size());
    }
    report.entries.push_back(std::move(mean));
    for (auto& r : runs) report.entries.push_back(std::move(r));
  }

  const double base_score = report.entries.front().test_score;
  for (auto& e : report.entries) e.percent_change = percent_change(e.test_score, base_score);
  report.entries.front().percent_change = 0.0;
  return report;
}

}  // namespace fiboost
