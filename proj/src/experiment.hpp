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

#ifndef FIBOOST_EXPERIMENT_HPP_
#define FIBOOST_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boost.hpp"
#include "data.hpp"
#include "partition.hpp"
#include "wrapper.hpp"

namespace fiboost {

struct TuningGrid {
  std::vector<std::size_t> n_trees{50, 100, 200, 300};
  std::vector<std::size_t> max_depth{3, 4, 6};
  std::vector<double> learning_rate{0.05, 0.1, 0.3};

  void validate() const;
};

// Test-set score: R^2 for regression, accuracy for classification.
double score_predictions(Task task, std::span<const double> y,
                         std::span<const double> pred);
double rmse(std::span<const double> y, std::span<const double> pred);

// k-fold grid search with unconstrained boosting; folds come from
// derive_seed(seed, seed_stream::kTuneFolds). Every field of `base`
// other than n_trees, max_depth and learning_rate is kept. The best mean
// validation score wins; ties go to fewer trees, then shallower trees, then
// the lower learning rate.
TrainParams tune(const Dataset& ds, const RowIndexSet& train_rows,
                 const TuningGrid& grid, std::size_t k, std::uint64_t seed,
                 const TrainParams& base = {});

// Seeded shuffle of [0, n_features) dealt round-robin into n_groups groups.
ConstraintPartition random_partition(std::size_t n_features, std::size_t n_groups,
                                     std::uint64_t seed);

struct Variant {
  enum class Kind { kBaseline, kFullInteraction, kPartialInteraction, kRandomInteraction };
  Kind kind = Kind::kBaseline;
  std::size_t partial_x = 0;      // kPartialInteraction
  std::size_t random_groups = 2;  // kRandomInteraction
  std::uint64_t random_seed = 0;  // kRandomInteraction

  static Variant baseline() { return {}; }
  static Variant full_interaction() { return {Kind::kFullInteraction, 0, 2, 0}; }
  static Variant partial_interaction(std::size_t x) {
    return {Kind::kPartialInteraction, x, 2, 0};
  }
  static Variant random_interaction(std::size_t groups, std::uint64_t seed) {
    return {Kind::kRandomInteraction, 0, groups, seed};
  }

  // baseline | full_interaction | interaction_<x> | random_interaction
  std::string id() const;
};

struct VariantFit {
  ConstraintSchedule schedule;
  Ensemble ensemble;
};

// `original_partition`, when given, is used as the wrapper result on the
// original target instead of rediscovering it.
VariantFit build_variant(const Variant& variant, const Dataset& ds,
                         const RowIndexSet& train_rows, const TrainParams& params,
                         const WrapperConfig& wrapper_cfg,
                         const std::optional<ConstraintPartition>& original_partition =
                             std::nullopt);

struct BenchmarkConfig {
  double test_fraction = 0.25;
  std::uint64_t split_seed = 0;
  TuningGrid grid;
  std::size_t k = 3;
  std::uint64_t tune_seed = 0;
  WrapperConfig wrapper;
  std::vector<std::size_t> partial_x_list{1, 5, 10, 20, 30};
  std::size_t random_runs = 5;
  std::size_t random_groups = 2;
  std::uint64_t random_seed = 0;
  // Fixed TrainParams fields (lambda, gamma, ...); the grid fills the rest.
  TrainParams base_params;

  void validate() const;
};

struct VariantEntry {
  std::string id;
  std::string constraint_detail;
  double test_score = 0.0;
  std::optional<double> test_rmse;  // regression only
  std::optional<double> percent_change;  // empty when the baseline score is 0
};

struct BenchmarkReport {
  std::string dataset_name;
  Task task = Task::kRegression;
  std::string metric;  // "r2" or "accuracy"
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  TrainParams tuned;
  ConstraintPartition discovered;
  // baseline, full_interaction, interaction_<x>..., random_interaction (the
  // mean over runs), then one random_interaction_<i> entry per run.
  std::vector<VariantEntry> entries;
  std::uint64_t split_seed = 0;
  std::uint64_t tune_seed = 0;
  std::uint64_t wrapper_seed = 0;
  std::uint64_t random_seed = 0;

  const VariantEntry* find(const std::string& id) const;
};

// (variant - baseline) / |baseline| * 100; empty when baseline is 0.
std::optional<double> percent_change(double variant, double baseline);

BenchmarkReport benchmark(const Dataset& ds, const BenchmarkConfig& cfg,
                          const std::string& dataset_name);

}  // namespace fiboost

#endif  // FIBOOST_EXPERIMENT_HPP_
