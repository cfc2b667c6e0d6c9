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

#ifndef FIBOOST_BOOST_HPP_
#define FIBOOST_BOOST_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "data.hpp"
#include "partition.hpp"
#include "wrapper.hpp"

namespace fiboost {

struct TrainParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 3;
  double learning_rate = 0.1;
  double lambda = 1.0;  // L2 penalty on leaf weights
  double gamma = 0.0;   // subtracted from every split gain
  std::size_t min_child_samples = 1;
  double min_child_hessian = 1e-6;
  // Defaults to the target mean (regression) or the log-odds of the clamped
  // target mean (classification), computed on the training rows.
  std::optional<double> base_score;
  std::uint64_t seed = 0;

  void validate() const;

  friend bool operator==(const TrainParams&, const TrainParams&) = default;
};

// First and second derivatives of the loss per training row.
struct GradHess {
  std::vector<double> g;
  std::vector<double> h;
};

double sigmoid(double raw);

// Squared loss: g = raw - y, h = 1. Logistic: g = p - y, h = p(1 - p) with
// p = sigmoid(raw); h is floored at kMinHessian so it stays positive.
GradHess grad_hess(Task task, std::span<const double> y, std::span<const double> raw);
inline constexpr double kMinHessian = 1e-16;

// -G / (H + lambda). Throws DataError when H + lambda is not positive.
double leaf_weight(double sum_grad, double sum_hess, double lambda);

// 0.5 * [GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)] - gamma.
double split_gain(double gl, double hl, double gr, double hr, double lambda,
                  double gamma);

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
  RowIndexSet left_rows;
  RowIndexSet right_rows;
};

// Exact greedy search over `allowed` features. `gh` is aligned with `rows`.
// Thresholds sit midway between consecutive distinct values; rows with
// x < threshold go left. Returns the best split with positive gain, ties
// broken by lower feature index, then lower threshold.
std::optional<SplitCandidate> best_split(const RowIndexSet& rows,
                                         std::span<const std::size_t> allowed,
                                         const GradHess& gh, const Dataset& ds,
                                         const TrainParams& params);

struct Node {
  bool is_leaf = true;
  std::size_t feature = 0;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double weight = 0.0;

  static Node leaf(double weight) { return Node{true, 0, 0.0, -1, -1, weight}; }
  static Node split(std::size_t feature, double threshold, std::int32_t left,
                    std::int32_t right) {
    return Node{false, feature, threshold, left, right, 0.0};
  }

  friend bool operator==(const Node&, const Node&) = default;
};

struct Tree {
  std::vector<Node> nodes;  // pre-order; nodes[root] is the root
  std::size_t root = 0;
  std::optional<std::size_t> used_group;

  // Leaf weight reached by `row` of `ds`.
  double predict(const Dataset& ds, std::size_t row) const;
  // Length of the longest root-to-leaf path.
  std::size_t depth() const;
  // Split features along each root-to-leaf path, one entry per leaf.
  std::vector<std::vector<std::size_t>> path_features() const;

  friend bool operator==(const Tree&, const Tree&) = default;
};

// Depth-first growth to params.max_depth. The root may split on any feature;
// with a partition, every node below the root is restricted to the group of
// the root's split feature.
Tree grow_tree(const RowIndexSet& rows, const GradHess& gh, const Dataset& ds,
               const TrainParams& params,
               const std::optional<ConstraintPartition>& partition = std::nullopt);

struct NoConstraints {
  friend bool operator==(const NoConstraints&, const NoConstraints&) = default;
};
struct FixedConstraints {
  ConstraintPartition partition;
  friend bool operator==(const FixedConstraints&, const FixedConstraints&) = default;
};
// Tree 1 uses first_tree_partition; trees 2..first_x each rediscover a
// partition from the current negative gradients; later trees are free.
struct PerResidualConstraints {
  std::size_t first_x = 1;
  WrapperConfig wrapper;
  ConstraintPartition first_tree_partition;
};
using ConstraintSchedule =
    std::variant<NoConstraints, FixedConstraints, PerResidualConstraints>;

void validate_schedule(const ConstraintSchedule& schedule, std::size_t n_features);

struct Ensemble {
  Task task = Task::kRegression;
  TrainParams params;
  double base_score = 0.0;
  std::vector<Tree> trees;
  // Partition in force for each tree (empty when unconstrained).
  std::vector<std::optional<ConstraintPartition>> constraint_log;
  std::vector<std::string> feature_names;

  std::size_t n_features() const { return feature_names.size(); }
};

double default_base_score(Task task, std::span<const double> y);

Ensemble train(const Dataset& ds, const RowIndexSet& rows, const TrainParams& params,
               const ConstraintSchedule& schedule = NoConstraints{});

// base_score + learning_rate * (sum of leaf weights), accumulated tree by tree.
std::vector<double> predict_raw(const Ensemble& ens, const Dataset& ds,
                                const RowIndexSet& rows);
// Raw score for regression, sigmoid(raw) for classification.
std::vector<double> predict(const Ensemble& ens, const Dataset& ds,
                            const RowIndexSet& rows);

}  // namespace fiboost

#endif  // FIBOOST_BOOST_HPP_
