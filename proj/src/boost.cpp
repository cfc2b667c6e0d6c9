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

#include "boost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "error.hpp"

namespace fiboost {
namespace {

using Pos = std::uint32_t;

// Training rows re-indexed by position, with every feature's positions
// presorted by (value, position). Shared by all trees of one training run.
struct Presorted {
  std::size_t n_positions = 0;
  std::vector<std::vector<double>> values;  // [feature][position]
  std::vector<std::vector<Pos>> order;      // [feature] sorted positions

  Presorted(const Dataset& ds, const RowIndexSet& rows) : n_positions(rows.size()) {
    values.resize(ds.n_features());
    order.resize(ds.n_features());
    for (std::size_t f = 0; f < ds.n_features(); ++f) {
      const auto col = ds.column(f);
      auto& v = values[f];
      v.resize(rows.size());
      for (std::size_t p = 0; p < rows.size(); ++p) v[p] = col[rows[p]];
      auto& o = order[f];
      o.resize(rows.size());
      std::iota(o.begin(), o.end(), Pos{0});
      std::sort(o.begin(), o.end(), [&v](Pos a, Pos b) {
        return v[a] < v[b] || (v[a] == v[b] && a < b);
      });
    }
  }
};

struct FeatureSplit {
  double gain = 0.0;
  double threshold = 0.0;
};

// Scans the boundaries between distinct consecutive values of one feature.
// Returns the best valid boundary (first one on ties).
std::optional<FeatureSplit> scan_feature(std::span<const Pos> sorted,
                                         std::span<const double> x,
                                         const GradHess& gh, double sum_g,
                                         double sum_h, const TrainParams& params) {
  std::optional<FeatureSplit> best;
  double gl = 0.0;
  double hl = 0.0;
  const std::size_t n = sorted.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Pos p = sorted[i];
    gl += gh.g[p];
    hl += gh.h[p];
    const double lo = x[p];
    const double hi = x[sorted[i + 1]];
    if (!(lo < hi)) continue;
    const std::size_t n_left = i + 1;
    const std::size_t n_right = n - n_left;
    if (n_left < params.min_child_samples || n_right < params.min_child_samples) continue;
    const double gr = sum_g - gl;
    const double hr = sum_h - hl;
    if (hl < params.min_child_hessian || hr < params.min_child_hessian) continue;
    if (hl + params.lambda <= 0.0 || hr + params.lambda <= 0.0) continue;
    const double gain = split_gain(gl, hl, gr, hr, params.lambda, params.gamma);
    if (!best || gain > best->gain) {
      double mid = lo + (hi - lo) / 2.0;
      // Adjacent doubles: the midpoint may round onto `lo`, which would send
      // lo to the right branch.
      if (!(mid > lo)) mid = hi;
      best = FeatureSplit{gain, mid};
    }
  }
  return best;
}

struct NodeSplit {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

std::optional<NodeSplit> find_best(const std::vector<std::size_t>& allowed,
                                   const std::vector<std::vector<Pos>>& sorted,
                                   const Presorted& pre, const GradHess& gh,
                                   double sum_g, double sum_h,
                                   const TrainParams& params) {
  std::optional<NodeSplit> best;
  for (std::size_t a = 0; a < allowed.size(); ++a) {
    const std::size_t f = allowed[a];
    const auto cand = scan_feature(sorted[a], pre.values[f], gh, sum_g, sum_h, params);
    if (cand && (!best || cand->gain > best->gain)) {
      best = NodeSplit{f, cand->threshold, cand->gain};
    }
  }
  if (best && !(best->gain > 0.0)) return std::nullopt;
  return best;
}

// Sums over `positions` in ascending order, so leaf statistics do not depend
// on which feature ordering produced the node.
std::pair<double, double> node_sums(std::span<const Pos> positions, const GradHess& gh) {
  double g = 0.0;
  double h = 0.0;
  for (Pos p : positions) {
    g += gh.g[p];
    h += gh.h[p];
  }
  return {g, h};
}

class TreeBuilder {
 public:
  TreeBuilder(const Presorted& pre, const GradHess& gh, const TrainParams& params,
              const std::optional<ConstraintPartition>& partition)
      : pre_(pre), gh_(gh), params_(params), partition_(partition),
        goes_left_(pre.n_positions) {}

  Tree build() {
    std::vector<std::size_t> allowed(pre_.values.size());
    std::iota(allowed.begin(), allowed.end(), std::size_t{0});
    std::vector<Pos> positions(pre_.n_positions);
    std::iota(positions.begin(), positions.end(), Pos{0});
    std::vector<std::vector<Pos>> sorted = pre_.order;
    grow(std::move(positions), std::move(sorted), allowed, 0);
    return std::move(tree_);
  }

 private:
  std::int32_t grow(std::vector<Pos> positions, std::vector<std::vector<Pos>> sorted,
                    const std::vector<std::size_t>& allowed, std::size_t depth) {
    const auto id = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.push_back(Node::leaf(0.0));
    const auto [sum_g, sum_h] = node_sums(positions, gh_);

    std::optional<NodeSplit> split;
    if (depth < params_.max_depth) {
      split = find_best(allowed, sorted, pre_, gh_, sum_g, sum_h, params_);
    }
    if (!split) {
      tree_.nodes[static_cast<std::size_t>(id)] =
          Node::leaf(leaf_weight(sum_g, sum_h, params_.lambda));
      return id;
    }

    std::vector<std::size_t> child_allowed = allowed;
    if (partition_ && depth == 0) {
      const auto group = partition_->group_of(split->feature);
      tree_.used_group = group;
      child_allowed = partition_->groups()[*group];
      std::sort(child_allowed.begin(), child_allowed.end());
    }

    const auto& x = pre_.values[split->feature];
    for (Pos p : positions) goes_left_[p] = x[p] < split->threshold;

    std::vector<Pos> left_pos;
    std::vector<Pos> right_pos;
    for (Pos p : positions) (goes_left_[p] ? left_pos : right_pos).push_back(p);

    std::vector<std::vector<Pos>> left_sorted(child_allowed.size());
    std::vector<std::vector<Pos>> right_sorted(child_allowed.size());
    for (std::size_t a = 0; a < child_allowed.size(); ++a) {
      const auto parent_slot = static_cast<std::size_t>(
          std::find(allowed.begin(), allowed.end(), child_allowed[a]) - allowed.begin());
      const auto& src = sorted[parent_slot];
      left_sorted[a].reserve(left_pos.size());
      right_sorted[a].reserve(right_pos.size());
      for (Pos p : src) (goes_left_[p] ? left_sorted[a] : right_sorted[a]).push_back(p);
    }
    sorted.clear();
    positions.clear();

    const std::int32_t left = grow(std::move(left_pos), std::move(left_sorted),
                                   child_allowed, depth + 1);
    const std::int32_t right = grow(std::move(right_pos), std::move(right_sorted),
                                    child_allowed, depth + 1);
    tree_.nodes[static_cast<std::size_t>(id)] =
        Node::split(split->feature, split->threshold, left, right);
    return id;
  }

  const Presorted& pre_;
  const GradHess& gh_;
  const TrainParams& params_;
  const std::optional<ConstraintPartition>& partition_;
  std::vector<char> goes_left_;
  Tree tree_;
};

void check_gradients(const GradHess& gh, std::size_t n) {
  if (gh.g.size() != n || gh.h.size() != n) {
    throw DataError("gradient/hessian length does not match the row set");
  }
}

}  // namespace

void TrainParams::validate() const {
  if (max_depth < 1) throw ConfigError("max_depth must be at least 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("learning_rate must lie in (0, 1]");
  }
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
  if (min_child_samples < 1) throw ConfigError("min_child_samples must be at least 1");
  if (!(min_child_hessian >= 0.0)) throw ConfigError("min_child_hessian must be non-negative");
  if (base_score && !std::isfinite(*base_score)) throw ConfigError("base_score must be finite");
}

double sigmoid(double raw) {
  if (raw >= 0.0) return 1.0 / (1.0 + std::exp(-raw));
  const double e = std::exp(raw);
  return e / (1.0 + e);
}

GradHess grad_hess(Task task, std::span<const double> y, std::span<const double> raw) {
  if (y.size() != raw.size()) throw DataError("target and prediction lengths differ");
  GradHess gh;
  gh.g.resize(y.size());
  gh.h.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (task == Task::kRegression) {
      gh.g[i] = raw[i] - y[i];
      gh.h[i] = 1.0;
    } else {
      const double p = sigmoid(raw[i]);
      gh.g[i] = p - y[i];
      gh.h[i] = std::max(p * (1.0 - p), kMinHessian);
    }
  }
  return gh;
}

double leaf_weight(double sum_grad, double sum_hess, double lambda) {
  const double denom = sum_hess + lambda;
  if (!(denom > 0.0)) {
    throw DataError("degenerate leaf: hessian sum plus lambda is not positive");
  }
  return -sum_grad / denom;
}

double split_gain(double gl, double hl, double gr, double hr, double lambda,
                  double gamma) {
  const double g = gl + gr;
  return 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) -
                g * g / (hl + hr + lambda)) -
         gamma;
}

std::optional<SplitCandidate> best_split(const RowIndexSet& rows,
                                         std::span<const std::size_t> allowed,
                                         const GradHess& gh, const Dataset& ds,
                                         const TrainParams& params) {
  if (rows.empty()) throw DataError("best_split needs at least one row");
  check_gradients(gh, rows.size());
  rows.check_bounds(ds.n_rows());
  std::vector<std::size_t> features(allowed.begin(), allowed.end());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  for (std::size_t f : features) {
    if (f >= ds.n_features()) throw DataError("allowed feature out of range");
  }

  const Presorted pre(ds, rows);
  std::vector<std::vector<Pos>> sorted;
  for (std::size_t f : features) sorted.push_back(pre.order[f]);
  std::vector<Pos> positions(rows.size());
  std::iota(positions.begin(), positions.end(), Pos{0});
  const auto [sum_g, sum_h] = node_sums(positions, gh);

  const auto best = find_best(features, sorted, pre, gh, sum_g, sum_h, params);
  if (!best) return std::nullopt;

  SplitCandidate out;
  out.feature = best->feature;
  out.threshold = best->threshold;
  out.gain = best->gain;
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  for (std::size_t p = 0; p < rows.size(); ++p) {
    (pre.values[best->feature][p] < best->threshold ? left : right).push_back(rows[p]);
  }
  out.left_rows = RowIndexSet(std::move(left));
  out.right_rows = RowIndexSet(std::move(right));
  return out;
}

double Tree::predict(const Dataset& ds, std::size_t row) const {
  std::size_t id = root;
  while (!nodes[id].is_leaf) {
    const Node& n = nodes[id];
    id = static_cast<std::size_t>(ds.value(row, n.feature) < n.threshold ? n.left : n.right);
  }
  return nodes[id].weight;
}

std::size_t Tree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    const Node& n = nodes[id];
    if (n.is_leaf) {
      deepest = std::max(deepest, d);
    } else {
      stack.emplace_back(static_cast<std::size_t>(n.left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(n.right), d + 1);
    }
  }
  return deepest;
}

std::vector<std::vector<std::size_t>> Tree::path_features() const {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> stack{{root, {}}};
  while (!stack.empty()) {
    auto [id, path] = std::move(stack.back());
    stack.pop_back();
    const Node& n = nodes[id];
    if (n.is_leaf) {
      out.push_back(std::move(path));
      continue;
    }
    path.push_back(n.feature);
    stack.emplace_back(static_cast<std::size_t>(n.right), path);
    stack.emplace_back(static_cast<std::size_t>(n.left), std::move(path));
  }
  return out;
}

Tree grow_tree(const RowIndexSet& rows, const GradHess& gh, const Dataset& ds,
               const TrainParams& params,
               const std::optional<ConstraintPartition>& partition) {
  if (rows.empty()) throw DataError("grow_tree needs at least one row");
  check_gradients(gh, rows.size());
  rows.check_bounds(ds.n_rows());
  params.validate();
  if (partition) partition->validate(ds.n_features());
  const Presorted pre(ds, rows);
  return TreeBuilder(pre, gh, params, partition).build();
}

void validate_schedule(const ConstraintSchedule& schedule, std::size_t n_features) {
  if (const auto* fixed = std::get_if<FixedConstraints>(&schedule)) {
    fixed->partition.validate(n_features);
  } else if (const auto* per = std::get_if<PerResidualConstraints>(&schedule)) {
    if (per->first_x < 1) throw ConfigError("partial interaction needs first_x >= 1");
    per->wrapper.validate();
    per->first_tree_partition.validate(n_features);
  }
}

double default_base_score(Task task, std::span<const double> y) {
  if (y.empty()) throw DataError("cannot compute a base score from zero rows");
  double sum = 0.0;
  for (double v : y) sum += v;
  const double mean = sum / static_cast<double>(y.size());
  if (task == Task::kRegression) return mean;
  const double p = std::clamp(mean, 1e-6, 1.0 - 1e-6);
  return std::log(p / (1.0 - p));
}

Ensemble train(const Dataset& ds, const RowIndexSet& rows, const TrainParams& params,
               const ConstraintSchedule& schedule) {
  params.validate();
  validate_schedule(schedule, ds.n_features());
  if (rows.empty()) throw DataError("training needs at least one row");
  rows.check_bounds(ds.n_rows());

  std::vector<double> y;
  y.reserve(rows.size());
  for (std::size_t r : rows) y.push_back(ds.target()[r]);

  Ensemble ens;
  ens.task = ds.task();
  ens.params = params;
  ens.base_score = params.base_score ? *params.base_score : default_base_score(ds.task(), y);
  ens.feature_names = ds.feature_names();

  const Presorted pre(ds, rows);
  std::vector<double> raw(rows.size(), ens.base_score);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    const GradHess gh = grad_hess(ds.task(), y, raw);

    std::optional<ConstraintPartition> partition;
    if (const auto* fixed = std::get_if<FixedConstraints>(&schedule)) {
      partition = fixed->partition;
    } else if (const auto* per = std::get_if<PerResidualConstraints>(&schedule)) {
      if (t == 0) {
        partition = per->first_tree_partition;
      } else if (t < per->first_x) {
        std::vector<double> residual(gh.g.size());
        for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = -gh.g[i];
        partition = discover_constraints_for_residuals(ds, rows, residual, per->wrapper);
      }
    }

    Tree tree = TreeBuilder(pre, gh, params, partition).build();
    for (std::size_t p = 0; p < rows.size(); ++p) {
      raw[p] += params.learning_rate * tree.predict(ds, rows[p]);
    }
    ens.trees.push_back(std::move(tree));
    ens.constraint_log.push_back(std::move(partition));
  }
  return ens;
}

std::vector<double> predict_raw(const Ensemble& ens, const Dataset& ds,
                                const RowIndexSet& rows) {
  if (ds.n_features() != ens.n_features()) {
    std::ostringstream msg;
    msg << "feature count mismatch: model expects " << ens.n_features()
        << ", data has " << ds.n_features();
    throw DataError(msg.str());
  }
  rows.check_bounds(ds.n_rows());
  std::vector<double> out(rows.size(), ens.base_score);
  for (const Tree& tree : ens.trees) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out[i] += ens.params.learning_rate * tree.predict(ds, rows[i]);
    }
  }
  return out;
}

std::vector<double> predict(const Ensemble& ens, const Dataset& ds,
                            const RowIndexSet& rows) {
  auto out = predict_raw(ens, ds, rows);
  if (ens.task == Task::kBinaryClassification) {
    for (double& v : out) v = sigmoid(v);
  }
  return out;
}

}  // namespace fiboost
