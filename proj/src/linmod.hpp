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

#ifndef FIBOOST_LINMOD_HPP_
#define FIBOOST_LINMOD_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "data.hpp"

namespace fiboost {

inline constexpr double kDefaultOlsRidge = 1e-8;
inline constexpr double kDefaultLogisticRidge = 1e-6;

// One design-matrix column: a base feature, or the product of two base
// features (first < second).
struct Term {
  std::size_t first = 0;
  std::optional<std::size_t> second;

  bool is_product() const { return second.has_value(); }
  std::string name() const;  // "x3" or "x1*x4"

  friend bool operator==(const Term&, const Term&) = default;
};

using ColumnSpec = std::vector<Term>;

// Base terms in subset order, then (with_interactions) one product per
// unordered pair, in lexicographic order of the sorted feature indices.
ColumnSpec expand_pairwise(std::span<const std::size_t> subset,
                           bool with_interactions);

// Throws ConfigError on duplicate terms or products whose operands are not
// base terms.
void validate_column_spec(const ColumnSpec& spec);

struct FeatureScaling {
  std::size_t feature = 0;
  double mean = 0.0;
  double stddev = 1.0;  // sample stddev; 1 for constant columns
};

struct Standardization {
  std::vector<FeatureScaling> entries;

  // Throws ConfigError if `feature` was not fitted.
  const FeatureScaling& lookup(std::size_t feature) const;
};

// Standardized columns for the terms of `spec`. The intercept is implicit
// (not stored as a column) when includes_intercept is set.
struct DesignMatrix {
  Eigen::MatrixXd columns;
  ColumnSpec spec;
  bool includes_intercept = true;
  Standardization standardization;

  Eigen::Index rows() const { return columns.rows(); }
};

// Builds the design for `rows`. Base features are standardized with
// `fitted` or, when absent, with statistics of `rows` themselves; products
// multiply the standardized bases.
DesignMatrix materialize(const Dataset& ds, const RowIndexSet& rows,
                         const ColumnSpec& spec,
                         const std::optional<Standardization>& fitted = std::nullopt);

enum class ModelKind { kOls, kLogistic };

struct FitInfo {
  int iterations = 0;
  bool converged = true;
  // Penalized log-likelihood after each accepted Newton step (logistic only).
  std::vector<double> objective_trace;
};

struct LinearModel {
  ModelKind kind = ModelKind::kOls;
  ColumnSpec spec;
  Standardization standardization;
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  FitInfo info;
};

// Ridge least squares with an unpenalized intercept.
LinearModel fit_ols(const DesignMatrix& x, std::span<const double> y,
                    double ridge = kDefaultOlsRidge);

struct LogisticOptions {
  double ridge = kDefaultLogisticRidge;
  int max_iter = 100;
  double tol = 1e-8;
};

// Damped Newton ascent on the ridge-penalized log-likelihood. Reaching
// max_iter is reported through info.converged, not as an error.
LinearModel fit_logistic(const DesignMatrix& x, std::span<const double> y,
                         const LogisticOptions& options = {});

// Penalized log-likelihood and its gradient at theta = [intercept, beta...].
// The intercept is not penalized.
double logistic_objective(const DesignMatrix& x, std::span<const double> y,
                          double ridge, const Eigen::VectorXd& theta);
Eigen::VectorXd logistic_gradient(const DesignMatrix& x,
                                  std::span<const double> y, double ridge,
                                  const Eigen::VectorXd& theta);

// Linear predictor for OLS, probability for logistic.
std::vector<double> predict(const LinearModel& model, const DesignMatrix& x);
std::vector<double> predict(const LinearModel& model, const Dataset& ds,
                            const RowIndexSet& rows);

// 1 - SS_res/SS_tot. A constant target scores 1 when predicted exactly and 0
// otherwise.
double r_squared(std::span<const double> y, std::span<const double> pred);
// Fraction of rows where (prob >= 0.5) matches the 0/1 label.
double accuracy(std::span<const double> y, std::span<const double> prob);

// Mean k-fold validation score of a linear (regression) or logistic
// (classification) model on `feature_subset`, using the dataset target.
double cv_score(const Dataset& ds, const RowIndexSet& rows,
                std::span<const std::size_t> feature_subset,
                bool with_interactions, std::size_t k, std::uint64_t seed);

// Same, against an explicit target aligned with `rows` and an explicit
// column layout.
double cv_score(const Dataset& ds, const RowIndexSet& rows,
                std::span<const double> target, Task task, const ColumnSpec& spec,
                std::size_t k, std::uint64_t seed);

// Same, against an explicit target aligned with `rows`.
double cv_score(const Dataset& ds, const RowIndexSet& rows,
                std::span<const double> target, Task task,
                std::span<const std::size_t> feature_subset,
                bool with_interactions, std::size_t k, std::uint64_t seed);

}  // namespace fiboost

#endif  // FIBOOST_LINMOD_HPP_
