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

#include "linmod.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "error.hpp"

namespace fiboost {
namespace {

// log(1 + exp(z)) without overflow.
double log1p_exp(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

Eigen::VectorXd linear_predictor(const DesignMatrix& x, const Eigen::VectorXd& theta) {
  Eigen::VectorXd z = x.columns * theta.tail(theta.size() - 1);
  z.array() += theta[0];
  return z;
}

double max_abs(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace

std::string Term::name() const {
  std::string out = "x" + std::to_string(first);
  if (second) out += "*x" + std::to_string(*second);
  return out;
}

ColumnSpec expand_pairwise(std::span<const std::size_t> subset,
                           bool with_interactions) {
  ColumnSpec spec;
  spec.reserve(subset.size() + subset.size() * (subset.size() - (subset.empty() ? 0 : 1)) / 2);
  for (std::size_t f : subset) spec.push_back({f, std::nullopt});
  if (with_interactions) {
    std::vector<std::size_t> sorted(subset.begin(), subset.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t a = 0; a < sorted.size(); ++a) {
      for (std::size_t b = a + 1; b < sorted.size(); ++b) {
        spec.push_back({sorted[a], sorted[b]});
      }
    }
  }
  return spec;
}

void validate_column_spec(const ColumnSpec& spec) {
  std::set<std::size_t> bases;
  std::set<std::pair<std::size_t, std::size_t>> products;
  for (const Term& t : spec) {
    if (!t.is_product() && !bases.insert(t.first).second) {
      throw ConfigError("duplicate base term " + t.name());
    }
  }
  for (const Term& t : spec) {
    if (!t.is_product()) continue;
    if (!(t.first < *t.second)) {
      throw ConfigError("product term " + t.name() + " must have first < second");
    }
    if (!bases.contains(t.first) || !bases.contains(*t.second)) {
      throw ConfigError("product term " + t.name() + " lacks its base terms");
    }
    if (!products.insert({t.first, *t.second}).second) {
      throw ConfigError("duplicate product term " + t.name());
    }
  }
}

const FeatureScaling& Standardization::lookup(std::size_t feature) const {
  for (const auto& e : entries) {
    if (e.feature == feature) return e;
  }
  throw ConfigError("feature " + std::to_string(feature) + " has no fitted scaling");
}

DesignMatrix materialize(const Dataset& ds, const RowIndexSet& rows,
                         const ColumnSpec& spec,
                         const std::optional<Standardization>& fitted) {
  if (rows.empty()) throw DataError("cannot build a design matrix from zero rows");
  rows.check_bounds(ds.n_rows());
  validate_column_spec(spec);
  for (const Term& t : spec) {
    if (t.first >= ds.n_features() || (t.second && *t.second >= ds.n_features())) {
      throw DataError("term " + t.name() + " references a feature beyond " +
                      std::to_string(ds.n_features()));
    }
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  DesignMatrix out;
  out.spec = spec;
  out.columns.resize(n, static_cast<Eigen::Index>(spec.size()));

  // Base columns first; remember where each feature landed.
  std::vector<std::pair<std::size_t, Eigen::Index>> base_col;
  for (std::size_t c = 0; c < spec.size(); ++c) {
    const Term& t = spec[c];
    if (t.is_product()) continue;
    const auto col = ds.column(t.first);
    FeatureScaling scaling{t.first, 0.0, 1.0};
    if (fitted) {
      scaling = fitted->lookup(t.first);
    } else {
      double sum = 0.0;
      for (std::size_t r : rows) sum += col[r];
      scaling.mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (std::size_t r : rows) ss += (col[r] - scaling.mean) * (col[r] - scaling.mean);
      const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      scaling.stddev = sd > 0.0 ? sd : 1.0;
    }
    out.standardization.entries.push_back(scaling);
    const auto ci = static_cast<Eigen::Index>(c);
    for (Eigen::Index i = 0; i < n; ++i) {
      out.columns(i, ci) = (col[rows[static_cast<std::size_t>(i)]] - scaling.mean) / scaling.stddev;
    }
    base_col.emplace_back(t.first, ci);
  }
  auto column_of = [&](std::size_t feature) {
    for (const auto& [f, c] : base_col) {
      if (f == feature) return c;
    }
    return Eigen::Index{-1};
  };
  for (std::size_t c = 0; c < spec.size(); ++c) {
    const Term& t = spec[c];
    if (!t.is_product()) continue;
    out.columns.col(static_cast<Eigen::Index>(c)) =
        out.columns.col(column_of(t.first)).cwiseProduct(out.columns.col(column_of(*t.second)));
  }
  return out;
}

LinearModel fit_ols(const DesignMatrix& x, std::span<const double> y, double ridge) {
  if (static_cast<Eigen::Index>(y.size()) != x.rows()) {
    throw DataError("target length does not match design rows");
  }
  if (ridge < 0.0) throw ConfigError("ridge must be non-negative");
  const auto yv = as_vector(y);
  const Eigen::Index p = x.columns.cols();

  LinearModel model;
  model.kind = ModelKind::kOls;
  model.spec = x.spec;
  model.standardization = x.standardization;
  model.coefficients = Eigen::VectorXd::Zero(p);

  if (!x.includes_intercept) {
    Eigen::MatrixXd gram = x.columns.transpose() * x.columns;
    gram.diagonal().array() += ridge;
    model.coefficients = gram.ldlt().solve(x.columns.transpose() * yv);
    model.intercept = 0.0;
    return model;
  }

  // Centering removes the unpenalized intercept from the linear system.
  const double y_mean = yv.mean();
  if (p == 0) {
    model.intercept = y_mean;
    return model;
  }
  const Eigen::RowVectorXd x_mean = x.columns.colwise().mean();
  const Eigen::MatrixXd xc = x.columns.rowwise() - x_mean;
  Eigen::MatrixXd gram = xc.transpose() * xc;
  gram.diagonal().array() += ridge;
  const Eigen::VectorXd rhs = xc.transpose() * (yv.array() - y_mean).matrix();
  model.coefficients = gram.ldlt().solve(rhs);
  model.intercept = y_mean - x_mean.dot(model.coefficients);
  return model;
}

double logistic_objective(const DesignMatrix& x, std::span<const double> y,
                          double ridge, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd z = linear_predictor(x, theta);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    ll += y[static_cast<std::size_t>(i)] * z[i] - log1p_exp(z[i]);
  }
  return ll - 0.5 * ridge * theta.tail(theta.size() - 1).squaredNorm();
}

Eigen::VectorXd logistic_gradient(const DesignMatrix& x, std::span<const double> y,
                                  double ridge, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd z = linear_predictor(x, theta);
  Eigen::VectorXd resid(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    resid[i] = y[static_cast<std::size_t>(i)] - sigmoid(z[i]);
  }
  Eigen::VectorXd grad(theta.size());
  grad[0] = x.includes_intercept ? resid.sum() : 0.0;
  grad.tail(theta.size() - 1) =
      x.columns.transpose() * resid - ridge * theta.tail(theta.size() - 1);
  return grad;
}

LinearModel fit_logistic(const DesignMatrix& x, std::span<const double> y,
                         const LogisticOptions& options) {
  if (static_cast<Eigen::Index>(y.size()) != x.rows()) {
    throw DataError("target length does not match design rows");
  }
  for (double v : y) {
    if (v != 0.0 && v != 1.0) throw DataError("logistic target must be 0 or 1");
  }
  if (options.ridge < 0.0) throw ConfigError("ridge must be non-negative");

  const Eigen::Index p = x.columns.cols();
  const Eigen::Index n = x.rows();
  constexpr int kMaxHalvings = 30;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p + 1);
  double objective = logistic_objective(x, y, options.ridge, theta);
  Eigen::VectorXd grad = logistic_gradient(x, y, options.ridge, theta);
  const double stop = options.tol * (1.0 + max_abs(grad));

  FitInfo info;
  info.converged = false;
  info.objective_trace.push_back(objective);
  for (int iter = 0; iter < options.max_iter; ++iter) {
    if (max_abs(grad) <= stop) {
      info.converged = true;
      break;
    }
    // Negative Hessian: A^T W A + ridge * diag(0, 1, ..., 1), A = [1 X].
    const Eigen::VectorXd z = linear_predictor(x, theta);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double pi = sigmoid(z[i]);
      w[i] = pi * (1.0 - pi);
    }
    Eigen::MatrixXd info_mat(p + 1, p + 1);
    info_mat(0, 0) = x.includes_intercept ? w.sum() : 1.0;
    if (p > 0) {
      const Eigen::VectorXd xtw = x.columns.transpose() * w;
      info_mat.block(1, 0, p, 1) = x.includes_intercept ? xtw : Eigen::VectorXd::Zero(p);
      info_mat.block(0, 1, 1, p) = info_mat.block(1, 0, p, 1).transpose();
      info_mat.block(1, 1, p, p) =
          x.columns.transpose() * w.asDiagonal() * x.columns;
      info_mat.block(1, 1, p, p).diagonal().array() += options.ridge;
    }
    Eigen::VectorXd direction = info_mat.ldlt().solve(grad);
    if (!direction.allFinite() || direction.dot(grad) <= 0.0) direction = grad;

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      const Eigen::VectorXd trial = theta + step * direction;
      const double trial_obj = logistic_objective(x, y, options.ridge, trial);
      if (std::isfinite(trial_obj) && trial_obj >= objective) {
        theta = trial;
        objective = trial_obj;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    info.iterations = iter + 1;
    info.objective_trace.push_back(objective);
    grad = logistic_gradient(x, y, options.ridge, theta);
  }
  if (!info.converged && max_abs(grad) <= stop) info.converged = true;

  LinearModel model;
  model.kind = ModelKind::kLogistic;
  model.spec = x.spec;
  model.standardization = x.standardization;
  model.intercept = theta[0];
  model.coefficients = theta.tail(p);
  model.info = std::move(info);
  return model;
}

std::vector<double> predict(const LinearModel& model, const DesignMatrix& x) {
  if (x.columns.cols() != model.coefficients.size()) {
    throw DataError("design width does not match model coefficients");
  }
  const Eigen::VectorXd z = x.columns * model.coefficients;
  std::vector<double> out(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double eta = z[i] + model.intercept;
    out[static_cast<std::size_t>(i)] =
        model.kind == ModelKind::kLogistic ? sigmoid(eta) : eta;
  }
  return out;
}

std::vector<double> predict(const LinearModel& model, const Dataset& ds,
                            const RowIndexSet& rows) {
  return predict(model, materialize(ds, rows, model.spec, model.standardization));
}

double r_squared(std::span<const double> y, std::span<const double> pred) {
  if (y.size() != pred.size() || y.empty()) {
    throw DataError("r_squared needs equal, non-zero lengths");
  }
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_tot += (y[i] - mean) * (y[i] - mean);
    ss_res += (y[i] - pred[i]) * (y[i] - pred[i]);
  }
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

double accuracy(std::span<const double> y, std::span<const double> prob) {
  if (y.size() != prob.size() || y.empty()) {
    throw DataError("accuracy needs equal, non-zero lengths");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double label = prob[i] >= 0.5 ? 1.0 : 0.0;
    if (label == y[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

double cv_score(const Dataset& ds, const RowIndexSet& rows,
                std::span<const std::size_t> feature_subset,
                bool with_interactions, std::size_t k, std::uint64_t seed) {
  std::vector<double> target;
  target.reserve(rows.size());
  rows.check_bounds(ds.n_rows());
  for (std::size_t r : rows) target.push_back(ds.target()[r]);
  return cv_score(ds, rows, target, ds.task(), feature_subset, with_interactions, k, seed);
}

double cv_score(const Dataset& ds, const RowIndexSet& rows,
                std::span<const double> target, Task task,
                std::span<const std::size_t> feature_subset,
                bool with_interactions, std::size_t k, std::uint64_t seed) {
  if (feature_subset.empty()) throw ConfigError("cv_score needs a non-empty feature subset");
  return cv_score(ds, rows, target, task, expand_pairwise(feature_subset, with_interactions),
                  k, seed);
}

double cv_score(const Dataset& ds, const RowIndexSet& rows,
                std::span<const double> target, Task task, const ColumnSpec& spec,
                std::size_t k, std::uint64_t seed) {
  if (target.size() != rows.size()) {
    throw DataError("target length does not match the row set");
  }
  const FoldPlan plan = kfold(rows.size(), k, seed);

  double total = 0.0;
  for (const Fold& fold : plan.folds) {
    const RowIndexSet train_rows = rows.select(fold.train.indices());
    const RowIndexSet val_rows = rows.select(fold.validation.indices());
    std::vector<double> y_train;
    std::vector<double> y_val;
    for (std::size_t pos : fold.train) y_train.push_back(target[pos]);
    for (std::size_t pos : fold.validation) y_val.push_back(target[pos]);

    const DesignMatrix x_train = materialize(ds, train_rows, spec);
    const LinearModel model = task == Task::kRegression
                                  ? fit_ols(x_train, y_train)
                                  : fit_logistic(x_train, y_train);
    const auto pred = predict(model, materialize(ds, val_rows, spec, model.standardization));
    total += task == Task::kRegression ? r_squared(y_val, pred) : accuracy(y_val, pred);
  }
  return total / static_cast<double>(plan.folds.size());
}

}  // namespace fiboost
