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

#include "wrapper.hpp"

#include <algorithm>

#include "error.hpp"
#include "linmod.hpp"
#include "random.hpp"

namespace fiboost {
namespace {

ConstraintPartition run_wrapper(const Dataset& ds, const RowIndexSet& rows,
                                std::span<const double> target, Task task,
                                const WrapperConfig& cfg, WrapperTrace* trace) {
  cfg.validate();
  if (rows.empty()) throw DataError("wrapper needs at least one row");
  rows.check_bounds(ds.n_rows());

  const std::uint64_t fold_seed = derive_seed(cfg.seed, seed_stream::kWrapperFolds);
  auto score = [&](const ColumnSpec& spec) {
    return cv_score(ds, rows, target, task, spec, cfg.k_folds, fold_seed);
  };

  std::vector<std::size_t> remaining(ds.n_features());
  for (std::size_t f = 0; f < remaining.size(); ++f) remaining[f] = f;

  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> subset;
  auto close_subset = [&] {
    if (trace) {
      WrapperStep step;
      step.kind = WrapperStep::Kind::kClose;
      step.group = groups.size();
      step.subset = subset;
      trace->steps.push_back(std::move(step));
    }
    groups.push_back(std::move(subset));
    subset.clear();
  };
  auto take = [&](std::size_t feature) {
    subset.push_back(feature);
    remaining.erase(std::find(remaining.begin(), remaining.end(), feature));
  };

  while (!remaining.empty()) {
    WrapperStep step;
    step.group = groups.size();
    step.subset = subset;

    if (subset.empty()) {
      // Seed: best single-feature additive model; ties keep the lower index
      // because `remaining` stays sorted.
      step.kind = WrapperStep::Kind::kSeed;
      std::optional<std::size_t> best;
      double best_score = 0.0;
      for (std::size_t f : remaining) {
        const std::size_t single[] = {f};
        const double s = score(expand_pairwise(single, false));
        step.scores.push_back({f, s, std::nullopt, true});
        if (!best || s > best_score) {
          best = f;
          best_score = s;
        }
      }
      step.chosen = best;
      take(*best);
      if (trace) trace->steps.push_back(std::move(step));
      continue;
    }

    if (cfg.max_group_size && subset.size() >= *cfg.max_group_size) {
      close_subset();
      continue;
    }

    step.kind = WrapperStep::Kind::kExtend;
    std::optional<std::size_t> best;
    double best_score = 0.0;
    // The reference model keeps the products already inside the group and
    // adds f additively, so the comparison measures interactions involving f.
    const ColumnSpec group_products = [&] {
      ColumnSpec spec;
      for (const Term& t : expand_pairwise(subset, true)) {
        if (t.is_product()) spec.push_back(t);
      }
      return spec;
    }();
    for (std::size_t f : remaining) {
      std::vector<std::size_t> trial = subset;
      trial.push_back(f);
      ColumnSpec plain_spec = expand_pairwise(trial, false);
      plain_spec.insert(plain_spec.end(), group_products.begin(), group_products.end());
      const double plain = score(plain_spec);
      const double inter = score(expand_pairwise(trial, true));
      const bool candidate = inter > plain + cfg.epsilon;
      step.scores.push_back({f, plain, inter, candidate});
      if (candidate && (!best || inter > best_score)) {
        best = f;
        best_score = inter;
      }
    }
    if (best) {
      step.chosen = best;
      take(*best);
      if (trace) trace->steps.push_back(std::move(step));
    } else {
      if (trace) trace->steps.push_back(std::move(step));
      close_subset();
    }
  }
  if (!subset.empty()) close_subset();
  return ConstraintPartition(std::move(groups));
}

}  // namespace

void WrapperConfig::validate() const {
  if (k_folds < 2) throw ConfigError("wrapper k_folds must be at least 2");
  if (!(epsilon >= 0.0)) throw ConfigError("wrapper epsilon must be non-negative");
  if (max_group_size && *max_group_size < 1) {
    throw ConfigError("wrapper max_group_size must be at least 1");
  }
}

ConstraintPartition discover_constraints(const Dataset& ds, const RowIndexSet& rows,
                                         const WrapperConfig& cfg, WrapperTrace* trace) {
  std::vector<double> target;
  target.reserve(rows.size());
  rows.check_bounds(ds.n_rows());
  for (std::size_t r : rows) target.push_back(ds.target()[r]);
  return run_wrapper(ds, rows, target, ds.task(), cfg, trace);
}

ConstraintPartition discover_constraints_for_residuals(
    const Dataset& ds, const RowIndexSet& rows,
    std::span<const double> residual_target, const WrapperConfig& cfg,
    WrapperTrace* trace) {
  if (residual_target.size() != rows.size()) {
    throw DataError("residual target length does not match the row set");
  }
  return run_wrapper(ds, rows, residual_target, Task::kRegression, cfg, trace);
}

}  // namespace fiboost
