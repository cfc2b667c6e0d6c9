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

#ifndef FIBOOST_WRAPPER_HPP_
#define FIBOOST_WRAPPER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "data.hpp"
#include "partition.hpp"

namespace fiboost {

struct WrapperConfig {
  std::size_t k_folds = 3;
  std::uint64_t seed = 0;
  double epsilon = 5e-3;  // in score units (R^2 or accuracy)
  std::optional<std::size_t> max_group_size;  // unlimited when empty

  void validate() const;
};

// Scores of one remaining feature during a wrapper step. `plain` is the
// reference model (group products, f additive); `interaction` adds every
// product involving f.
struct CandidateScore {
  std::size_t feature = 0;
  double plain = 0.0;
  std::optional<double> interaction;  // absent while seeding a new group
  bool candidate = false;
};

struct WrapperStep {
  enum class Kind { kSeed, kExtend, kClose };
  Kind kind = Kind::kSeed;
  std::size_t group = 0;  // index of the group being built
  std::vector<std::size_t> subset;  // group members before the step
  std::vector<CandidateScore> scores;
  std::optional<std::size_t> chosen;
};

struct WrapperTrace {
  std::vector<WrapperStep> steps;
};

// Greedy discovery of an interaction partition. Each group is seeded with the
// remaining feature whose plain single-feature model scores best, then grown
// one feature at a time: a feature f qualifies when the model over group+{f}
// with all pairwise products beats the model holding only the group's own
// products plus f as an additive term by more than epsilon, and the
// qualifying feature with the best interaction score joins. A group closes
// when nothing qualifies (or it reaches max_group_size). Scores are k-fold CV
// means over one fold plan derived from cfg.seed.
ConstraintPartition discover_constraints(const Dataset& ds, const RowIndexSet& rows,
                                         const WrapperConfig& cfg,
                                         WrapperTrace* trace = nullptr);

// Same search against `residual_target` (aligned with `rows`), always scored
// as a regression problem.
ConstraintPartition discover_constraints_for_residuals(
    const Dataset& ds, const RowIndexSet& rows,
    std::span<const double> residual_target, const WrapperConfig& cfg,
    WrapperTrace* trace = nullptr);

}  // namespace fiboost

#endif  // FIBOOST_WRAPPER_HPP_
