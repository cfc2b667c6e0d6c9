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

#ifndef FIBOOST_PARTITION_HPP_
#define FIBOOST_PARTITION_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace fiboost {

// Disjoint groups of feature indices. Features may only interact with
// members of their own group. Group order is creation order; member order is
// discovery order.
class ConstraintPartition {
 public:
  ConstraintPartition() = default;
  explicit ConstraintPartition(std::vector<std::vector<std::size_t>> groups)
      : groups_(std::move(groups)) {}

  // One group holding every feature.
  static ConstraintPartition single_group(std::size_t n_features);

  const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }
  std::size_t size() const { return groups_.size(); }

  // Throws ConfigError unless the groups are nonempty, pairwise disjoint and
  // cover exactly [0, n_features).
  void validate(std::size_t n_features) const;

  // Index of the group containing `feature`, if any.
  std::optional<std::size_t> group_of(std::size_t feature) const;

  // Table-style notation, e.g. [[3,10,1],[0,2]].
  std::string to_string() const;
  // Inverse of to_string; throws ConfigError on malformed input.
  static ConstraintPartition parse(const std::string& text);

  friend bool operator==(const ConstraintPartition&, const ConstraintPartition&) = default;

 private:
  std::vector<std::vector<std::size_t>> groups_;
};

}  // namespace fiboost

#endif  // FIBOOST_PARTITION_HPP_
