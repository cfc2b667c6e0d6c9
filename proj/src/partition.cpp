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

#include "partition.hpp"

#include <json.hpp>

#include "error.hpp"

namespace fiboost {

ConstraintPartition ConstraintPartition::single_group(std::size_t n_features) {
  std::vector<std::size_t> all(n_features);
  for (std::size_t i = 0; i < n_features; ++i) all[i] = i;
  return ConstraintPartition({std::move(all)});
}

void ConstraintPartition::validate(std::size_t n_features) const {
  std::vector<int> seen(n_features, 0);
  for (const auto& group : groups_) {
    if (group.empty()) throw ConfigError("constraint partition has an empty group");
    for (std::size_t f : group) {
      if (f >= n_features) {
        throw ConfigError("constraint references feature " + std::to_string(f) +
                          " but the dataset has " + std::to_string(n_features));
      }
      if (seen[f]++) {
        throw ConfigError("feature " + std::to_string(f) +
                          " appears in more than one constraint group");
      }
    }
  }
  for (std::size_t f = 0; f < n_features; ++f) {
    if (!seen[f]) {
      throw ConfigError("feature " + std::to_string(f) +
                        " is missing from the constraint partition");
    }
  }
}

std::optional<std::size_t> ConstraintPartition::group_of(std::size_t feature) const {
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    for (std::size_t f : groups_[g]) {
      if (f == feature) return g;
    }
  }
  return std::nullopt;
}

std::string ConstraintPartition::to_string() const {
  return nlohmann::json(groups_).dump();
}

ConstraintPartition ConstraintPartition::parse(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_array()) throw ConfigError("constraint partition must be a JSON array");
    std::vector<std::vector<std::size_t>> groups;
    for (const auto& g : doc) {
      if (!g.is_array()) throw ConfigError("constraint groups must be JSON arrays");
      std::vector<std::size_t> group;
      for (const auto& f : g) {
        if (!f.is_number_unsigned()) {
          throw ConfigError("constraint entries must be non-negative integers");
        }
        group.push_back(f.get<std::size_t>());
      }
      groups.push_back(std::move(group));
    }
    return ConstraintPartition(std::move(groups));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed constraint partition: ") + e.what());
  }
}

}  // namespace fiboost
