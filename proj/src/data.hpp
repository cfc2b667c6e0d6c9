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

#ifndef FIBOOST_DATA_HPP_
#define FIBOOST_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fiboost {

enum class Task { kRegression, kBinaryClassification };

// "regression" | "classification" (also accepts "binary" and
// "binary_classification").
Task parse_task(std::string_view name);
std::string_view task_name(Task task);

// Strictly increasing row positions into a Dataset.
class RowIndexSet {
 public:
  RowIndexSet() = default;
  // Throws DataError unless `indices` is strictly increasing.
  explicit RowIndexSet(std::vector<std::size_t> indices);

  static RowIndexSet all(std::size_t n_rows);

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  std::size_t operator[](std::size_t i) const { return indices_[i]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }
  const std::vector<std::size_t>& indices() const { return indices_; }

  // Throws DataError if any index is >= n_rows.
  void check_bounds(std::size_t n_rows) const;

  // Rows at the given positions of this set (positions must be increasing).
  RowIndexSet select(std::span<const std::size_t> positions) const;

  friend bool operator==(const RowIndexSet&, const RowIndexSet&) = default;

 private:
  std::vector<std::size_t> indices_;
};

// Column-major numeric features plus a target. Immutable once built.
class Dataset {
 public:
  // `column_major` holds n_features columns of n_rows values each.
  // Throws DataError when the invariants do not hold: non-empty, finite,
  // consistent sizes, and 0/1 targets for classification.
  Dataset(std::vector<double> column_major, std::size_t n_rows,
          std::vector<std::string> feature_names, std::vector<double> target,
          Task task, std::string target_name = "target");

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_features() const { return names_.size(); }
  Task task() const { return task_; }
  const std::vector<std::string>& feature_names() const { return names_; }
  const std::string& target_name() const { return target_name_; }

  std::span<const double> column(std::size_t feature) const {
    return {values_.data() + feature * n_rows_, n_rows_};
  }
  double value(std::size_t row, std::size_t feature) const {
    return values_[feature * n_rows_ + row];
  }
  std::span<const double> target() const { return target_; }

  // Copy holding only `rows`, in their order.
  Dataset subset(const RowIndexSet& rows) const;

  // Same features, different target (length must equal n_rows).
  Dataset with_target(std::vector<double> target, Task task) const;

 private:
  std::vector<double> values_;
  std::size_t n_rows_;
  std::vector<std::string> names_;
  std::vector<double> target_;
  Task task_;
  std::string target_name_;
};

struct Fold {
  RowIndexSet train;
  RowIndexSet validation;
};

struct FoldPlan {
  std::vector<Fold> folds;
  std::size_t k = 0;
  std::uint64_t seed = 0;
};

// Reads a numeric CSV with a header row. The target column is removed and
// every other column becomes a feature, in header order.
Dataset load_csv(const std::filesystem::path& path,
                 std::string_view target_column, Task task);

// Reads a CSV whose columns are all features (optionally dropping one named
// column). The target is filled with zeros; used for prediction inputs.
Dataset load_features_csv(const std::filesystem::path& path,
                          std::optional<std::string_view> drop_column);

// Features followed by the target as the last column, 17 significant digits.
void write_csv(const Dataset& ds, const std::filesystem::path& path);

// Seeded split of row positions [0, n_rows). The test part has
// round(n_rows * test_fraction) rows.
std::pair<RowIndexSet, RowIndexSet> split_rows(std::size_t n_rows,
                                               double test_fraction,
                                               std::uint64_t seed);

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed);

// k folds over positions [0, n_rows); fold sizes differ by at most one.
FoldPlan kfold(std::size_t n_rows, std::size_t k, std::uint64_t seed);

}  // namespace fiboost

#endif  // FIBOOST_DATA_HPP_
