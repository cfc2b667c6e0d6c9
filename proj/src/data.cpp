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

#include "data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "random.hpp"

namespace fiboost {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // one per header entry
};

RawTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open CSV file '" + path.string() + "'");

  RawTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("CSV file '" + path.string() + "' is empty");
  }
  std::string_view header_line = line;
  if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
  for (auto name : split_fields(header_line)) {
    if (name.empty()) {
      throw DataError("CSV file '" + path.string() + "' has an empty header field");
    }
    table.header.emplace_back(name);
  }
  table.columns.resize(table.header.size());

  std::size_t line_no = 1;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++row_no;
    const auto fields = split_fields(line);
    if (fields.size() != table.header.size()) {
      std::ostringstream msg;
      msg << "row " << row_no << " (line " << line_no << ") has " << fields.size()
          << " fields, header has " << table.header.size();
      throw DataError(msg.str());
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      double v = 0.0;
      if (!parse_double(fields[j], v)) {
        std::ostringstream msg;
        msg << "unparseable cell '" << fields[j] << "' at row " << row_no
            << " (line " << line_no << "), column '" << table.header[j] << "'";
        throw DataError(msg.str());
      }
      table.columns[j].push_back(v);
    }
  }
  if (row_no == 0) {
    throw DataError("CSV file '" + path.string() + "' has no data rows");
  }
  return table;
}

}  // namespace

Task parse_task(std::string_view name) {
  if (name == "regression") return Task::kRegression;
  if (name == "classification" || name == "binary" ||
      name == "binary_classification") {
    return Task::kBinaryClassification;
  }
  throw ConfigError("unknown task '" + std::string(name) +
                    "' (expected 'regression' or 'classification')");
}

std::string_view task_name(Task task) {
  return task == Task::kRegression ? "regression" : "classification";
}

RowIndexSet::RowIndexSet(std::vector<std::size_t> indices)
    : indices_(std::move(indices)) {
  for (std::size_t i = 1; i < indices_.size(); ++i) {
    if (indices_[i] <= indices_[i - 1]) {
      throw DataError("row indices must be strictly increasing");
    }
  }
}

RowIndexSet RowIndexSet::all(std::size_t n_rows) {
  std::vector<std::size_t> idx(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) idx[i] = i;
  RowIndexSet out;
  out.indices_ = std::move(idx);
  return out;
}

void RowIndexSet::check_bounds(std::size_t n_rows) const {
  if (!indices_.empty() && indices_.back() >= n_rows) {
    throw DataError("row index " + std::to_string(indices_.back()) +
                    " out of range for " + std::to_string(n_rows) + " rows");
  }
}

RowIndexSet RowIndexSet::select(std::span<const std::size_t> positions) const {
  std::vector<std::size_t> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) out.push_back(indices_.at(p));
  return RowIndexSet(std::move(out));
}

Dataset::Dataset(std::vector<double> column_major, std::size_t n_rows,
                 std::vector<std::string> feature_names,
                 std::vector<double> target, Task task, std::string target_name)
    : values_(std::move(column_major)),
      n_rows_(n_rows),
      names_(std::move(feature_names)),
      target_(std::move(target)),
      task_(task),
      target_name_(std::move(target_name)) {
  if (n_rows_ == 0) throw DataError("dataset has no rows");
  if (names_.empty()) throw DataError("dataset has no feature columns");
  if (values_.size() != n_rows_ * names_.size()) {
    throw DataError("feature matrix size does not match rows x features");
  }
  if (target_.size() != n_rows_) {
    throw DataError("target length does not match the number of rows");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DataError("non-finite feature value");
  }
  for (std::size_t i = 0; i < n_rows_; ++i) {
    const double y = target_[i];
    if (!std::isfinite(y)) throw DataError("non-finite target value");
    if (task_ == Task::kBinaryClassification && y != 0.0 && y != 1.0) {
      std::ostringstream msg;
      msg << "classification target at row " << (i + 1) << " is " << y
          << ", expected 0 or 1";
      throw DataError(msg.str());
    }
  }
}

Dataset Dataset::subset(const RowIndexSet& rows) const {
  rows.check_bounds(n_rows_);
  const std::size_t m = rows.size();
  std::vector<double> values(m * n_features());
  std::vector<double> target(m);
  for (std::size_t j = 0; j < n_features(); ++j) {
    const auto col = column(j);
    for (std::size_t i = 0; i < m; ++i) values[j * m + i] = col[rows[i]];
  }
  for (std::size_t i = 0; i < m; ++i) target[i] = target_[rows[i]];
  return Dataset(std::move(values), m, names_, std::move(target), task_,
                 target_name_);
}

Dataset Dataset::with_target(std::vector<double> target, Task task) const {
  return Dataset(values_, n_rows_, names_, std::move(target), task,
                 target_name_);
}

Dataset load_csv(const std::filesystem::path& path,
                 std::string_view target_column, Task task) {
  RawTable table = read_table(path);
  const auto it = std::find(table.header.begin(), table.header.end(), target_column);
  if (it == table.header.end()) {
    throw DataError("unknown target column '" + std::string(target_column) +
                    "' in '" + path.string() + "'");
  }
  const std::size_t target_idx = static_cast<std::size_t>(it - table.header.begin());
  const std::size_t n_rows = table.columns[target_idx].size();

  std::vector<std::string> names;
  std::vector<double> values;
  values.reserve(n_rows * (table.header.size() - 1));
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j == target_idx) continue;
    names.push_back(table.header[j]);
    values.insert(values.end(), table.columns[j].begin(), table.columns[j].end());
  }
  return Dataset(std::move(values), n_rows, std::move(names),
                 std::move(table.columns[target_idx]), task,
                 std::string(target_column));
}

Dataset load_features_csv(const std::filesystem::path& path,
                          std::optional<std::string_view> drop_column) {
  RawTable table = read_table(path);
  const std::size_t n_rows = table.columns.front().size();
  std::vector<std::string> names;
  std::vector<double> values;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (drop_column && table.header[j] == *drop_column) continue;
    names.push_back(table.header[j]);
    values.insert(values.end(), table.columns[j].begin(), table.columns[j].end());
  }
  return Dataset(std::move(values), n_rows, std::move(names),
                 std::vector<double>(n_rows, 0.0), Task::kRegression);
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write CSV file '" + path.string() + "'");
  out.precision(17);
  for (const auto& name : ds.feature_names()) out << name << ',';
  out << ds.target_name() << '\n';
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    for (std::size_t j = 0; j < ds.n_features(); ++j) out << ds.value(i, j) << ',';
    out << ds.target()[i] << '\n';
  }
  if (!out) throw DataError("failed writing CSV file '" + path.string() + "'");
}

std::pair<RowIndexSet, RowIndexSet> split_rows(std::size_t n_rows,
                                               double test_fraction,
                                               std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  const auto n_test = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_rows) * test_fraction));
  if (n_test == 0 || n_test >= n_rows) {
    std::ostringstream msg;
    msg << "test fraction " << test_fraction << " on " << n_rows
        << " rows leaves an empty train or test part";
    throw ConfigError(msg.str());
  }
  Rng rng(seed);
  const auto perm = rng.permutation(n_rows);
  std::vector<std::size_t> test(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {RowIndexSet(std::move(train)), RowIndexSet(std::move(test))};
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed) {
  auto [train, test] = split_rows(ds.n_rows(), test_fraction, seed);
  return {ds.subset(train), ds.subset(test)};
}

FoldPlan kfold(std::size_t n_rows, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n_rows) {
    throw ConfigError("k-fold requires 2 <= k <= n_rows (k=" + std::to_string(k) +
                      ", n_rows=" + std::to_string(n_rows) + ")");
  }
  Rng rng(seed);
  const auto perm = rng.permutation(n_rows);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  const std::size_t base = n_rows / k;
  const std::size_t extra = n_rows % k;
  std::size_t start = 0;
  std::vector<char> in_fold(n_rows);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    std::vector<std::size_t> val(perm.begin() + static_cast<std::ptrdiff_t>(start),
                                 perm.begin() + static_cast<std::ptrdiff_t>(start + len));
    std::sort(val.begin(), val.end());
    std::fill(in_fold.begin(), in_fold.end(), 0);
    for (std::size_t r : val) in_fold[r] = 1;
    std::vector<std::size_t> train;
    train.reserve(n_rows - len);
    for (std::size_t r = 0; r < n_rows; ++r) {
      if (!in_fold[r]) train.push_back(r);
    }
    plan.folds.push_back({RowIndexSet(std::move(train)), RowIndexSet(std::move(val))});
    start += len;
  }
  return plan;
}

}  // namespace fiboost
