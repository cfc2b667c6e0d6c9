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

#include "serialize.hpp"

#include <charconv>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "error.hpp"

namespace fiboost {
namespace {

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                std::string_view what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(what));
    }
  }
}

template <typename T>
T get_as(const Json& j, std::string_view key, std::string_view what) {
  try {
    return j.at(std::string(key)).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("field '" + std::string(key) + "' of " + std::string(what) +
                      " is missing or has the wrong type");
  }
}

std::size_t get_count(const Json& j, std::string_view key, std::string_view what) {
  const Json& v = j.at(std::string(key));
  if (!v.is_number_unsigned()) {
    throw ConfigError("field '" + std::string(key) + "' of " + std::string(what) +
                      " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::uint64_t get_seed(const Json& j, std::string_view key, std::string_view what) {
  const Json& v = j.at(std::string(key));
  if (!v.is_number_unsigned()) {
    throw ConfigError("seed '" + std::string(key) + "' of " + std::string(what) +
                      " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

template <typename T, typename Get>
std::vector<T> get_list(const Json& j, std::string_view key, std::string_view what, Get get) {
  const Json& v = j.at(std::string(key));
  if (!v.is_array()) {
    throw ConfigError("field '" + std::string(key) + "' of " + std::string(what) +
                      " must be an array");
  }
  std::vector<T> out;
  for (const auto& item : v) out.push_back(get(item));
  return out;
}

std::size_t as_count(const Json& v) {
  if (!v.is_number_unsigned()) throw ConfigError("expected a non-negative integer");
  return v.get<std::size_t>();
}

double as_real(const Json& v) {
  if (!v.is_number()) throw ConfigError("expected a number");
  return v.get<double>();
}

Json optional_json(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Json partition_to_json(const ConstraintPartition& p) { return Json(p.groups()); }

ConstraintPartition partition_from_json(const Json& j) {
  return ConstraintPartition::parse(j.dump());
}

Json params_to_json(const TrainParams& p) {
  return Json{{"n_trees", p.n_trees},
              {"max_depth", p.max_depth},
              {"learning_rate", p.learning_rate},
              {"lambda", p.lambda},
              {"gamma", p.gamma},
              {"min_child_samples", p.min_child_samples},
              {"min_child_hessian", p.min_child_hessian},
              {"base_score", optional_json(p.base_score)},
              {"seed", p.seed}};
}

TrainParams params_from_json(const Json& j, TrainParams p) {
  constexpr std::string_view what = "training params";
  check_keys(j, {"n_trees", "max_depth", "learning_rate", "lambda", "gamma",
                 "min_child_samples", "min_child_hessian", "base_score", "seed"},
             what);
  if (j.contains("n_trees")) p.n_trees = get_count(j, "n_trees", what);
  if (j.contains("max_depth")) p.max_depth = get_count(j, "max_depth", what);
  if (j.contains("learning_rate")) p.learning_rate = get_as<double>(j, "learning_rate", what);
  if (j.contains("lambda")) p.lambda = get_as<double>(j, "lambda", what);
  if (j.contains("gamma")) p.gamma = get_as<double>(j, "gamma", what);
  if (j.contains("min_child_samples")) {
    p.min_child_samples = get_count(j, "min_child_samples", what);
  }
  if (j.contains("min_child_hessian")) {
    p.min_child_hessian = get_as<double>(j, "min_child_hessian", what);
  }
  if (j.contains("base_score")) {
    if (j["base_score"].is_null()) {
      p.base_score.reset();
    } else {
      p.base_score = get_as<double>(j, "base_score", what);
    }
  }
  if (j.contains("seed")) p.seed = get_seed(j, "seed", what);
  p.validate();
  return p;
}

Json wrapper_to_json(const WrapperConfig& c) {
  return Json{{"k_folds", c.k_folds},
              {"seed", c.seed},
              {"epsilon", c.epsilon},
              {"max_group_size", c.max_group_size ? Json(*c.max_group_size) : Json(nullptr)}};
}

WrapperConfig wrapper_from_json(const Json& j, WrapperConfig c) {
  constexpr std::string_view what = "wrapper config";
  check_keys(j, {"k_folds", "seed", "epsilon", "max_group_size"}, what);
  if (j.contains("k_folds")) c.k_folds = get_count(j, "k_folds", what);
  if (j.contains("seed")) c.seed = get_seed(j, "seed", what);
  if (j.contains("epsilon")) c.epsilon = get_as<double>(j, "epsilon", what);
  if (j.contains("max_group_size")) {
    if (j["max_group_size"].is_null()) {
      c.max_group_size.reset();
    } else {
      c.max_group_size = get_count(j, "max_group_size", what);
    }
  }
  c.validate();
  return c;
}

Json grid_to_json(const TuningGrid& g) {
  return Json{{"n_trees", g.n_trees},
              {"max_depth", g.max_depth},
              {"learning_rate", g.learning_rate}};
}

TuningGrid grid_from_json(const Json& j, TuningGrid g) {
  constexpr std::string_view what = "tuning grid";
  check_keys(j, {"n_trees", "max_depth", "learning_rate"}, what);
  if (j.contains("n_trees")) g.n_trees = get_list<std::size_t>(j, "n_trees", what, as_count);
  if (j.contains("max_depth")) g.max_depth = get_list<std::size_t>(j, "max_depth", what, as_count);
  if (j.contains("learning_rate")) {
    g.learning_rate = get_list<double>(j, "learning_rate", what, as_real);
  }
  g.validate();
  return g;
}

BenchmarkConfig benchmark_config_from_json(const Json& j, BenchmarkConfig c) {
  constexpr std::string_view what = "benchmark config";
  check_keys(j, {"test_fraction", "split_seed", "grid", "k", "tune_seed", "wrapper",
                 "partial_x_list", "random_runs", "random_groups", "random_seed",
                 "params"},
             what);
  if (j.contains("test_fraction")) c.test_fraction = get_as<double>(j, "test_fraction", what);
  if (j.contains("split_seed")) c.split_seed = get_seed(j, "split_seed", what);
  if (j.contains("grid")) c.grid = grid_from_json(j["grid"], c.grid);
  if (j.contains("k")) c.k = get_count(j, "k", what);
  if (j.contains("tune_seed")) c.tune_seed = get_seed(j, "tune_seed", what);
  if (j.contains("wrapper")) c.wrapper = wrapper_from_json(j["wrapper"], c.wrapper);
  if (j.contains("partial_x_list")) {
    c.partial_x_list = get_list<std::size_t>(j, "partial_x_list", what, as_count);
  }
  if (j.contains("random_runs")) c.random_runs = get_count(j, "random_runs", what);
  if (j.contains("random_groups")) c.random_groups = get_count(j, "random_groups", what);
  if (j.contains("random_seed")) c.random_seed = get_seed(j, "random_seed", what);
  if (j.contains("params")) c.base_params = params_from_json(j["params"], c.base_params);
  c.validate();
  return c;
}

Json schedule_to_json(const ConstraintSchedule& s) {
  if (std::holds_alternative<NoConstraints>(s)) return Json{{"kind", "none"}};
  if (const auto* fixed = std::get_if<FixedConstraints>(&s)) {
    return Json{{"kind", "fixed"}, {"partition", partition_to_json(fixed->partition)}};
  }
  const auto& per = std::get<PerResidualConstraints>(s);
  return Json{{"kind", "per_residual"},
              {"first_x", per.first_x},
              {"wrapper", wrapper_to_json(per.wrapper)},
              {"first_tree_partition", partition_to_json(per.first_tree_partition)}};
}

ConstraintSchedule schedule_from_json(const Json& j) {
  constexpr std::string_view what = "constraint schedule";
  check_keys(j, {"kind", "partition", "first_x", "wrapper", "first_tree_partition"}, what);
  const auto kind = get_as<std::string>(j, "kind", what);
  if (kind == "none") return NoConstraints{};
  if (kind == "fixed") {
    if (!j.contains("partition")) throw ConfigError("fixed schedule needs a partition");
    return FixedConstraints{partition_from_json(j["partition"])};
  }
  if (kind == "per_residual") {
    PerResidualConstraints per;
    per.first_x = get_count(j, "first_x", what);
    if (j.contains("wrapper")) per.wrapper = wrapper_from_json(j["wrapper"]);
    if (!j.contains("first_tree_partition")) {
      throw ConfigError("per_residual schedule needs first_tree_partition");
    }
    per.first_tree_partition = partition_from_json(j["first_tree_partition"]);
    return per;
  }
  throw ConfigError("unknown schedule kind '" + kind + "'");
}

Json ensemble_to_json(const Ensemble& e) {
  Json trees = Json::array();
  for (const Tree& t : e.trees) {
    Json nodes = Json::array();
    for (std::size_t id = 0; id < t.nodes.size(); ++id) {
      const Node& n = t.nodes[id];
      if (n.is_leaf) {
        nodes.push_back(Json{{"id", id}, {"leaf", n.weight}});
      } else {
        nodes.push_back(Json{{"id", id},
                             {"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right}});
      }
    }
    trees.push_back(Json{{"root", t.root},
                         {"used_group", t.used_group ? Json(*t.used_group) : Json(nullptr)},
                         {"nodes", std::move(nodes)}});
  }
  Json log = Json::array();
  for (const auto& p : e.constraint_log) {
    log.push_back(p ? partition_to_json(*p) : Json(nullptr));
  }
  return Json{{"format", "fiboost-model"},
              {"version", 1},
              {"task", std::string(task_name(e.task))},
              {"feature_names", e.feature_names},
              {"params", params_to_json(e.params)},
              {"base_score", e.base_score},
              {"trees", std::move(trees)},
              {"constraint_log", std::move(log)}};
}

Ensemble ensemble_from_json(const Json& j) {
  try {
    check_keys(j, {"format", "version", "task", "feature_names", "params", "base_score",
                   "trees", "constraint_log"},
               "model");
    if (j.at("format") != "fiboost-model" || j.at("version") != 1) {
      throw DataError("not a fiboost model document (format/version)");
    }
    Ensemble e;
    e.task = parse_task(j.at("task").get<std::string>());
    e.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (e.feature_names.empty()) throw DataError("model has no features");
    e.params = params_from_json(j.at("params"));
    e.base_score = j.at("base_score").get<double>();
    for (const auto& jt : j.at("trees")) {
      Tree t;
      t.root = jt.at("root").get<std::size_t>();
      if (!jt.at("used_group").is_null()) t.used_group = jt.at("used_group").get<std::size_t>();
      const auto& nodes = jt.at("nodes");
      for (std::size_t id = 0; id < nodes.size(); ++id) {
        const auto& jn = nodes[id];
        if (jn.at("id").get<std::size_t>() != id) throw DataError("node ids must be 0..n-1 in order");
        if (jn.contains("leaf")) {
          t.nodes.push_back(Node::leaf(jn["leaf"].get<double>()));
        } else {
          t.nodes.push_back(Node::split(jn.at("feature").get<std::size_t>(),
                                        jn.at("threshold").get<double>(),
                                        jn.at("left").get<std::int32_t>(),
                                        jn.at("right").get<std::int32_t>()));
        }
      }
      if (t.nodes.empty() || t.root >= t.nodes.size()) throw DataError("tree has no root node");
      // Children must point forward so routing always terminates.
      for (std::size_t id = 0; id < t.nodes.size(); ++id) {
        const Node& n = t.nodes[id];
        if (n.is_leaf) continue;
        const auto in_range = [&](std::int32_t c) {
          return c > static_cast<std::int32_t>(id) &&
                 static_cast<std::size_t>(c) < t.nodes.size();
        };
        if (!in_range(n.left) || !in_range(n.right) || n.feature >= e.feature_names.size()) {
          throw DataError("tree node " + std::to_string(id) + " is inconsistent");
        }
      }
      e.trees.push_back(std::move(t));
    }
    for (const auto& jp : j.at("constraint_log")) {
      if (jp.is_null()) {
        e.constraint_log.emplace_back();
      } else {
        e.constraint_log.emplace_back(partition_from_json(jp));
      }
    }
    if (e.constraint_log.size() != e.trees.size()) {
      throw DataError("constraint_log length does not match the tree count");
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed model document: ") + ex.what());
  } catch (const ConfigError& ex) {
    throw DataError(std::string("malformed model document: ") + ex.what());
  }
}

Json trace_to_json(const WrapperTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    Json scores = Json::array();
    for (const auto& c : s.scores) {
      scores.push_back(Json{{"feature", c.feature},
                            {"plain", c.plain},
                            {"interaction", optional_json(c.interaction)},
                            {"candidate", c.candidate}});
    }
    std::string kind = s.kind == WrapperStep::Kind::kSeed     ? "seed"
                       : s.kind == WrapperStep::Kind::kExtend ? "extend"
                                                              : "close";
    steps.push_back(Json{{"kind", kind},
                         {"group", s.group},
                         {"subset", s.subset},
                         {"scores", std::move(scores)},
                         {"chosen", s.chosen ? Json(*s.chosen) : Json(nullptr)}});
  }
  return Json{{"steps", std::move(steps)}};
}

Json report_to_json(const BenchmarkReport& r) {
  Json variants = Json::array();
  for (const auto& e : r.entries) {
    variants.push_back(Json{{"id", e.id},
                            {"constraints", e.constraint_detail},
                            {"test_score", e.test_score},
                            {"test_rmse", optional_json(e.test_rmse)},
                            {"percent_change", optional_json(e.percent_change)}});
  }
  return Json{{"dataset", r.dataset_name},
              {"task", std::string(task_name(r.task))},
              {"metric", r.metric},
              {"n_train", r.n_train},
              {"n_test", r.n_test},
              {"tuned_params", params_to_json(r.tuned)},
              {"discovered_partition", partition_to_json(r.discovered)},
              {"seeds", Json{{"split", r.split_seed},
                             {"tune", r.tune_seed},
                             {"wrapper", r.wrapper_seed},
                             {"random", r.random_seed}}},
              {"variants", std::move(variants)}};
}

BenchmarkReport report_from_json(const Json& j) {
  try {
    BenchmarkReport r;
    r.dataset_name = j.at("dataset").get<std::string>();
    r.task = parse_task(j.at("task").get<std::string>());
    r.metric = j.at("metric").get<std::string>();
    r.n_train = j.at("n_train").get<std::size_t>();
    r.n_test = j.at("n_test").get<std::size_t>();
    r.tuned = params_from_json(j.at("tuned_params"));
    r.discovered = partition_from_json(j.at("discovered_partition"));
    const auto& seeds = j.at("seeds");
    r.split_seed = seeds.at("split").get<std::uint64_t>();
    r.tune_seed = seeds.at("tune").get<std::uint64_t>();
    r.wrapper_seed = seeds.at("wrapper").get<std::uint64_t>();
    r.random_seed = seeds.at("random").get<std::uint64_t>();
    for (const auto& jv : j.at("variants")) {
      VariantEntry e;
      e.id = jv.at("id").get<std::string>();
      e.constraint_detail = jv.at("constraints").get<std::string>();
      e.test_score = jv.at("test_score").get<double>();
      if (!jv.at("test_rmse").is_null()) e.test_rmse = jv["test_rmse"].get<double>();
      if (!jv.at("percent_change").is_null()) {
        e.percent_change = jv["percent_change"].get<double>();
      }
      r.entries.push_back(std::move(e));
    }
    return r;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed benchmark report: ") + ex.what());
  }
}

std::string report_to_csv(const BenchmarkReport& r) {
  std::ostringstream out;
  out << "dataset,task,metric,variant,test_score,test_rmse,percent_change,constraints\n";
  for (const auto& e : r.entries) {
    out << csv_quote(r.dataset_name) << ',' << task_name(r.task) << ',' << r.metric << ','
        << e.id << ',' << format_double(e.test_score) << ','
        << (e.test_rmse ? format_double(*e.test_rmse) : "") << ','
        << (e.percent_change ? format_double(*e.percent_change) : "") << ','
        << csv_quote(e.constraint_detail) << '\n';
  }
  return out.str();
}

}  // namespace fiboost
