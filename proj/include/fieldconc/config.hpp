#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fieldconc/errors.hpp"
#include "fieldconc/montecarlo.hpp"
#include "fieldconc/multi_index.hpp"
#include "fieldconc/samplers.hpp"
#include "fieldconc/series.hpp"

namespace fieldconc {

using json = nlohmann::json;

namespace cfg {

/// Strict-schema helper: every present key must be allowed, every required key
/// present. Errors name the offending key and its location.
inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed,
                       std::initializer_list<const char*> required = {}) {
  if (!obj.is_object())
    throw InvalidInputError("config error: expected an object at " + path);
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        ok = true;
        break;
      }
    if (!ok)
      throw InvalidInputError("config error: unknown key \"" + item.key() + "\" in " + path);
  }
  for (const char* key : required)
    if (!obj.contains(key))
      throw InvalidInputError("config error: missing key \"" + std::string(key) + "\" in " +
                              path);
  }

inline double get_number(const json& obj, const std::string& path, const char* key) {
  if (!obj.at(key).is_number())
    throw InvalidInputError("config error: key \"" + std::string(key) + "\" in " + path +
                            " must be a number");
  return obj.at(key).get<double>();
}

inline std::int64_t get_integer(const json& obj, const std::string& path, const char* key) {
  if (!obj.at(key).is_number_integer())
    throw InvalidInputError("config error: key \"" + std::string(key) + "\" in " + path +
                            " must be an integer");
  return obj.at(key).get<std::int64_t>();
}

inline std::string get_string(const json& obj, const std::string& path, const char* key) {
  if (!obj.at(key).is_string())
    throw InvalidInputError("config error: key \"" + std::string(key) + "\" in " + path +
                            " must be a string");
  return obj.at(key).get<std::string>();
}

inline ScalarDistribution parse_distribution(const json& obj, const std::string& path) {
  check_keys(obj, path, {"kind", "c", "a", "b", "sigma", "half_width"}, {"kind"});
  const std::string kind = get_string(obj, path, "kind");
  if (kind == "constant") {
    check_keys(obj, path, {"kind", "c"}, {"c"});
    return ScalarDistribution::constant(get_number(obj, path, "c"));
  }
  if (kind == "two_point") {
    check_keys(obj, path, {"kind", "c"}, {"c"});
    return ScalarDistribution::two_point(get_number(obj, path, "c"));
  }
  if (kind == "uniform") {
    check_keys(obj, path, {"kind", "a", "b"}, {"a", "b"});
    return ScalarDistribution::uniform(get_number(obj, path, "a"), get_number(obj, path, "b"));
  }
  if (kind == "gaussian") {
    check_keys(obj, path, {"kind", "sigma"}, {"sigma"});
    return ScalarDistribution::gaussian(get_number(obj, path, "sigma"));
  }
  if (kind == "centered_uniform") {
    check_keys(obj, path, {"kind", "half_width"}, {"half_width"});
    return ScalarDistribution::centered_uniform(get_number(obj, path, "half_width"));
  }
  throw InvalidInputError("config error: unknown distribution kind \"" + kind + "\" in " + path);
}

inline FieldDistribution parse_field(const json& obj) {
  check_keys(obj, "field", {"dist", "dependence", "site_dists"}, {"dist", "dependence"});
  FieldDistribution fd;
  fd.dist = parse_distribution(obj.at("dist"), "field.dist");
  const json& dep = obj.at("dependence");
  if (dep.is_string()) {
    const std::string name = dep.get<std::string>();
    if (name == "independent")
      fd.dependence = Dependence::Independent;
    else if (name == "martingale_product")
      fd.dependence = Dependence::MartingaleProduct;
    else
      throw InvalidInputError("config error: unknown dependence \"" + name +
                              "\" in field.dependence");
  } else if (dep.is_object()) {
    check_keys(dep, "field.dependence", {"na_gaussian"}, {"na_gaussian"});
    const json& na = dep.at("na_gaussian");
    check_keys(na, "field.dependence.na_gaussian", {"rho", "scheme"}, {"rho"});
    fd.dependence = Dependence::NaGaussian;
    fd.rho = get_number(na, "field.dependence.na_gaussian", "rho");
    if (na.contains("scheme")) {
      const std::string scheme = get_string(na, "field.dependence.na_gaussian", "scheme");
      if (scheme == "all_pairs")
        fd.scheme = NaScheme::AllPairs;
      else if (scheme == "adjacent")
        fd.scheme = NaScheme::Adjacent;
      else
        throw InvalidInputError("config error: unknown na_gaussian scheme \"" + scheme + "\"");
    }
  } else {
    throw InvalidInputError("config error: field.dependence must be a string or an object");
  }
  if (obj.contains("site_dists")) {
    if (!obj.at("site_dists").is_array())
      throw InvalidInputError("config error: key \"site_dists\" in field must be an array");
    std::size_t i = 0;
    for (const auto& entry : obj.at("site_dists"))
      fd.site_dists.push_back(
          parse_distribution(entry, "field.site_dists[" + std::to_string(i++) + "]"));
  }
  return fd;
}

inline MultiIndex parse_lattice(const json& obj) {
  check_keys(obj, "lattice", {"d", "n", "N"}, {"d"});
  const int d = static_cast<int>(get_integer(obj, "lattice", "d"));
  if (obj.contains("n") == obj.contains("N"))
    throw InvalidInputError("config error: lattice needs exactly one of \"n\" or \"N\"");
  if (obj.contains("N")) return MultiIndex::cube(d, get_integer(obj, "lattice", "N"));
  const json& arr = obj.at("n");
  if (!arr.is_array())
    throw InvalidInputError("config error: key \"n\" in lattice must be an array");
  std::vector<std::int64_t> coords;
  for (const auto& v : arr) coords.push_back(v.get<std::int64_t>());
  if (static_cast<int>(coords.size()) != d)
    throw InvalidInputError("config error: lattice \"n\" length must equal \"d\"");
  return MultiIndex(std::move(coords));
}

inline AlphaVector parse_alpha(const json& arr, const std::string& path) {
  if (!arr.is_array())
    throw InvalidInputError("config error: " + path + " must be an array");
  std::vector<double> a;
  for (const auto& v : arr) a.push_back(v.get<double>());
  return AlphaVector::create(std::move(a));
}

}  // namespace cfg

struct VerifyTask {
  double r = 2.0;
  std::int64_t trials = 10000;
  bool inclusive = false;
  std::vector<BoundCheck> checks;                 // explicit points
  std::vector<BoundKind> grid_bounds;             // plus an optional grid:
  std::vector<double> x_factors;                  // x = factor * sqrt(M_r)
  std::vector<double> j_grid;
};

struct SeriesTask {
  SeriesSpec spec;
  std::int64_t trials_per_index = 10000;
};

struct WmbTask {
  ScalarDistribution xi;
  std::vector<double> probes;
  std::vector<ScalarDistribution> sites;  // empty: use the field's shared law
};

struct MomentTask {
  ScalarDistribution xi;
  double r = 1.0;
  int p = 1;
};

struct CondSeriesTask {
  ScalarDistribution xi;
  AlphaVector alpha;
  std::int64_t N = 1;
};

struct DumpFieldTask {
  std::int64_t trial = 0;
  std::string filename = "field.csv";
};

struct BoundEvalTask {
  std::string name;
  json params;
};

using Task = std::variant<VerifyTask, SeriesTask, WmbTask, MomentTask, CondSeriesTask,
                          DumpFieldTask, BoundEvalTask>;

/// A full experiment description as read from the JSON config file. Parsing is
/// strict: unknown keys are rejected with the offending key named.
struct ExperimentConfig {
  int schema_version = 1;
  std::uint64_t seed = 0;
  FieldDistribution field;
  MultiIndex lattice;
  Task task;
  std::string output_dir = ".";
  std::string task_kind;

  static ExperimentConfig parse(const json& root);
  static ExperimentConfig parse_text(const std::string& text);
};

namespace cfg {

inline BoundCheck parse_check(const json& obj, const std::string& path, double r,
                              bool inclusive) {
  check_keys(obj, path, {"bound", "x", "y", "j", "t", "kappa1"}, {"bound", "x"});
  BoundCheck check;
  check.kind = parse_bound(get_string(obj, path, "bound"));
  check.x = get_number(obj, path, "x");
  check.r = r;
  check.inclusive = inclusive;
  if (obj.contains("y")) check.y = get_number(obj, path, "y");
  if (obj.contains("j")) check.j = get_number(obj, path, "j");
  if (obj.contains("t")) check.t = get_number(obj, path, "t");
  if (obj.contains("kappa1")) check.kappa1 = get_number(obj, path, "kappa1");
  return check;
}

inline Task parse_task(const json& obj, const FieldDistribution& field, std::string& kind_out) {
  if (!obj.is_object() || !obj.contains("kind"))
    throw InvalidInputError("config error: missing key \"kind\" in task");
  const std::string kind = get_string(obj, "task", "kind");
  kind_out = kind;
  if (kind == "verify") {
    check_keys(obj, "task",
               {"kind", "r", "trials", "inclusive", "checks", "bounds", "x_factors", "j_grid"},
               {"trials"});
    VerifyTask task;
    if (obj.contains("r")) task.r = get_number(obj, "task", "r");
    task.trials = get_integer(obj, "task", "trials");
    if (obj.contains("inclusive")) task.inclusive = obj.at("inclusive").get<bool>();
    if (obj.contains("checks"))
      for (std::size_t i = 0; i < obj.at("checks").size(); ++i)
        task.checks.push_back(parse_check(obj.at("checks")[i],
                                          "task.checks[" + std::to_string(i) + "]", task.r,
                                          task.inclusive));
    if (obj.contains("bounds"))
      for (const auto& b : obj.at("bounds"))
        task.grid_bounds.push_back(parse_bound(b.get<std::string>()));
    if (obj.contains("x_factors"))
      for (const auto& v : obj.at("x_factors")) task.x_factors.push_back(v.get<double>());
    if (obj.contains("j_grid"))
      for (const auto& v : obj.at("j_grid")) task.j_grid.push_back(v.get<double>());
    const bool has_grid =
        !task.grid_bounds.empty() && !task.x_factors.empty() && !task.j_grid.empty();
    if (task.checks.empty() && !has_grid)
      throw InvalidInputError(
          "config error: verify task needs \"checks\" or a full grid "
          "(\"bounds\", \"x_factors\", \"j_grid\")");
    return task;
  }
  if (kind == "series") {
    check_keys(obj, "task",
               {"kind", "alpha", "r", "epsilon", "weight", "statistic", "N",
                "trials_per_index", "inclusive"},
               {"alpha", "r", "epsilon", "weight", "statistic", "trials_per_index"});
    SeriesTask task;
    task.spec.alpha = parse_alpha(obj.at("alpha"), "task.alpha");
    task.spec.r = get_number(obj, "task", "r");
    task.spec.epsilon = get_number(obj, "task", "epsilon");
    task.spec.statistic = parse_statistic(get_string(obj, "task", "statistic"));
    if (obj.contains("inclusive")) task.spec.inclusive = obj.at("inclusive").get<bool>();
    const json& weight = obj.at("weight");
    if (weight.is_string()) {
      const std::string w = weight.get<std::string>();
      if (w == "power")
        task.spec.weight_kind = WeightKind::Power;
      else if (w == "half_log")
        task.spec.weight_kind = WeightKind::HalfLog;
      else
        throw InvalidInputError("config error: unknown weight \"" + w + "\" in task.weight");
      if (!obj.contains("N"))
        throw InvalidInputError("config error: missing key \"N\" in task");
      task.spec.cube_N = get_integer(obj, "task", "N");
    } else {
      check_keys(weight, "task.weight", {"custom_array"}, {"custom_array"});
      task.spec.weight_kind = WeightKind::CustomArray;
      std::size_t i = 0;
      for (const auto& entry : weight.at("custom_array")) {
        const std::string path = "task.weight.custom_array[" + std::to_string(i++) + "]";
        check_keys(entry, path, {"n", "a"}, {"n", "a"});
        std::vector<std::int64_t> coords;
        for (const auto& c : entry.at("n")) coords.push_back(c.get<std::int64_t>());
        task.spec.custom_weights.emplace_back(MultiIndex(std::move(coords)),
                                              get_number(entry, path, "a"));
      }
    }
    task.trials_per_index = get_integer(obj, "task", "trials_per_index");
    task.spec.validate();
    return task;
  }
  if (kind == "conditions_wmb") {
    check_keys(obj, "task", {"kind", "xi", "probes", "sites"}, {"xi", "probes"});
    WmbTask task;
    task.xi = parse_distribution(obj.at("xi"), "task.xi");
    for (const auto& v : obj.at("probes")) task.probes.push_back(v.get<double>());
    if (obj.contains("sites")) {
      std::size_t i = 0;
      for (const auto& entry : obj.at("sites"))
        task.sites.push_back(
            parse_distribution(entry, "task.sites[" + std::to_string(i++) + "]"));
    } else if (!field.site_dists.empty()) {
      task.sites = field.site_dists;
    } else {
      task.sites.push_back(field.dist);
    }
    return task;
  }
  if (kind == "conditions_moment") {
    check_keys(obj, "task", {"kind", "xi", "r", "p"}, {"xi", "r", "p"});
    MomentTask task;
    task.xi = parse_distribution(obj.at("xi"), "task.xi");
    task.r = get_number(obj, "task", "r");
    task.p = static_cast<int>(get_integer(obj, "task", "p"));
    return task;
  }
  if (kind == "conditions_series") {
    check_keys(obj, "task", {"kind", "xi", "alpha", "N"}, {"xi", "alpha", "N"});
    CondSeriesTask task;
    task.xi = parse_distribution(obj.at("xi"), "task.xi");
    task.alpha = parse_alpha(obj.at("alpha"), "task.alpha");
    task.N = get_integer(obj, "task", "N");
    return task;
  }
  if (kind == "dump_field") {
    check_keys(obj, "task", {"kind", "trial", "filename"}, {});
    DumpFieldTask task;
    if (obj.contains("trial")) task.trial = get_integer(obj, "task", "trial");
    if (obj.contains("filename")) task.filename = get_string(obj, "task", "filename");
    return task;
  }
  if (kind == "bound_eval") {
    check_keys(obj, "task", {"kind", "name", "params"}, {"name", "params"});
    BoundEvalTask task;
    task.name = get_string(obj, "task", "name");
    task.params = obj.at("params");
    return task;
  }
  throw InvalidInputError("config error: unknown task kind \"" + kind + "\"");
}

}  // namespace cfg

inline ExperimentConfig ExperimentConfig::parse(const json& root) {
  cfg::check_keys(root, "$", {"schema_version", "seed", "field", "lattice", "task", "output_dir"},
                  {"schema_version", "seed", "field", "lattice", "task"});
  ExperimentConfig config;
  config.schema_version = static_cast<int>(cfg::get_integer(root, "$", "schema_version"));
  if (config.schema_version != 1)
    throw InvalidInputError("config error: unsupported schema_version");
  config.seed = root.at("seed").get<std::uint64_t>();
  config.field = cfg::parse_field(root.at("field"));
  config.lattice = cfg::parse_lattice(root.at("lattice"));
  config.task = cfg::parse_task(root.at("task"), config.field, config.task_kind);
  if (root.contains("output_dir"))
    config.output_dir = cfg::get_string(root, "$", "output_dir");
  return config;
}

inline ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInputError(std::string("config error: invalid JSON: ") + e.what());
  }
  return parse(root);
}

}  // namespace fieldconc
