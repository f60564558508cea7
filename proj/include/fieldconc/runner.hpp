#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fieldconc/conditions.hpp"
#include "fieldconc/config.hpp"
#include "fieldconc/field_io.hpp"
#include "fieldconc/svg.hpp"

namespace fieldconc {

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;
  int workers = 0;  // 0: resolve from env / hardware
  bool no_timestamp = false;
};

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw InvalidInputError("cannot open output file " + (dir / name).string());
  return os;
}

inline std::string bool_text(bool v) { return v ? "true" : "false"; }

}  // namespace detail

/// Evaluates one named bound from a JSON parameter object; the CLI prints the
/// result with 17 significant digits.
inline double eval_bound_by_name(const std::string& name, const json& params) {
  const auto num = [&](const char* key, std::optional<double> fallback = {}) {
    if (!params.contains(key)) {
      if (fallback) return *fallback;
      throw InvalidInputError("bound eval: missing parameter \"" + std::string(key) + "\"");
    }
    return params.at(key).get<double>();
  };
  MomentAggregates agg;
  agg.r = num("r", 2.0);
  agg.d = static_cast<int>(num("d", 1.0));
  agg.M_r = num("M_r", 0.0);
  agg.Lambda = num("Lambda", 0.0);
  agg.B_r = num("B_r", 0.0);
  agg.D = num("D", 0.0);
  agg.M_tilde_r = num("M_tilde_r", 0.0);
  agg.Lambda_tilde = num("Lambda_tilde", 0.0);
  if (name == "nd_fuk_nagaev") return nd_fuk_nagaev_bound(num("x"), num("y"), agg).analytic_term;
  if (name == "nd_hj") return nd_hj_bound(num("x"), num("j"), agg).analytic_term;
  if (name == "nd_exponential")
    return nd_exponential_bound(num("x"), num("t"), num("b"), num("kappa1", 1.0),
                                num("sigma2"), static_cast<std::int64_t>(num("n_count")));
  if (name == "martingale_fuk_nagaev_onesided")
    return martingale_fuk_nagaev_onesided(num("x"), num("y"), agg).analytic_term;
  if (name == "martingale_fuk_nagaev_twosided")
    return martingale_fuk_nagaev_twosided(num("x"), num("y"), agg).analytic_term;
  if (name == "martingale_hj") return martingale_hj_bound(num("x"), num("j"), agg).analytic_term;
  if (name == "doob_factor") return doob_factor(num("alpha"), static_cast<int>(num("d", 1.0)));
  if (name == "product_gap_lower_bound") {
    std::vector<double> a;
    for (const auto& v : params.at("a")) a.push_back(v.get<double>());
    return product_gap_lower_bound(a, num("delta"));
  }
  throw InvalidInputError("bound eval: unknown bound \"" + name + "\"");
}

namespace detail {

inline std::vector<BoundCheck> expand_verify_checks(const VerifyTask& task,
                                                    const FieldDistribution& field,
                                                    const MultiIndex& lattice) {
  std::vector<BoundCheck> checks = task.checks;
  if (!task.grid_bounds.empty()) {
    // Grid x values scale with sqrt of the relevant moment aggregate.
    const MomentAggregates agg = exact_aggregates(field, lattice, task.r, /*y=*/1.0);
    for (const BoundKind kind : task.grid_bounds) {
      const double scale =
          std::sqrt(is_martingale_bound(kind) ? agg.M_tilde_r : agg.M_r);
      for (const double factor : task.x_factors) {
        for (const double j : task.j_grid) {
          BoundCheck check;
          check.kind = kind;
          check.r = task.r;
          check.inclusive = task.inclusive;
          check.x = factor * scale;
          if (kind == BoundKind::NdHj || kind == BoundKind::MartingaleHj)
            check.j = j;
          else
            check.y = check.x / j;
          checks.push_back(check);
        }
      }
    }
  }
  return checks;
}

}  // namespace detail

/// Runs a parsed experiment. Returns the process exit code: 0 on success, 2
/// when a domination verdict failed, throwing (mapped to 1 by the CLI) on
/// configuration or runtime errors.
inline int run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const std::uint64_t seed = options.seed_override.value_or(config.seed);
  const std::filesystem::path out_dir = options.out_override.value_or(config.output_dir);
  const bool timestamp = !options.no_timestamp;

  if (const auto* task = std::get_if<VerifyTask>(&config.task)) {
    const FieldSampler sampler(config.field, config.lattice);
    const auto checks = detail::expand_verify_checks(*task, config.field, config.lattice);
    std::vector<DominationVerdict> verdicts;
    verdicts.reserve(checks.size());
    for (const auto& check : checks)
      verdicts.push_back(
          verify_domination(sampler, check, task->trials, seed, options.workers));

    auto csv = detail::open_output(out_dir, "verdicts.csv");
    csv << "bound,x,y_or_j,empirical,ci,analytic,margin,pass\n";
    bool all_pass = true;
    for (const auto& v : verdicts) {
      csv << bound_name(v.kind) << ',' << format_double(v.x) << ',' << format_double(v.y_or_j)
          << ',' << format_double(v.empirical.p_hat) << ','
          << format_double(v.empirical.ci_halfwidth) << ',' << format_double(v.analytic) << ','
          << format_double(v.margin) << ',' << detail::bool_text(v.pass) << '\n';
      all_pass = all_pass && v.pass;
    }
    csv.close();

    PlotSeries empirical{"empirical", "#1f77b4", {}};
    PlotSeries bound{"bound total", "#d62728", {}};
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
      empirical.points.emplace_back(static_cast<double>(i), verdicts[i].empirical.p_hat);
      bound.points.emplace_back(static_cast<double>(i), verdicts[i].bound_total);
    }
    auto svg = detail::open_output(out_dir, "verify.svg");
    write_svg_chart(svg, "tail bound domination", "check index", "probability",
                    {empirical, bound}, /*log_y=*/true, timestamp);
    return all_pass ? 0 : 2;
  }

  if (const auto* task = std::get_if<SeriesTask>(&config.task)) {
    const SeriesReport report =
        scan_series(task->spec, config.field, task->trials_per_index, seed, options.workers);
    auto csv = detail::open_output(out_dir, "series.csv");
    csv << "shell,contribution,ci_halfwidth,cumulative\n";
    double cumulative = 0.0;
    for (const auto& row : report.per_shell) {
      cumulative += row.contribution;
      csv << row.shell << ',' << format_double(row.contribution) << ','
          << format_double(row.ci_halfwidth) << ',' << format_double(cumulative) << '\n';
    }
    csv.close();

    PlotSeries shells{"shell contribution", "#1f77b4", {}};
    for (const auto& row : report.per_shell)
      shells.points.emplace_back(static_cast<double>(row.shell), row.contribution);
    auto svg = detail::open_output(out_dir, "series.svg");
    write_svg_chart(svg, "series shell contributions", "shell (max coordinate)", "contribution",
                    {shells}, /*log_y=*/true, timestamp);
    return 0;
  }

  if (const auto* task = std::get_if<WmbTask>(&config.task)) {
    const WmbReport report = check_wmb(task->sites, task->xi, task->probes, config.lattice);
    auto csv = detail::open_output(out_dir, "wmb.csv");
    csv << "probe_x,mean_tail,xi_tail,ratio\n";
    for (const auto& row : report.rows)
      csv << format_double(row.x) << ',' << format_double(row.mean_tail) << ','
          << format_double(row.xi_tail) << ',' << format_double(row.ratio) << '\n';
    csv.close();
    std::cout << "kappa1_hat=" << format_double(report.kappa1_hat)
              << " kappa2_hat=" << format_double(report.kappa2_hat)
              << " holds_wmd=" << detail::bool_text(report.holds_wmd)
              << " holds_wmb=" << detail::bool_text(report.holds_wmb) << '\n';
    return 0;
  }

  if (const auto* task = std::get_if<MomentTask>(&config.task)) {
    const double value = moment_functional(task->xi, task->r, task->p);
    auto csv = detail::open_output(out_dir, "moment.csv");
    csv << "r,p,value\n";
    csv << format_double(task->r) << ',' << task->p << ',' << format_double(value) << '\n';
    csv.close();
    std::cout << format_double(value) << '\n';
    return 0;
  }

  if (const auto* task = std::get_if<CondSeriesTask>(&config.task)) {
    const TruncatedSeriesReport report =
        truncated_second_moment_series(task->xi, task->alpha, task->N);
    auto csv = detail::open_output(out_dir, "moment_series.csv");
    csv << "shell,contribution,cumulative\n";
    double cumulative = 0.0;
    for (std::size_t s = 0; s < report.shell_contribution.size(); ++s) {
      cumulative += report.shell_contribution[s];
      csv << (s + 1) << ',' << format_double(report.shell_contribution[s]) << ','
          << format_double(cumulative) << '\n';
    }
    csv.close();
    std::cout << format_double(report.partial_sum) << '\n';
    return 0;
  }

  if (const auto* task = std::get_if<DumpFieldTask>(&config.task)) {
    const FieldSampler sampler(config.field, config.lattice);
    const FieldSample field = sampler.sample(seed, static_cast<std::uint64_t>(task->trial));
    auto csv = detail::open_output(out_dir, task->filename);
    write_field_csv(csv, field);
    return 0;
  }

  const auto& task = std::get<BoundEvalTask>(config.task);
  std::cout << format_double(eval_bound_by_name(task.name, task.params)) << '\n';
  return 0;
}

/// Convenience wrapper used by the CLI and by tests: load, check the task kind
/// against the invoked subcommand, run.
inline int run_config_file(const std::string& path, const std::string& expected_kind,
                           const RunOptions& options) {
  std::ifstream is(path);
  if (!is) throw InvalidInputError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << is.rdbuf();
  const ExperimentConfig config = ExperimentConfig::parse_text(buffer.str());
  if (!expected_kind.empty() && config.task_kind != expected_kind)
    throw InvalidInputError("config error: task kind \"" + config.task_kind +
                            "\" does not match the \"" + expected_kind + "\" subcommand");
  return run_experiment(config, options);
}

}  // namespace fieldconc
