// Experiment runner: seeded Monte Carlo verification of concentration bounds
// on lattice-indexed random fields, convergence-series diagnostics, and
// condition checking, driven by JSON configs with CSV/SVG reports.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fieldconc/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  std::optional<std::string> out;
  bool no_timestamp = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
  auto* config = cmd->add_option("--config", args.config_path, "experiment config (JSON)");
  if (config_required) config->required();
  cmd->add_option("--seed", [&args](const CLI::results_t& res) {
    args.seed = std::stoull(res[0]);
    return true;
  },
                  "override the config seed");
  cmd->add_option("--workers", args.workers,
                  "worker threads (default: FIELDCONC_WORKERS or hardware)");
  cmd->add_option("--out", [&args](const CLI::results_t& res) {
    args.out = res[0];
    return true;
  },
                  "override the config output directory");
  cmd->add_flag("--no-timestamp", args.no_timestamp, "omit the timestamp comment from SVG files");
}

fieldconc::RunOptions to_options(const CommonArgs& args) {
  fieldconc::RunOptions options;
  options.seed_override = args.seed;
  options.workers = args.workers;
  options.out_override = args.out;
  options.no_timestamp = args.no_timestamp;
  return options;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"concentration-bound verification for lattice random fields"};
  app.require_subcommand(1);

  CommonArgs verify_args, series_args, wmb_args, moment_args, cseries_args, dump_args,
      bound_args;

  auto* verify = app.add_subcommand("verify", "run domination verdicts from a config");
  add_common(verify, verify_args);

  auto* series = app.add_subcommand("series", "convergence-series diagnostics");
  auto* series_scan = series->add_subcommand("scan", "scan a weighted tail-probability series");
  add_common(series_scan, series_args);
  series->require_subcommand(1);

  auto* conditions = app.add_subcommand("conditions", "hypothesis checking");
  auto* cond_wmb = conditions->add_subcommand("wmb", "weak mean boundedness report");
  add_common(cond_wmb, wmb_args);
  auto* cond_moment = conditions->add_subcommand("moment", "moment functional value");
  add_common(cond_moment, moment_args);
  auto* cond_series = conditions->add_subcommand("series", "truncated second-moment series");
  add_common(cond_series, cseries_args);
  conditions->require_subcommand(1);

  auto* dump = app.add_subcommand("dump-field", "write one field realization as CSV");
  add_common(dump, dump_args);

  auto* bound = app.add_subcommand("bound", "closed-form bound evaluation");
  auto* bound_eval = bound->add_subcommand("eval", "evaluate one bound");
  std::string bound_name, bound_params;
  add_common(bound_eval, bound_args, /*config_required=*/false);
  bound_eval->add_option("--name", bound_name, "bound name");
  bound_eval->add_option("--params", bound_params, "bound parameters (JSON object)");
  bound->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed())
      return fieldconc::run_config_file(verify_args.config_path, "verify",
                                        to_options(verify_args));
    if (series_scan->parsed())
      return fieldconc::run_config_file(series_args.config_path, "series",
                                        to_options(series_args));
    if (cond_wmb->parsed())
      return fieldconc::run_config_file(wmb_args.config_path, "conditions_wmb",
                                        to_options(wmb_args));
    if (cond_moment->parsed())
      return fieldconc::run_config_file(moment_args.config_path, "conditions_moment",
                                        to_options(moment_args));
    if (cond_series->parsed())
      return fieldconc::run_config_file(cseries_args.config_path, "conditions_series",
                                        to_options(cseries_args));
    if (dump->parsed())
      return fieldconc::run_config_file(dump_args.config_path, "dump_field",
                                        to_options(dump_args));
    if (bound_eval->parsed()) {
      if (!bound_name.empty()) {
        fieldconc::json params;
        try {
          params = bound_params.empty() ? fieldconc::json::object()
                                        : fieldconc::json::parse(bound_params);
        } catch (const fieldconc::json::parse_error& e) {
          throw fieldconc::InvalidInputError(std::string("--params is not valid JSON: ") +
                                             e.what());
        }
        std::cout << fieldconc::format_double(fieldconc::eval_bound_by_name(bound_name, params))
                  << '\n';
        return 0;
      }
      if (!bound_args.config_path.empty())
        return fieldconc::run_config_file(bound_args.config_path, "bound_eval",
                                          to_options(bound_args));
      throw fieldconc::InvalidInputError("bound eval: need --name/--params or --config");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
