#include <CLI11.hpp>

#include "commands.hpp"
#include "tnbma/errors.hpp"
#include "tnbma/log.hpp"

namespace {

void add_common_options(CLI::App* cmd, tnbma::cli::CommonArgs& args) {
  cmd->add_option("--archive", args.archive_path, "Forecast archive CSV")->required();
  cmd->add_option("--groups", args.groups,
                  "Group preset (two-group, three-group) or spec file path");
  cmd->add_option("--training-days", args.training_days, "Training window length (calendar days)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--levels", args.levels_percent,
                  "Central prediction interval levels, percent")
      ->delimiter(',');
  cmd->add_option("--seed", args.seed, "Seed for randomized tie-breaking");
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--jobs", args.jobs, "Worker pool size (0 = all processors)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BMA calibration of ensemble wind-speed forecasts with "
               "zero-truncated normal mixture components"};
  app.require_subcommand(1);

  tnbma::cli::CommonArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "Fit models over the sliding training windows");
  add_common_options(fit, fit_args);
  fit->add_option("--variant", fit_args.variant,
                  "Estimation variant: naive, mean-corrected, full-ml or all");
  fit->add_option("--date", fit_args.date, "Fit only this verification date (YYYY-MM-DD)");

  tnbma::cli::CommonArgs verify_args;
  verify_args.variant = "all";
  CLI::App* verify = app.add_subcommand(
      "verify", "Rolling fit-then-score; writes score tables and histograms");
  add_common_options(verify, verify_args);
  verify->add_option("--variant", verify_args.variant,
                     "Estimation variant to verify (default: all)");

  tnbma::cli::PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand("predict", "Predictive summaries for one date");
  predict->add_option("--archive", predict_args.archive_path, "Forecast archive CSV")->required();
  predict->add_option("--model", predict_args.model_path, "Fitted model file")->required();
  predict->add_option("--date", predict_args.date, "Forecast date (YYYY-MM-DD)")->required();
  predict->add_option("--levels", predict_args.levels_percent,
                      "Central prediction interval levels, percent")
      ->delimiter(',');
  predict->add_option("--out", predict_args.out_dir, "Output directory");

  tnbma::cli::SimulateArgs sim_args;
  CLI::App* simulate = app.add_subcommand("simulate", "Write a synthetic forecast archive");
  simulate->add_option("--config", sim_args.config_path, "Synthetic generator config file");
  simulate->add_option("--out", sim_args.out_path, "Archive CSV to write")->required();
  simulate->add_option("--groups", sim_args.groups, "Group preset or spec file");
  simulate->add_option("--stations", sim_args.stations, "Station count")->check(CLI::PositiveNumber);
  simulate->add_option("--days", sim_args.days, "Day count")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_args.seed, "Generator seed")
      ->each([&](const std::string&) { sim_args.seed_set = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed()) return tnbma::cli::cmd_fit(fit_args);
    if (verify->parsed()) return tnbma::cli::cmd_verify(verify_args);
    if (predict->parsed()) return tnbma::cli::cmd_predict(predict_args);
    if (simulate->parsed()) return tnbma::cli::cmd_simulate(sim_args);
  } catch (const tnbma::NumericError& e) {
    tnbma::log::error(e.what());
    return 3;
  } catch (const tnbma::ParseError& e) {
    tnbma::log::error(e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    tnbma::log::error(e.what());
    return 2;
  } catch (const std::exception& e) {
    tnbma::log::error("unexpected error: ", e.what());
    return 1;
  }
  return 0;
}
