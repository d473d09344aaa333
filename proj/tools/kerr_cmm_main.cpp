#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "kerrcmm/commands.hpp"
#include "kerrcmm/config.hpp"
#include "kerrcmm/errors.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  kerrcmm::CommandOptions opt;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "path to a run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", args.opt.out_dir,
                  "output directory (overrides output.dir from the config)");
  sub->add_flag("--svg", args.opt.svg, "also write SVG plots next to the CSV output");
  sub->add_option("--seed", args.opt.seed, "seed for the stability-check perturbations");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driven three-mode cavity-magnomechanics with Kerr nonlinearities"};
  app.require_subcommand(1);

  CommonArgs steady_args;
  CLI::App* steady = app.add_subcommand("steady", "solve the steady state at one drive");
  add_common(steady, steady_args);

  CommonArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "sweep the drive and track the branches");
  add_common(sweep, sweep_args);

  CommonArgs spectrum_args;
  CLI::App* spectrum = app.add_subcommand("spectrum", "probe reflection around one branch");
  add_common(spectrum, spectrum_args);

  CommonArgs calibrate_args;
  kerrcmm::CalibrateArgs cal;
  double observed_nu_m_hz = 0.0;
  double at_power_dbm = 0.0;
  std::string branch_name = "auto";
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "fit the bare magnon frequency to an observation");
  add_common(calibrate, calibrate_args);
  calibrate->add_option("--observed-nu-m-hz", observed_nu_m_hz,
                        "measured dressed magnon frequency in Hz")
      ->required();
  calibrate->add_option("--at-power-dbm", at_power_dbm,
                        "source power in dBm at which it was measured")
      ->required();
  calibrate->add_option("--branch", branch_name,
                        "branch the observation sits on: auto, lower, or upper");

  CommonArgs verify_args;
  CLI::App* verify =
      app.add_subcommand("verify", "cross-check branch stability against time evolution");
  add_common(verify, verify_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (steady->parsed()) {
      const auto cfg = kerrcmm::parse_config(steady_args.config_path);
      return kerrcmm::cmd_steady(cfg, steady_args.opt);
    }
    if (sweep->parsed()) {
      const auto cfg = kerrcmm::parse_config(sweep_args.config_path);
      return kerrcmm::cmd_sweep(cfg, sweep_args.opt);
    }
    if (spectrum->parsed()) {
      const auto cfg = kerrcmm::parse_config(spectrum_args.config_path);
      return kerrcmm::cmd_spectrum(cfg, spectrum_args.opt);
    }
    if (calibrate->parsed()) {
      const auto cfg = kerrcmm::parse_config(calibrate_args.config_path);
      cal.observed_nu_m_hz = observed_nu_m_hz;
      cal.at_power_dbm = at_power_dbm;
      if (branch_name == "auto") {
        cal.hint = kerrcmm::BranchHint::automatic;
      } else if (branch_name == "lower") {
        cal.hint = kerrcmm::BranchHint::lower;
      } else if (branch_name == "upper") {
        cal.hint = kerrcmm::BranchHint::upper;
      } else {
        std::fprintf(stderr, "calibrate: --branch must be auto, lower, or upper\n");
        return 1;
      }
      return kerrcmm::cmd_calibrate(cfg, cal, calibrate_args.opt);
    }
    if (verify->parsed()) {
      const auto cfg = kerrcmm::parse_config(verify_args.config_path);
      return kerrcmm::cmd_verify(cfg, verify_args.opt);
    }
  } catch (const kerrcmm::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const kerrcmm::NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
