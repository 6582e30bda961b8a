// hyperpol - command-line front end for figure data, calibration, the
// end-to-end pipeline and the adiabatic audit.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hyperpol/config.hpp"
#include "hyperpol/errors.hpp"
#include "hyperpol/runner.hpp"

namespace fs = std::filesystem;
using namespace hyperpol;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::string mode;
  std::string convention;
  unsigned threads = 1;
};

config::RunConfig resolve(const Options& o) {
  auto cfg = o.config_path.empty() ? config::RunConfig::defaults()
                                   : config::load_config(o.config_path);
  if (!o.mode.empty()) {
    cfg.mode = transfer::parse_denominator_mode(o.mode);
    cfg.provenance["modes.denominator"] = "cli";
  }
  if (!o.convention.empty()) {
    cfg.convention = pair::parse_assignment(o.convention);
    cfg.provenance["modes.convention"] = "cli";
  }
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  return cfg;
}

fs::path output_path(const config::RunConfig& cfg, const std::string& name) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  return dir / name;
}

void emit_csv(const config::RunConfig& cfg, const std::string& command, const std::string& name,
              const runner::Table& table) {
  const auto path = output_path(cfg, name);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  runner::write_csv(out, table, runner::metadata_header(cfg, command));
  std::cout << path.string() << '\n';
}

void emit_json(const config::RunConfig& cfg, const std::string& name,
               const nlohmann::ordered_json& doc, bool echo) {
  const auto path = output_path(cfg, name);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::string text = runner::dump_json(doc);
  out << text << '\n';
  if (echo) std::cout << text << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optically pumped NV hyperpolarization of 13C-1H singlet order"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opts;
  app.add_option("--config", opts.config_path, "JSON configuration file (omit for defaults)");
  app.add_option("--out", opts.out_dir, "Output directory (overrides output_dir)");
  app.add_option("--mode", opts.mode, "Steady-state denominator")
      ->check(CLI::IsMember({"as_written", "corrected"}));
  app.add_option("--convention", opts.convention, "Zero-quantum to singlet assignment")
      ->check(CLI::IsMember({"eq6_as_printed", "eq8_consistent"}));
  app.add_option("--threads", opts.threads, "Worker threads for sweeps")
      ->check(CLI::Range(1u, 1024u));

  auto* spectral = app.add_subcommand("fig-spectral", "Spectral density curves and markers");
  auto* transfer = app.add_subcommand("fig-transfer", "Steady-state polarization vs tau_c");
  auto* contour = app.add_subcommand("fig-contour", "Polarization over tau_c x detuning");
  auto* buildup = app.add_subcommand("fig-buildup", "Bulk polarization vs tau_c");
  auto* levels = app.add_subcommand("fig-levels", "Pair eigenlevels vs field");
  auto* pipe = app.add_subcommand("pipeline", "End-to-end singlet-order estimate");
  auto* audit = app.add_subcommand("adiabatic-audit", "Ramp leakage vs t2");
  auto* calib = app.add_subcommand("calibrate", "Calibrate NV yield and rate constant c0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const auto cfg = resolve(opts);
    const unsigned th = opts.threads;

    if (spectral->parsed()) {
      const auto fig = runner::fig_spectral(cfg, th);
      emit_csv(cfg, "fig-spectral", "fig_spectral.csv", fig.curves);
      emit_csv(cfg, "fig-spectral", "fig_spectral_markers.csv", fig.markers);
    } else if (transfer->parsed()) {
      emit_csv(cfg, "fig-transfer", "fig_transfer.csv", runner::fig_transfer(cfg, th));
    } else if (contour->parsed()) {
      const auto fig = runner::fig_contour(cfg, th);
      emit_csv(cfg, "fig-contour", "fig_contour_H.csv", fig.as_table(true));
      emit_csv(cfg, "fig-contour", "fig_contour_C.csv", fig.as_table(false));
    } else if (buildup->parsed()) {
      emit_csv(cfg, "fig-buildup", "fig_buildup.csv", runner::fig_buildup(cfg, th));
    } else if (levels->parsed()) {
      emit_csv(cfg, "fig-levels", "fig_levels.csv", runner::fig_levels(cfg, th));
    } else if (pipe->parsed()) {
      emit_json(cfg, "pipeline.json", runner::pipeline(cfg), true);
    } else if (audit->parsed()) {
      emit_json(cfg, "adiabatic_audit.json", runner::adiabatic_audit(cfg, th), true);
    } else if (calib->parsed()) {
      const auto outcome = runner::calibrate(cfg);
      emit_json(cfg, "calibration.json", outcome.report, true);
      const auto path = output_path(cfg, "config.calibrated.json");
      std::ofstream out(path, std::ios::binary);
      out << runner::dump_json(nlohmann::ordered_json::parse(config::to_json(outcome.calibrated).dump()))
          << '\n';
      std::cerr << "calibrated configuration written to " << path.string() << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return EXIT_SUCCESS;
}
