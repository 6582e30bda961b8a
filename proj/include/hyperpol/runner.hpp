// runner.hpp - figure-data emitters and end-to-end commands.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperpol/config.hpp"

namespace hyperpol::runner {

/// Column-named numeric table, written as CSV with a '#' metadata header.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Header lines (without the leading "# "): command, config hash, mode flags
/// and the parameter provenance audit.
std::vector<std::string> metadata_header(const config::RunConfig& cfg, const std::string& command);

/// Doubles are printed with 17 significant digits.
void write_csv(std::ostream& os, const Table& table, const std::vector<std::string>& header);
std::string format_double(double v);

/// JSON text with the same float format as the CSV output (2-space indent).
std::string dump_json(const nlohmann::ordered_json& doc);

struct SpectralFigure {
  Table curves;   ///< tau_c_s, omega_rad_s, J
  Table markers;  ///< tau_c_s, marker (0..3 = w0H, w0C, w2C, w2H), omega_rad_s, J
};
SpectralFigure fig_spectral(const config::RunConfig& cfg, unsigned threads = 1);

/// tau_c_s, ps_H, ps_C, abs_ps_H, abs_ps_C
Table fig_transfer(const config::RunConfig& cfg, unsigned threads = 1);

struct ContourFigure {
  std::vector<double> tau_c;       ///< rows
  std::vector<double> delta_prime; ///< columns, rad/s
  std::vector<std::vector<double>> ps_h;
  std::vector<std::vector<double>> ps_c;

  /// First column tau_c_s, then one column per Delta' value.
  Table as_table(bool proton) const;
};
ContourFigure fig_contour(const config::RunConfig& cfg, unsigned threads = 1);

/// tau_c_s, p_H, p_C. Requires a calibrated c0 (ConfigError otherwise).
Table fig_buildup(const config::RunConfig& cfg, unsigned threads = 1);

/// b_t, E_S0_hz, E_T0_hz, E_Tp_hz, E_Tm_hz, S_S0, S_T0, S_Tp, S_Tm.
/// The first row is B = 0.
Table fig_levels(const config::RunConfig& cfg, unsigned threads = 1);

/// Averaging, build-up, adiabatic map, singlet order and ramp leakage.
/// Requires a calibrated c0.
nlohmann::ordered_json pipeline(const config::RunConfig& cfg);

/// Leakage and Landau-Zener estimate for every t2 in the sweep (t2 = 0 is
/// the sudden projection).
nlohmann::ordered_json adiabatic_audit(const config::RunConfig& cfg, unsigned threads = 1);

struct CalibrationOutcome {
  nlohmann::ordered_json report;
  config::RunConfig calibrated;
};
/// Calibrates the NV yield to the target N_e/N ratio, then c0 to the target
/// p_H at the calibration tau_c.
CalibrationOutcome calibrate(const config::RunConfig& cfg);

}  // namespace hyperpol::runner
