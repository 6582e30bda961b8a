// config.hpp - run configuration: loading, validation, provenance, hashing.
//
// The file format is JSON. Every key is optional; omitted keys take the
// reference values of the polarizer and ramp. Unknown keys are rejected.
// Frequencies are written in cyclic units (keys ending in _hz) and converted
// to rad/s on load.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperpol/buildup.hpp"
#include "hyperpol/nv_orientation.hpp"
#include "hyperpol/pair_dynamics.hpp"
#include "hyperpol/transfer.hpp"
#include "hyperpol/units.hpp"

namespace hyperpol::config {

struct SampleSpec {
  double g_hz = 220.0;
  double gamma_c = 0.0;  ///< rad/(s T)
  double gamma_h = 0.0;  ///< rad/(s T)
  double mixture_ratio = 10.0;  ///< labelled acid : water
  double field_tesla = 0.36;    ///< polarizing-cell field
};

/// Logarithmic or linear grid [min, max] with `points` samples.
struct Grid {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 0;
  bool log = true;

  std::vector<double> values() const;
};

struct Calibration {
  std::optional<double> c0_rate;  ///< 1/s, absent until calibrated
  double tau_c = 15e-9;
  double target_p_h = 0.006;
  double target_nv_ratio = buildup::kReferenceNvRatio;
};

struct Sweeps {
  Grid tau_c{1e-10, 1e-5, 201, true};               ///< fig-transfer, fig-buildup
  Grid contour_tau_c{1e-9, 1e-6, 61, true};         ///< fig-contour rows
  Grid contour_detuning{-kTwoPi * 10e6, kTwoPi * 10e6, 41, false};  ///< rad/s
  Grid omega{kTwoPi * 1e4, kTwoPi * 1e9, 241, true}; ///< fig-spectral, rad/s
  std::vector<double> spectral_tau_c{1e-9, 1e-8, 1e-7, 1e-6};
  Grid field{1e-7, 1.0, 241, true};                 ///< fig-levels, T
  std::vector<double> t2{0.0, 3e-3, 3e-2, 0.3};     ///< adiabatic-audit
};

struct RunConfig {
  SampleSpec sample;
  nv::NvEnsembleSpec nv = nv::NvEnsembleSpec::defaults();
  transfer::DriveSpec drive{1.0, 0.0};
  nv::ResonanceWindow window = nv::default_window();
  buildup::FlowGeometry geometry = buildup::FlowGeometry::defaults();
  pair::RampProtocol ramp = pair::RampProtocol::defaults();
  double start_field_factor = 100.0;
  Calibration calibration;
  Sweeps sweeps;
  std::size_t quadrature_nodes = nv::kDefaultQuadratureNodes;
  double pipeline_tau_c = 15e-9;
  transfer::DenominatorMode mode = transfer::DenominatorMode::Corrected;
  pair::SingletAssignment convention = pair::SingletAssignment::UpDownToSinglet;
  std::string output_dir = ".";

  /// Where each leaf value came from: "default" or "config".
  std::map<std::string, std::string> provenance;

  static RunConfig defaults();

  buildup::PolarizerModel polarizer() const;
  pair::PairHamiltonianSpec pair_spec() const;
  transfer::NuclearSpecies proton() const;
  transfer::NuclearSpecies carbon() const;
};

/// Parses and validates. Throws ConfigError naming the key path on parse,
/// type, range or unknown-key errors.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
/// An empty or whitespace-only file yields the defaults.
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of the resolved configuration (cyclic units, sorted keys).
/// parse_config(to_json(cfg)) reproduces cfg.
nlohmann::json to_json(const RunConfig& cfg);

/// 64-bit FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace hyperpol::config
