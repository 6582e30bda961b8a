// nv_orientation.hpp - randomly oriented NV ensemble in a strong field.
//
// An NV centre whose symmetry axis makes angle theta with the field sees an
// effective zero-field splitting D(theta) and a second-order shift
// delta(theta). The microwave is tuned to the theta = 90 deg transition, so
// every other orientation is detuned by Delta'(theta). Only a thin band of
// orientations around 90 deg is both optically polarized and near resonance.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

#include "hyperpol/quadrature.hpp"
#include "hyperpol/spectral.hpp"
#include "hyperpol/transfer.hpp"

namespace hyperpol::nv {

struct NvEnsembleSpec {
  double zfs_d;      ///< axial zero-field splitting D, rad/s
  double strain_e;   ///< transverse strain E, rad/s
  double gamma_e;    ///< electron gyromagnetic ratio, rad/(s T)
  double pe0;        ///< electron polarization inside the pumping band
  quadrature::ThetaInterval pumping_band;  ///< orientations with P_e = pe0

  /// Reference parameters: D = 2pi 2.87 GHz, E = 2pi 20 MHz, P_e = 0.125 on
  /// [80 deg, 100 deg].
  static NvEnsembleSpec defaults();
  /// Throws std::invalid_argument on D <= 0, pe0 outside [0, 1], bad band.
  void validate() const;
};

struct Orientation {
  double theta;
  double phi;
};

struct AngularTerms {
  double d_theta;      ///< D(theta)
  double g1;           ///< G1
  double g2;           ///< G2
  double delta_theta;  ///< second-order shift delta(theta)
};

/// Closed forms for D(theta), G1, G2 and delta(theta) at the given field.
/// Throws NumericalError when gamma_e B == |D(theta)| (delta singular).
AngularTerms angular_terms(double theta, const NvEnsembleSpec& spec, double field_tesla);

/// |0> <-> |-1> transition frequency gamma_e B + delta(theta) - D(theta).
double transition_frequency(double theta, const NvEnsembleSpec& spec, double field_tesla);

struct DetuningProfile {
  double epsilon_theta;  ///< detuning seen by this orientation, rad/s
  double delta_prime;    ///< epsilon(theta) - epsilon_0
};

/// Microwave anchored so that epsilon(90 deg) = drive.detuning().
DetuningProfile detuning_profile(double theta, const transfer::DriveSpec& drive,
                                 const NvEnsembleSpec& spec, double field_tesla);

/// Lab-frame amplitudes of the optically pumped state, ordered {+1, 0, -1}:
/// cos(theta)|0> + sin(theta)/sqrt2 (e^{i phi}|+1> - e^{-i phi}|-1>).
std::array<std::complex<double>, 3> optical_initial_state(double theta, double phi);

/// Step model: pe0 inside the pumping band, 0 outside.
double electron_polarization(double theta, const NvEnsembleSpec& spec);

/// Orientations with |Delta'(theta)| < threshold (rad/s).
struct DetuningThreshold {
  double threshold;
};
/// Orientations with theta in [lo, hi].
struct ThetaBand {
  quadrature::ThetaInterval band;
};
using ResonanceWindow = std::variant<DetuningThreshold, ThetaBand>;

/// Default averaging window: |Delta'| < 2pi 10 MHz.
ResonanceWindow default_window();

/// Disjoint theta intervals that make up the window. Edges of a detuning
/// window are located by bracketing on a uniform scan of scan_cells cells and
/// refining to machine precision.
std::vector<quadrature::ThetaInterval> window_intervals(const ResonanceWindow& window,
                                                        const NvEnsembleSpec& spec,
                                                        const transfer::DriveSpec& drive,
                                                        double field_tesla,
                                                        std::size_t scan_cells = 4096);

inline constexpr std::size_t kDefaultQuadratureNodes = 256;

/// Fraction of the uniform sphere inside the window.
double window_fraction(const NvEnsembleSpec& spec, double field_tesla,
                       const transfer::DriveSpec& drive, const ResonanceWindow& window,
                       std::size_t nodes = kDefaultQuadratureNodes);
double window_fraction(const NvEnsembleSpec& spec, double field_tesla,
                       const transfer::DriveSpec& drive, double threshold,
                       std::size_t nodes = kDefaultQuadratureNodes);

/// Transfer rate of one orientation, W_i(theta), using epsilon(theta) in the
/// dressed frequency.
double orientation_rate(double theta, const transfer::NuclearSpecies& species,
                        spectral::CorrelationTime tau_c, const NvEnsembleSpec& spec,
                        const transfer::DriveSpec& drive, double field_tesla, double c0_rate);

/// Solid-angle average S^-1 \int_S W_i P_e dS over the window S.
/// `nodes` is the Gauss-Legendre order per sub-interval; sub-intervals are
/// split at the pumping-band edges so the step in P_e never falls inside one.
/// Throws std::invalid_argument if the window is empty.
double ensemble_average_rate(const transfer::NuclearSpecies& species,
                             spectral::CorrelationTime tau_c, const NvEnsembleSpec& spec,
                             const transfer::DriveSpec& drive, double field_tesla,
                             double c0_rate, const ResonanceWindow& window,
                             std::size_t nodes = kDefaultQuadratureNodes);

}  // namespace hyperpol::nv
