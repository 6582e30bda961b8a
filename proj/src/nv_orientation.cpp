#include "hyperpol/nv_orientation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

#include "hyperpol/errors.hpp"
#include "hyperpol/units.hpp"

namespace hyperpol::nv {

using quadrature::ThetaInterval;
using std::numbers::pi;

NvEnsembleSpec NvEnsembleSpec::defaults() {
  return {angular_from_hz(2.87e9), angular_from_hz(20e6),
          angular_from_hz(constants::kGammaElectronHzPerT), 0.125,
          ThetaInterval{deg_to_rad(80.0), deg_to_rad(100.0)}};
}

void NvEnsembleSpec::validate() const {
  if (!(zfs_d > 0.0) || !std::isfinite(zfs_d)) {
    throw std::invalid_argument("zero-field splitting D must be finite and > 0");
  }
  if (!std::isfinite(strain_e) || strain_e < 0.0) {
    throw std::invalid_argument("strain E must be finite and >= 0");
  }
  if (!(gamma_e > 0.0) || !std::isfinite(gamma_e)) {
    throw std::invalid_argument("electron gyromagnetic ratio must be finite and > 0");
  }
  if (!(pe0 >= 0.0 && pe0 <= 1.0)) {
    throw std::invalid_argument("electron polarization pe0 must lie in [0, 1]");
  }
  if (!(pumping_band.lo >= 0.0 && pumping_band.lo <= pumping_band.hi && pumping_band.hi <= pi)) {
    throw std::invalid_argument("pumping band must satisfy 0 <= lo <= hi <= pi");
  }
}

AngularTerms angular_terms(double theta, const NvEnsembleSpec& spec, double field_tesla) {
  const double d = spec.zfs_d;
  const double e = spec.strain_e;
  const double c2 = std::cos(2.0 * theta);

  AngularTerms t{};
  t.d_theta = (d * (1.0 + 3.0 * c2) + 3.0 * e * (1.0 - c2)) / 4.0;
  t.g1 = (d - e) * std::sin(theta) * std::cos(theta) / std::numbers::sqrt2;
  t.g2 = (d + 3.0 * e + (e - d) * c2) / 4.0;

  const double gb = spec.gamma_e * field_tesla;
  const double denom = gb * gb - t.d_theta * t.d_theta;
  if (!(gb > 0.0) || std::abs(denom) <= 1e-12 * gb * gb) {
    throw NumericalError("delta(theta) is singular: gamma_e B equals |D(theta)| at theta = " +
                         std::to_string(theta));
  }
  t.delta_theta = gb * t.g1 * t.g1 / denom + t.g2 * t.g2 / (2.0 * gb);
  return t;
}

double transition_frequency(double theta, const NvEnsembleSpec& spec, double field_tesla) {
  const auto t = angular_terms(theta, spec, field_tesla);
  return spec.gamma_e * field_tesla + t.delta_theta - t.d_theta;
}

DetuningProfile detuning_profile(double theta, const transfer::DriveSpec& drive,
                                 const NvEnsembleSpec& spec, double field_tesla) {
  const double anchor = transition_frequency(pi / 2.0, spec, field_tesla);
  const double shift = transition_frequency(theta, spec, field_tesla) - anchor;
  return {drive.detuning() + shift, shift};
}

std::array<std::complex<double>, 3> optical_initial_state(double theta, double phi) {
  const double s = std::sin(theta) / std::numbers::sqrt2;
  return {std::polar(s, phi), std::complex<double>(std::cos(theta), 0.0),
          -std::polar(s, -phi)};
}

double electron_polarization(double theta, const NvEnsembleSpec& spec) {
  return (theta >= spec.pumping_band.lo && theta <= spec.pumping_band.hi) ? spec.pe0 : 0.0;
}

ResonanceWindow default_window() { return DetuningThreshold{angular_from_hz(10e6)}; }

namespace {

/// Sign changes of f on [a, b], bracketed on a uniform scan and refined.
template <class F>
std::vector<double> sign_changes(F&& f, double a, double b, std::size_t cells) {
  std::vector<double> roots;
  const double h = (b - a) / static_cast<double>(cells);
  double x0 = a;
  double f0 = f(a);
  for (std::size_t k = 1; k <= cells; ++k) {
    const double x1 = k == cells ? b : a + h * static_cast<double>(k);
    const double f1 = f(x1);
    if ((f0 < 0.0) != (f1 < 0.0)) {
      boost::math::tools::eps_tolerance<double> tol(52);
      std::uintmax_t iters = 200;
      const auto [lo, hi] = boost::math::tools::toms748_solve(f, x0, x1, f0, f1, tol, iters);
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

std::vector<ThetaInterval> detuning_intervals(double threshold, const NvEnsembleSpec& spec,
                                              const transfer::DriveSpec& drive,
                                              double field_tesla, std::size_t cells) {
  if (!(threshold > 0.0)) throw std::invalid_argument("window threshold must be > 0");
  if (cells < 2) throw std::invalid_argument("window scan needs at least two cells");

  auto excess = [&](double theta) {
    return std::abs(detuning_profile(theta, drive, spec, field_tesla).delta_prime) - threshold;
  };
  std::vector<double> edges{0.0};
  for (double x : sign_changes(excess, 0.0, pi, cells)) edges.push_back(x);
  edges.push_back(pi);

  std::vector<ThetaInterval> out;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double mid = 0.5 * (edges[k] + edges[k + 1]);
    if (edges[k + 1] > edges[k] && excess(mid) < 0.0) out.push_back({edges[k], edges[k + 1]});
  }
  return out;
}

// Scan resolution per piece when locating the |omega_E - omega_i| cusp.
constexpr std::size_t kCuspScanCells = 64;

}  // namespace

std::vector<ThetaInterval> window_intervals(const ResonanceWindow& window,
                                            const NvEnsembleSpec& spec,
                                            const transfer::DriveSpec& drive,
                                            double field_tesla, std::size_t scan_cells) {
  if (const auto* band = std::get_if<ThetaBand>(&window)) {
    const auto b = band->band;
    if (!(b.lo >= 0.0 && b.lo <= b.hi && b.hi <= pi)) {
      throw std::invalid_argument("theta band must satisfy 0 <= lo <= hi <= pi");
    }
    if (b.lo == b.hi) return {};
    return {b};
  }
  return detuning_intervals(std::get<DetuningThreshold>(window).threshold, spec, drive,
                            field_tesla, scan_cells);
}

double window_fraction(const NvEnsembleSpec& spec, double field_tesla,
                       const transfer::DriveSpec& drive, const ResonanceWindow& window,
                       std::size_t nodes) {
  const auto intervals = window_intervals(window, spec, drive, field_tesla);
  const quadrature::GaussLegendre rule(nodes);
  return quadrature::sphere_integral(intervals, [](double) { return 1.0; }, rule);
}

double window_fraction(const NvEnsembleSpec& spec, double field_tesla,
                       const transfer::DriveSpec& drive, double threshold, std::size_t nodes) {
  return window_fraction(spec, field_tesla, drive, DetuningThreshold{threshold}, nodes);
}

double orientation_rate(double theta, const transfer::NuclearSpecies& species,
                        spectral::CorrelationTime tau_c, const NvEnsembleSpec& spec,
                        const transfer::DriveSpec& drive, double field_tesla, double c0_rate) {
  const auto profile = detuning_profile(theta, drive, spec, field_tesla);
  const auto local = drive.with_detuning(profile.epsilon_theta);
  return c0_rate * transfer::spectral_difference(species, field_tesla, local, tau_c);
}

double ensemble_average_rate(const transfer::NuclearSpecies& species,
                             spectral::CorrelationTime tau_c, const NvEnsembleSpec& spec,
                             const transfer::DriveSpec& drive, double field_tesla,
                             double c0_rate, const ResonanceWindow& window, std::size_t nodes) {
  spec.validate();
  const auto intervals = window_intervals(window, spec, drive, field_tesla);
  const double measure = quadrature::sphere_measure(intervals);
  if (!(measure > 0.0)) {
    throw std::invalid_argument("ensemble average over an empty resonance window");
  }

  // Split at the pumping-band edges so P_e is constant on every piece, and
  // where omega_E(theta) = omega_i, where J(|omega_0|) has a cusp.
  const double wi = species.larmor(field_tesla);
  auto cusp = [&](double theta) {
    const auto local = drive.with_detuning(detuning_profile(theta, drive, spec, field_tesla).epsilon_theta);
    return transfer::dressed_electron_frequency(local) - wi;
  };
  struct Piece {
    ThetaInterval iv;
    bool cusp_lo;
    bool cusp_hi;
  };
  std::vector<Piece> pieces;
  for (const auto& iv : intervals) {
    std::vector<double> cusps;
    if (iv.hi > iv.lo) cusps = sign_changes(cusp, iv.lo, iv.hi, kCuspScanCells);
    std::vector<double> cuts{iv.lo, std::clamp(spec.pumping_band.lo, iv.lo, iv.hi),
                             std::clamp(spec.pumping_band.hi, iv.lo, iv.hi), iv.hi};
    cuts.insert(cuts.end(), cusps.begin(), cusps.end());
    std::sort(cuts.begin(), cuts.end());
    auto is_cusp = [&](double x) { return std::find(cusps.begin(), cusps.end(), x) != cusps.end(); };
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double lo = cuts[k], hi = cuts[k + 1];
      if (!(hi > lo)) continue;
      const bool cl = is_cusp(lo), ch = is_cusp(hi);
      if (cl && ch) {
        const double mid = 0.5 * (lo + hi);
        pieces.push_back({{lo, mid}, true, false});
        pieces.push_back({{mid, hi}, false, true});
      } else {
        pieces.push_back({{lo, hi}, cl, ch});
      }
    }
  }

  const quadrature::GaussLegendre rule(nodes);
  const auto integrand = [&](double theta) {
    const double pe = electron_polarization(theta, spec);
    if (pe == 0.0) return 0.0;
    return pe * orientation_rate(theta, species, tau_c, spec, drive, field_tesla, c0_rate);
  };
  double integral = 0.0;
  for (const auto& p : pieces) {
    if (p.cusp_lo || p.cusp_hi) {
      integral += quadrature::sphere_integral_graded(p.iv, integrand, rule, p.cusp_lo);
    } else {
      integral += quadrature::sphere_integral(std::span(&p.iv, 1), integrand, rule);
    }
  }
  return integral / measure;
}

}  // namespace hyperpol::nv
