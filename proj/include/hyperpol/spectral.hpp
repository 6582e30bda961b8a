// spectral.hpp - electron/nuclear cross-relaxation spectral density.
//
//   J(xi) = Re[(1 + s/4) / (1 + s + 4 s^2/9 + s^3/9)],  s = sqrt(i xi),
//   xi = omega * tau_c,
//
// with the principal square-root branch, so arg(s) = pi/4. J(0) = 1 and J
// decays monotonically to zero. All functions are pure and reentrant.

#pragma once

#include <utility>

namespace hyperpol::spectral {

/// Correlation time of the fluctuating electron/nuclear interaction, seconds.
class CorrelationTime {
 public:
  /// Throws std::invalid_argument unless 0 < seconds < inf.
  explicit CorrelationTime(double seconds);

  double seconds() const noexcept { return seconds_; }

 private:
  double seconds_;
};

/// Above this xi the closed form is replaced by its asymptotic value 0.
inline constexpr double kAsymptoticXi = 1e12;

/// J as a function of the dimensionless product xi = omega * tau_c >= 0.
double spectral_density_xi(double xi);

/// J(omega) for an angular frequency omega >= 0 (rad/s).
/// Throws std::invalid_argument for negative or non-finite omega.
double spectral_density(double omega, CorrelationTime tau_c);

/// (J(omega_0), J(omega_2)) evaluated at the same correlation time.
std::pair<double, double> spectral_density_pair(double omega_0, double omega_2,
                                                CorrelationTime tau_c);

}  // namespace hyperpol::spectral
