#include "hyperpol/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace hyperpol::spectral {

CorrelationTime::CorrelationTime(double seconds) : seconds_(seconds) {
  if (!std::isfinite(seconds) || seconds <= 0.0) {
    throw std::invalid_argument("correlation time must be finite and > 0");
  }
}

double spectral_density_xi(double xi) {
  if (!std::isfinite(xi) || xi < 0.0) {
    throw std::invalid_argument("spectral density needs finite xi >= 0");
  }
  if (xi > kAsymptoticXi) return 0.0;

  // sqrt(i xi) on the principal branch: sqrt(xi) e^{i pi/4}.
  const double r = std::sqrt(xi);
  const std::complex<double> s = std::polar(r, std::numbers::pi / 4.0);
  const std::complex<double> s2 = s * s;
  const std::complex<double> num = 1.0 + s / 4.0;
  const std::complex<double> den = 1.0 + s + 4.0 * s2 / 9.0 + s2 * s / 9.0;
  return (num / den).real();
}

double spectral_density(double omega, CorrelationTime tau_c) {
  if (!std::isfinite(omega) || omega < 0.0) {
    throw std::invalid_argument("spectral density needs finite omega >= 0");
  }
  return spectral_density_xi(omega * tau_c.seconds());
}

std::pair<double, double> spectral_density_pair(double omega_0, double omega_2,
                                                CorrelationTime tau_c) {
  return {spectral_density(omega_0, tau_c), spectral_density(omega_2, tau_c)};
}

}  // namespace hyperpol::spectral
