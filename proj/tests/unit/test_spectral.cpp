#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "hyperpol/spectral.hpp"

using namespace hyperpol::spectral;

namespace {

// Real part expanded by hand with s = r (1 + i), r = sqrt(xi / 2), in long
// double. Shares no code with the library's complex evaluation; the real
// part cancels as r^4, so it is only used up to xi = 1e3.
double oracle_j(double xi) {
  const long double r = std::sqrt(static_cast<long double>(xi) / 2.0L);
  // s = r(1+i), s^2 = 2 i r^2, s^3 = 2 i r^3 (1+i) = -2r^3 + 2 i r^3
  const long double nr = 1.0L + r / 4.0L, ni = r / 4.0L;
  const long double dr = 1.0L + r - 2.0L * r * r * r / 9.0L;
  const long double di = r + 8.0L * r * r / 9.0L + 2.0L * r * r * r / 9.0L;
  return static_cast<double>((nr * dr + ni * di) / (dr * dr + di * di));
}

}  // namespace

TEST_CASE("spectral density at zero frequency is one") {
  for (double tau : {1e-9, 1e-8, 1e-7, 1e-6}) {
    CHECK(std::abs(spectral_density(0.0, CorrelationTime(tau)) - 1.0) <= 1e-12);
  }
  CHECK(spectral_density_xi(0.0) == 1.0);
}

TEST_CASE("frozen high-precision values") {
  // 40-digit complex evaluation.
  CHECK(spectral_density_xi(1.0) == doctest::Approx(0.51229609207806599).epsilon(1e-14));
  CHECK(spectral_density_xi(0.1) == doctest::Approx(0.833909182246211).epsilon(1e-14));
  CHECK(spectral_density_xi(10.0) == doctest::Approx(0.07444285952870132).epsilon(1e-13));
  CHECK(spectral_density_xi(100.0) == doctest::Approx(0.0015914462286348184).epsilon(1e-12));
  CHECK(spectral_density_xi(1e4) == doctest::Approx(1.9820351555430596e-07).epsilon(1e-12));
  CHECK(spectral_density_xi(1e5) == doctest::Approx(2.0114156202076396e-9).epsilon(1e-12));
  CHECK(spectral_density_xi(1e6) == doctest::Approx(2.0207043177615136e-11).epsilon(1e-12));
}

TEST_CASE("agrees with hand-expanded real part") {
  for (int k = 0; k <= 140; ++k) {
    const double xi = std::pow(10.0, -4.0 + 7.0 * k / 140.0);
    const double ref = oracle_j(xi);
    CHECK(spectral_density_xi(xi) == doctest::Approx(ref).epsilon(1e-12).scale(1e-300));
  }
}

TEST_CASE("monotone non-increasing and bounded on a 400-point log grid") {
  double prev = spectral_density_xi(0.0);
  for (int k = 0; k < 400; ++k) {
    const double xi = std::pow(10.0, -4.0 + 10.0 * k / 399.0);
    const double j = spectral_density_xi(xi);
    CHECK(j <= prev);
    CHECK(j > 0.0);
    CHECK(j <= 1.0);
    prev = j;
  }
}

TEST_CASE("depends on omega and tau only through their product") {
  const double xi = 3.7;
  const double a = spectral_density(xi / 1e-9, CorrelationTime(1e-9));
  const double b = spectral_density(xi / 4e-6, CorrelationTime(4e-6));
  CHECK(a == doctest::Approx(b).epsilon(1e-14));
  CHECK(a == doctest::Approx(spectral_density_xi(xi)).epsilon(1e-14));
}

TEST_CASE("asymptotic guard") {
  CHECK(spectral_density_xi(2e12) == 0.0);
  CHECK(spectral_density_xi(kAsymptoticXi) >= 0.0);
}

TEST_CASE("pair evaluation") {
  const CorrelationTime tau(15e-9);
  const auto [a, b] = spectral_density_pair(1e7, 3e8, tau);
  CHECK(a == spectral_density(1e7, tau));
  CHECK(b == spectral_density(3e8, tau));
}

TEST_CASE("rejects invalid input") {
  CHECK_THROWS_AS(CorrelationTime(0.0), std::invalid_argument);
  CHECK_THROWS_AS(CorrelationTime(-1e-9), std::invalid_argument);
  CHECK_THROWS_AS(CorrelationTime(NAN), std::invalid_argument);
  CHECK_THROWS_AS(spectral_density(-1.0, CorrelationTime(1e-9)), std::invalid_argument);
  CHECK_THROWS_AS(spectral_density(NAN, CorrelationTime(1e-9)), std::invalid_argument);
  CHECK_THROWS_AS(spectral_density_xi(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(spectral_density_xi(INFINITY), std::invalid_argument);
}
