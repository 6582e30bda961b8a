// quadrature.hpp - Gauss-Legendre rules on the sphere with azimuthal symmetry.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hyperpol::quadrature {

/// Closed polar-angle interval [lo, hi] in radians, 0 <= lo <= hi <= pi.
struct ThetaInterval {
  double lo;
  double hi;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
class GaussLegendre {
 public:
  /// Throws std::invalid_argument for n == 0.
  explicit GaussLegendre(std::size_t n);

  std::size_t size() const noexcept { return nodes_.size(); }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Integral of f(theta) over the uniform sphere measure sin(theta) dtheta / 2
/// restricted to the given intervals (phi already integrated out). The rule
/// is applied in u = cos(theta), so a constant integrand is exact.
double sphere_integral(std::span<const ThetaInterval> intervals,
                       const std::function<double(double)>& f, const GaussLegendre& rule);

/// Same measure on one interval, with nodes clustered quadratically toward
/// one end (theta = lo + (hi - lo) t^2 for toward_lo) so that a square-root
/// cusp at that end is integrated to full order.
double sphere_integral_graded(ThetaInterval interval, const std::function<double(double)>& f,
                              const GaussLegendre& rule, bool toward_lo);

/// Exact measure (cos lo - cos hi) / 2 summed over intervals.
double sphere_measure(std::span<const ThetaInterval> intervals);

}  // namespace hyperpol::quadrature
