#include "hyperpol/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include <gsl/gsl_integration.h>

namespace hyperpol::quadrature {

GaussLegendre::GaussLegendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(n), &gsl_integration_glfixed_table_free);
  if (!table) throw std::runtime_error("gsl_integration_glfixed_table_alloc failed");

  nodes_.resize(n);
  weights_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(-1.0, 1.0, i, &nodes_[i], &weights_[i], table.get());
  }
}

double sphere_integral(std::span<const ThetaInterval> intervals,
                       const std::function<double(double)>& f, const GaussLegendre& rule) {
  const auto x = rule.nodes();
  const auto w = rule.weights();
  double total = 0.0;
  for (const auto& iv : intervals) {
    // u = cos(theta) runs from cos(hi) to cos(lo); dS/4pi = du/2.
    const double u_lo = std::cos(iv.hi);
    const double u_hi = std::cos(iv.lo);
    const double half = 0.5 * (u_hi - u_lo);
    const double mid = 0.5 * (u_hi + u_lo);
    if (half <= 0.0) continue;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double u = mid + half * x[i];
      acc += w[i] * f(std::acos(std::clamp(u, -1.0, 1.0)));
    }
    total += 0.5 * half * acc;
  }
  return total;
}

double sphere_integral_graded(ThetaInterval interval, const std::function<double(double)>& f,
                              const GaussLegendre& rule, bool toward_lo) {
  const double span = interval.hi - interval.lo;
  if (span <= 0.0) return 0.0;
  const auto x = rule.nodes();
  const auto w = rule.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double t = 0.5 * (x[i] + 1.0);
    const double theta = toward_lo ? interval.lo + span * t * t : interval.hi - span * t * t;
    // dtheta = 2 span t dt, dt = dx / 2, measure sin(theta) / 2
    acc += w[i] * f(theta) * std::sin(theta) * span * t;
  }
  return 0.5 * acc;
}

double sphere_measure(std::span<const ThetaInterval> intervals) {
  double total = 0.0;
  for (const auto& iv : intervals) total += 0.5 * (std::cos(iv.lo) - std::cos(iv.hi));
  return total;
}

}  // namespace hyperpol::quadrature
