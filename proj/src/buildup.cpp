#include "hyperpol/buildup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hyperpol/errors.hpp"
#include "hyperpol/parallel.hpp"
#include "hyperpol/units.hpp"

namespace hyperpol::buildup {

namespace {

constexpr double kClosePacking = 0.74;

double nanodiamond_number_density(const FlowGeometry& g) {
  const double r = 0.5 * g.nd_diameter;
  const double volume = 4.0 / 3.0 * std::numbers::pi * r * r * r;
  return g.nd_volume_fraction / volume;
}

}  // namespace

FlowGeometry FlowGeometry::defaults() {
  FlowGeometry g{1e-3, 1e-3, 10e-9, 0.12, 1.0, 13e27, 1e-3, 1.0};
  g.nv_yield_per_nd = nv_yield_for_ratio(kReferenceNvRatio, g);
  return g;
}

void FlowGeometry::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"channel_diameter", channel_diameter}, {"gel_length", gel_length},
      {"nd_diameter", nd_diameter},           {"nd_volume_fraction", nd_volume_fraction},
      {"nv_yield_per_nd", nv_yield_per_nd},   {"pair_density", pair_density},
      {"flow_rate", flow_rate},               {"residence_time", residence_time}};
  for (const auto& [name, v] : fields) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("flow geometry: ") + name +
                                  " must be finite and > 0");
    }
  }
  if (nd_volume_fraction >= kClosePacking) {
    throw std::invalid_argument("flow geometry: nd_volume_fraction must be below 0.74");
  }
}

double geometric_nv_ratio(const FlowGeometry& geom) {
  geom.validate();
  return nanodiamond_number_density(geom) / geom.pair_density;
}

double nv_to_nuclear_ratio(const FlowGeometry& geom) {
  return geometric_nv_ratio(geom) * geom.nv_yield_per_nd;
}

double nv_yield_for_ratio(double target_ratio, const FlowGeometry& geom) {
  if (!(target_ratio > 0.0)) throw std::invalid_argument("target N_e/N must be > 0");
  FlowGeometry unit = geom;
  unit.nv_yield_per_nd = 1.0;
  return target_ratio / geometric_nv_ratio(unit);
}

BulkPolarization bulk_polarization(double w_eff, double ratio, double t1) {
  if (!(t1 >= 0.0) || !std::isfinite(t1)) {
    throw std::invalid_argument("bulk polarization: t1 must be finite and >= 0");
  }
  const double p = ratio * w_eff * t1;
  if (std::isnan(p)) throw std::invalid_argument("bulk polarization: NaN input");
  if (p > 1.0) return {1.0, true};
  if (p < -1.0) return {-1.0, true};
  return {p, false};
}

PolarizerModel PolarizerModel::defaults() {
  const double rabi = angular_from_hz(8.0 * std::numbers::sqrt2 * 1e6);
  return {nv::NvEnsembleSpec::defaults(),
          transfer::DriveSpec(rabi, rabi),
          0.36,
          FlowGeometry::defaults(),
          nv::default_window(),
          transfer::proton(),
          transfer::carbon13(),
          nv::kDefaultQuadratureNodes};
}

double unit_rate(const PolarizerModel& model, const transfer::NuclearSpecies& species,
                 spectral::CorrelationTime tau_c) {
  return nv::ensemble_average_rate(species, tau_c, model.nv, model.drive, model.field_tesla,
                                   1.0, model.window, model.quadrature_nodes);
}

SweepRow polarization_at(double tau_c, const PolarizerModel& model, double c0_rate) {
  if (!(c0_rate >= 0.0) || !std::isfinite(c0_rate)) {
    throw std::invalid_argument("rate constant c0 must be finite and >= 0");
  }
  const spectral::CorrelationTime tc(tau_c);
  const double ratio = nv_to_nuclear_ratio(model.geometry);
  const double t1 = model.geometry.residence_time;
  const auto ph = bulk_polarization(c0_rate * unit_rate(model, model.proton, tc), ratio, t1);
  const auto pc = bulk_polarization(c0_rate * unit_rate(model, model.carbon, tc), ratio, t1);
  return {tau_c, ph.value, pc.value, ph.clamped || pc.clamped};
}

std::vector<SweepRow> polarization_sweep(std::span<const double> tau_c_grid,
                                         const PolarizerModel& model, double c0_rate,
                                         unsigned threads) {
  if (tau_c_grid.empty()) throw std::invalid_argument("polarization sweep: empty tau_c grid");
  return parallel_map(tau_c_grid.size(), threads, [&](std::size_t i) {
    return polarization_at(tau_c_grid[i], model, c0_rate);
  });
}

double calibrate_c0(double target_ph, spectral::CorrelationTime tau_c,
                    const PolarizerModel& model) {
  if (!std::isfinite(target_ph) || std::abs(target_ph) >= 1.0) {
    throw std::invalid_argument("calibration target must be finite with |p_H| < 1");
  }
  if (target_ph == 0.0) return 0.0;
  const double per_unit = nv_to_nuclear_ratio(model.geometry) *
                          unit_rate(model, model.proton, tau_c) *
                          model.geometry.residence_time;
  if (per_unit == 0.0 || !std::isfinite(per_unit)) {
    throw NumericalError("calibration impossible: averaged spectral difference is zero");
  }
  const double c0 = target_ph / per_unit;
  if (c0 < 0.0) {
    throw NumericalError("calibration impossible: target sign needs a negative rate constant");
  }
  return c0;
}

}  // namespace hyperpol::buildup
