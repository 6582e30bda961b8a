// buildup.hpp - bulk nuclear polarization of the flowing solvent.
//
// p_i ~ (N_e / N_i) * Wbar_eff^i * t1, where N_e / N_i is the NV-to-nucleus
// number ratio in the polarizing volume and t1 the residence time.
// Polarization diffusion and NV saturation are not modelled.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hyperpol/nv_orientation.hpp"
#include "hyperpol/transfer.hpp"

namespace hyperpol::buildup {

struct FlowGeometry {
  double channel_diameter;    ///< m
  double gel_length;          ///< m
  double nd_diameter;         ///< m
  double nd_volume_fraction;  ///< dimensionless, < 0.74
  double nv_yield_per_nd;     ///< NV centres per nanodiamond
  double pair_density;        ///< 13C-1H pairs per m^3
  double flow_rate;           ///< m/s
  double residence_time;      ///< t1, s

  /// 1 mm channel and gel, 10 nm diamonds at 12 % volume, 13 pairs/nm^3,
  /// 1 mm/s flow, t1 = 1 s, and the NV yield that gives N_e/N = 1.6e-6.
  static FlowGeometry defaults();
  /// Throws std::invalid_argument on any non-positive field or a volume
  /// fraction at or above the close-packing bound.
  void validate() const;
};

/// N_e / N_i assumed by the defaults.
inline constexpr double kReferenceNvRatio = 1.6e-6;

/// N_e / N_i = (nd_volume_fraction / V_nd) * nv_yield_per_nd / pair_density.
double nv_to_nuclear_ratio(const FlowGeometry& geom);

/// The same ratio with one NV per nanodiamond (pure geometry).
double geometric_nv_ratio(const FlowGeometry& geom);

/// NV yield per nanodiamond that reproduces target_ratio for this geometry.
double nv_yield_for_ratio(double target_ratio, const FlowGeometry& geom);

struct PolarizationPair {
  double p_c;
  double p_h;
};

struct BulkPolarization {
  double value;
  bool clamped;  ///< linear model left [-1, 1]; value is the clamp bound
};

/// ratio * w_eff * t1, clamped to [-1, 1]. Throws for t1 < 0.
BulkPolarization bulk_polarization(double w_eff, double ratio, double t1);

/// Everything needed to go from a correlation time to bulk polarizations.
struct PolarizerModel {
  nv::NvEnsembleSpec nv;
  transfer::DriveSpec drive;
  double field_tesla;
  FlowGeometry geometry;
  nv::ResonanceWindow window;
  transfer::NuclearSpecies proton;
  transfer::NuclearSpecies carbon;
  std::size_t quadrature_nodes = nv::kDefaultQuadratureNodes;

  static PolarizerModel defaults();
};

/// Averaged rate per unit c0 (c0_rate = 1) for one species.
double unit_rate(const PolarizerModel& model, const transfer::NuclearSpecies& species,
                 spectral::CorrelationTime tau_c);

struct SweepRow {
  double tau_c;
  double p_h;
  double p_c;
  bool clamped;
};

/// Bulk (p_H, p_C) at one correlation time with a shared rate constant.
SweepRow polarization_at(double tau_c, const PolarizerModel& model, double c0_rate);

/// Row-wise polarization_at over the grid; rows keep grid order.
/// Throws std::invalid_argument for an empty grid.
std::vector<SweepRow> polarization_sweep(std::span<const double> tau_c_grid,
                                         const PolarizerModel& model, double c0_rate,
                                         unsigned threads = 1);

/// The single c0 that makes bulk p_H equal target_ph at tau_c.
/// Throws NumericalError if the averaged spectral difference is zero, or if
/// the required c0 would be negative.
double calibrate_c0(double target_ph, spectral::CorrelationTime tau_c,
                    const PolarizerModel& model);

}  // namespace hyperpol::buildup
