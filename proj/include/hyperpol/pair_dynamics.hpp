// pair_dynamics.hpp - the scalar-coupled 13C-1H pair across the field ramp.
//
//   H = g I_C . I_H + (gamma_C I_Cz + gamma_H I_Hz) B      (Hz)
//
// Product basis order is {uu, ud, du, dd} with the carbon spin first
// (u = m +1/2). Total I_z is conserved, so H is block diagonal with the
// zero-quantum block {ud, du}; that block holds the level anti-crossing.

#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hyperpol/buildup.hpp"

namespace hyperpol::pair {

struct PairHamiltonianSpec {
  double g_hz;     ///< scalar coupling, Hz (>= 0)
  double gamma_c;  ///< rad/(s T)
  double gamma_h;  ///< rad/(s T)
  double field_tesla;

  /// g = 220 Hz, table gyromagnetic ratios, B = 0.36 T.
  static PairHamiltonianSpec defaults();
  PairHamiltonianSpec at_field(double b) const { return {g_hz, gamma_c, gamma_h, b}; }
  /// Zero-quantum Zeeman splitting (gamma_H - gamma_C) B / 2pi, Hz.
  double zq_splitting_hz() const;
};

enum class Regime { HighField, Intermediate, LowField };

/// High field when min(gamma_i B)/2pi >= 100 g, low field when <= 0.01 g.
Regime classify_regime(const PairHamiltonianSpec& spec);

using Matrix4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4cd;

/// 4x4 Hermitian Hamiltonian in the product basis, Hz.
Matrix4 pair_hamiltonian(const PairHamiltonianSpec& spec);

enum class Basis { Product, SingletTriplet };
std::string_view to_string(Basis b);

/// Singlet-triplet order used throughout: {S0, T0, T+1, T-1}.
enum class StLabel { S0 = 0, T0 = 1, Tplus = 2, Tminus = 3 };
std::string_view to_string(StLabel l);

/// Basis vectors of the zero-field eigenstates in the product basis.
Vector4 singlet_triplet_vector(StLabel label);

struct Level {
  StLabel label;     ///< adiabatic label, continuous in B
  double energy_hz;
  Vector4 vector;    ///< normalized eigenvector, product basis
  double singlet_character;  ///< |<S0|v>|^2
};

/// Eigenlevels labelled by continuity from the zero-field classification.
/// T+1 = uu and T-1 = dd are exact at every field; inside the zero-quantum
/// block the lower branch is S0 (g > 0 gives no crossing there). Returned in
/// StLabel order.
std::array<Level, 4> eigenlevels(const PairHamiltonianSpec& spec);

/// Four populations with the basis they refer to.
struct PairPopulations {
  Basis basis;
  std::array<double, 4> n;

  /// Throws std::invalid_argument unless each n in [0,1] (to 1e-12) and the
  /// sum is 1 to 1e-12.
  void validate() const;
};

/// Product-basis populations of two independently polarized spins:
/// n_ab = (1 +- p_C)(1 +- p_H) / 4.
PairPopulations high_field_populations(const buildup::PolarizationPair& p);

/// Which zero-quantum product state ends up in S0.
///  - DownUpToSinglet: du -> S0, ud -> T0
///  - UpDownToSinglet: ud -> S0, du -> T0 (matches singlet_order_closed_form and the ramp)
enum class SingletAssignment { DownUpToSinglet, UpDownToSinglet };

std::string_view to_string(SingletAssignment a);
/// Accepts "eq6_as_printed" / "eq8_consistent".
SingletAssignment parse_assignment(std::string_view token);

/// Relabels product populations as zero-field populations. Throws
/// std::invalid_argument if the input is not in the product basis.
PairPopulations adiabatic_map(const PairPopulations& pops, SingletAssignment assignment);

/// n_S - (n_T0 + n_T+ + n_T-)/3. Throws unless in the singlet-triplet basis.
double singlet_order_from_populations(const PairPopulations& pops);

/// (p_C - p_H - p_C p_H) / 3.
double singlet_order_closed_form(const buildup::PolarizationPair& p);

enum class RampShape { Linear, Exponential, Tanh };
std::string_view to_string(RampShape s);
RampShape parse_ramp_shape(std::string_view token);

struct RampProtocol {
  double b_high;  ///< T
  double b_low;   ///< T
  double t2;      ///< s
  RampShape shape;

  /// 0.36 T -> 10 mG in 0.3 s, linear in B.
  static RampProtocol defaults();
  /// Throws std::invalid_argument unless b_high > b_low > 0 and t2 > 0.
  void validate() const;
};

/// Field at time t in [0, t2]; monotone from b_high to b_low.
double ramp_field(double t, const RampProtocol& protocol);

/// Time at which the ramp passes field b (b_low <= b <= b_high).
double ramp_time_at_field(double b, const RampProtocol& protocol);

/// |dB/dt| at time t, T/s.
double ramp_rate(double t, const RampProtocol& protocol);

struct PropagationOptions {
  double start_field_factor = 100.0;  ///< start where zq splitting = factor * g
  /// The start field is raised (up to b_high) until start_adiabaticity
  /// reaches this value, so fast ramps also begin in the frozen regime.
  double min_start_adiabaticity = 1e3;
  double step_tolerance = 1e-11;      ///< per-step amplitude error bound
  std::size_t max_steps = 20'000'000;
};

struct RampResult {
  /// Final populations in the instantaneous eigenbasis at b_low, labelled
  /// {S0, T0, T+1, T-1} by adiabatic continuity.
  PairPopulations final_populations;
  /// Population of the lower zero-quantum branch that ends in the upper one.
  double diabatic_leakage;
  /// exp(-pi^2 g^2 / |d(splitting)/dt|) at the field where splitting = g.
  double landau_zener;
  double start_field;
  double start_time;
  /// (2pi gap)^2 / (2pi |d splitting / dt|) at the start field; >> 1 means
  /// populations were frozen above it.
  double start_adiabaticity;
  double norm_error;  ///< | |psi|^2 - 1 | after integration
  std::size_t steps;
};

/// Integrates the zero-quantum block through the anti-crossing. Initial
/// populations are product-basis high-field populations, assigned to the
/// instantaneous eigenstates at the start field. Throws NumericalError if
/// the adaptive step collapses or exceeds max_steps.
RampResult propagate_ramp(const PairPopulations& initial, const RampProtocol& protocol,
                          const PairHamiltonianSpec& spec,
                          const PropagationOptions& options = {});

/// Sudden-limit leakage: overlap^2 of the lower zq eigenstate at b_high with
/// the upper one at b_low.
double sudden_leakage(const RampProtocol& protocol, const PairHamiltonianSpec& spec);

/// Landau-Zener estimate for the protocol, see RampResult::landau_zener.
double landau_zener_estimate(const RampProtocol& protocol, const PairHamiltonianSpec& spec);

}  // namespace hyperpol::pair
