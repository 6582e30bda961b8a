#include "hyperpol/pair_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "hyperpol/errors.hpp"
#include "hyperpol/units.hpp"

namespace hyperpol::pair {

using cd = std::complex<double>;
using std::numbers::pi;

namespace {

constexpr std::size_t kUU = 0, kUD = 1, kDU = 2, kDD = 3;

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

struct SpinHalf {
  Eigen::Matrix2cd x, y, z, id;
  SpinHalf() {
    x << 0, 0.5, 0.5, 0;
    y << 0, cd(0, -0.5), cd(0, 0.5), 0;
    z << 0.5, 0, 0, -0.5;
    id.setIdentity();
  }
};

double zq_splitting_at(const PairHamiltonianSpec& spec, double field) {
  return hz_from_angular(spec.gamma_h - spec.gamma_c) * field;
}

/// Zero-quantum mixing angle: lower = (cos a, -sin a), upper = (sin a, cos a)
/// in {ud, du}, for the block [[-d/2, g/2], [g/2, d/2]].
double zq_mixing_angle(double splitting_hz, double g_hz) {
  return 0.5 * std::atan2(g_hz, splitting_hz);
}

Eigen::Vector2cd zq_lower(double a) { return {std::cos(a), -std::sin(a)}; }
Eigen::Vector2cd zq_upper(double a) { return {std::sin(a), std::cos(a)}; }

}  // namespace

PairHamiltonianSpec PairHamiltonianSpec::defaults() {
  return {220.0, angular_from_hz(constants::kGammaCarbon13HzPerT),
          angular_from_hz(constants::kGammaProtonHzPerT), 0.36};
}

double PairHamiltonianSpec::zq_splitting_hz() const { return zq_splitting_at(*this, field_tesla); }

Regime classify_regime(const PairHamiltonianSpec& spec) {
  const double weakest =
      hz_from_angular(std::min(std::abs(spec.gamma_c), std::abs(spec.gamma_h))) *
      std::abs(spec.field_tesla);
  if (weakest >= 100.0 * spec.g_hz) return Regime::HighField;
  if (weakest <= 0.01 * spec.g_hz) return Regime::LowField;
  return Regime::Intermediate;
}

Matrix4 pair_hamiltonian(const PairHamiltonianSpec& spec) {
  static const SpinHalf s;
  const double nu_c = hz_from_angular(spec.gamma_c) * spec.field_tesla;
  const double nu_h = hz_from_angular(spec.gamma_h) * spec.field_tesla;
  Matrix4 h = spec.g_hz * (kron(s.x, s.x) + kron(s.y, s.y) + kron(s.z, s.z));
  h += nu_c * kron(s.z, s.id) + nu_h * kron(s.id, s.z);
  return h;
}

std::string_view to_string(Basis b) {
  return b == Basis::Product ? "product" : "singlet_triplet";
}

std::string_view to_string(StLabel l) {
  switch (l) {
    case StLabel::S0: return "S0";
    case StLabel::T0: return "T0";
    case StLabel::Tplus: return "T+1";
    case StLabel::Tminus: return "T-1";
  }
  return "?";
}

Vector4 singlet_triplet_vector(StLabel label) {
  const double r = 1.0 / std::numbers::sqrt2;
  Vector4 v = Vector4::Zero();
  switch (label) {
    case StLabel::S0: v(kUD) = r; v(kDU) = -r; break;
    case StLabel::T0: v(kUD) = r; v(kDU) = r; break;
    case StLabel::Tplus: v(kUU) = 1.0; break;
    case StLabel::Tminus: v(kDD) = 1.0; break;
  }
  return v;
}

std::array<Level, 4> eigenlevels(const PairHamiltonianSpec& spec) {
  const Matrix4 h = pair_hamiltonian(spec);
  const Vector4 singlet = singlet_triplet_vector(StLabel::S0);

  // The zero-quantum block is diagonalized on its own so that degeneracies
  // between blocks (the zero-field triplet) never mix labels.
  const double offset = 0.5 * (h(kUD, kUD).real() + h(kDU, kDU).real());
  const double a = zq_mixing_angle(spec.zq_splitting_hz(), 2.0 * h(kUD, kDU).real());
  const double half_gap = std::hypot(0.5 * spec.zq_splitting_hz(), h(kUD, kDU).real());

  auto embed = [](const Eigen::Vector2cd& v) {
    Vector4 out = Vector4::Zero();
    out(kUD) = v(0);
    out(kDU) = v(1);
    return out;
  };
  auto make = [&](StLabel label, double e, const Vector4& v) {
    return Level{label, e, v, std::norm(singlet.dot(v))};
  };

  return {make(StLabel::S0, offset - half_gap, embed(zq_lower(a))),
          make(StLabel::T0, offset + half_gap, embed(zq_upper(a))),
          make(StLabel::Tplus, h(kUU, kUU).real(), singlet_triplet_vector(StLabel::Tplus)),
          make(StLabel::Tminus, h(kDD, kDD).real(), singlet_triplet_vector(StLabel::Tminus))};
}

void PairPopulations::validate() const {
  double sum = 0.0;
  for (double x : n) {
    if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) {
      throw std::invalid_argument("pair populations must each lie in [0, 1]");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("pair populations must sum to 1");
  }
}

PairPopulations high_field_populations(const buildup::PolarizationPair& p) {
  if (!(std::abs(p.p_c) <= 1.0 && std::abs(p.p_h) <= 1.0)) {
    throw std::invalid_argument("polarizations must lie in [-1, 1]");
  }
  const double cu = 1.0 + p.p_c, cd_ = 1.0 - p.p_c;
  const double hu = 1.0 + p.p_h, hd = 1.0 - p.p_h;
  return {Basis::Product, {0.25 * cu * hu, 0.25 * cu * hd, 0.25 * cd_ * hu, 0.25 * cd_ * hd}};
}

std::string_view to_string(SingletAssignment a) {
  return a == SingletAssignment::DownUpToSinglet ? "eq6_as_printed" : "eq8_consistent";
}

SingletAssignment parse_assignment(std::string_view token) {
  if (token == "eq6_as_printed") return SingletAssignment::DownUpToSinglet;
  if (token == "eq8_consistent") return SingletAssignment::UpDownToSinglet;
  throw std::invalid_argument("unknown convention '" + std::string(token) +
                              "' (expected eq6_as_printed or eq8_consistent)");
}

PairPopulations adiabatic_map(const PairPopulations& pops, SingletAssignment assignment) {
  if (pops.basis != Basis::Product) {
    throw std::invalid_argument("adiabatic map expects product-basis populations");
  }
  const auto& n = pops.n;
  const bool ud_to_singlet = assignment == SingletAssignment::UpDownToSinglet;
  const double n_s = ud_to_singlet ? n[kUD] : n[kDU];
  const double n_t0 = ud_to_singlet ? n[kDU] : n[kUD];
  return {Basis::SingletTriplet, {n_s, n_t0, n[kUU], n[kDD]}};
}

double singlet_order_from_populations(const PairPopulations& pops) {
  if (pops.basis != Basis::SingletTriplet) {
    throw std::invalid_argument("singlet order needs singlet-triplet populations");
  }
  const auto& n = pops.n;
  return n[0] - (n[1] + n[2] + n[3]) / 3.0;
}

double singlet_order_closed_form(const buildup::PolarizationPair& p) {
  return (p.p_c - p.p_h - p.p_c * p.p_h) / 3.0;
}

std::string_view to_string(RampShape s) {
  switch (s) {
    case RampShape::Linear: return "linear";
    case RampShape::Exponential: return "exponential";
    case RampShape::Tanh: return "tanh";
  }
  return "?";
}

RampShape parse_ramp_shape(std::string_view token) {
  if (token == "linear") return RampShape::Linear;
  if (token == "exponential") return RampShape::Exponential;
  if (token == "tanh") return RampShape::Tanh;
  throw std::invalid_argument("unknown ramp shape '" + std::string(token) +
                              "' (expected linear, exponential or tanh)");
}

RampProtocol RampProtocol::defaults() { return {0.36, 1e-6, 0.3, RampShape::Linear}; }

void RampProtocol::validate() const {
  if (!(b_low > 0.0 && b_high > b_low && std::isfinite(b_high))) {
    throw std::invalid_argument("ramp needs b_high > b_low > 0");
  }
  if (!(t2 > 0.0) || !std::isfinite(t2)) throw std::invalid_argument("ramp needs t2 > 0");
}

namespace {

// Steepness of the tanh profile; s(t) runs over tanh(-k)..tanh(k).
constexpr double kTanhSteepness = 3.0;

}  // namespace

double ramp_field(double t, const RampProtocol& p) {
  if (!(t >= 0.0 && t <= p.t2)) {
    throw std::invalid_argument(fmt::format("ramp time {} outside [0, {}]", t, p.t2));
  }
  if (t == p.t2) return p.b_low;
  const double x = t / p.t2;
  switch (p.shape) {
    case RampShape::Linear:
      return p.b_high + (p.b_low - p.b_high) * x;
    case RampShape::Exponential:
      return p.b_high * std::pow(p.b_low / p.b_high, x);
    case RampShape::Tanh: {
      const double tk = std::tanh(kTanhSteepness);
      const double s = (std::tanh(kTanhSteepness * (2.0 * x - 1.0)) + tk) / (2.0 * tk);
      return p.b_high + (p.b_low - p.b_high) * s;
    }
  }
  return p.b_low;
}

double ramp_time_at_field(double b, const RampProtocol& p) {
  if (!(b >= p.b_low && b <= p.b_high)) {
    throw std::invalid_argument("field outside the ramp range");
  }
  double x = 0.0;
  switch (p.shape) {
    case RampShape::Linear:
      x = (p.b_high - b) / (p.b_high - p.b_low);
      break;
    case RampShape::Exponential:
      x = std::log(b / p.b_high) / std::log(p.b_low / p.b_high);
      break;
    case RampShape::Tanh: {
      const double tk = std::tanh(kTanhSteepness);
      const double s = (p.b_high - b) / (p.b_high - p.b_low);
      x = 0.5 * (std::atanh(std::clamp((2.0 * s - 1.0) * tk, -tk, tk)) / kTanhSteepness + 1.0);
      break;
    }
  }
  return std::clamp(x, 0.0, 1.0) * p.t2;
}

double ramp_rate(double t, const RampProtocol& p) {
  const double span = p.b_high - p.b_low;
  switch (p.shape) {
    case RampShape::Linear:
      return span / p.t2;
    case RampShape::Exponential:
      return ramp_field(t, p) * std::log(p.b_high / p.b_low) / p.t2;
    case RampShape::Tanh: {
      const double c = std::cosh(kTanhSteepness * (2.0 * t / p.t2 - 1.0));
      return span * kTanhSteepness / (p.t2 * std::tanh(kTanhSteepness) * c * c);
    }
  }
  return 0.0;
}

double landau_zener_estimate(const RampProtocol& protocol, const PairHamiltonianSpec& spec) {
  protocol.validate();
  if (spec.g_hz == 0.0) return 1.0;
  const double hz_per_tesla = hz_from_angular(spec.gamma_h - spec.gamma_c);
  const double b_cross = std::clamp(spec.g_hz / hz_per_tesla, protocol.b_low, protocol.b_high);
  const double t_cross = ramp_time_at_field(b_cross, protocol);
  const double sweep = hz_per_tesla * ramp_rate(t_cross, protocol);
  return std::exp(-pi * pi * spec.g_hz * spec.g_hz / sweep);
}

namespace {

/// One fourth-order Magnus step for psi' = -i pi (-d(t) sz + g sx) psi.
/// With two Gauss nodes the exponent stays in su(2), so the step is exactly
/// unitary.
template <typename SplittingFn>
Eigen::Vector2cd magnus_step(const Eigen::Vector2cd& psi, double t, double h, double g,
                             const SplittingFn& splitting) {
  constexpr double c = 0.2886751345948128822545744;  // sqrt(3)/6
  const double d1 = splitting(t + (0.5 - c) * h);
  const double d2 = splitting(t + (0.5 + c) * h);
  const double ax = pi * g * h;
  const double ay = c * pi * pi * g * h * h * (d1 - d2);
  const double az = -0.5 * pi * h * (d1 + d2);
  const double norm = std::sqrt(ax * ax + ay * ay + az * az);
  if (norm == 0.0) return psi;
  const double cs = std::cos(norm);
  const double sn = std::sin(norm) / norm;
  // exp(-i a.sigma) = cos|a| - i sin|a| (a.sigma)/|a|
  Eigen::Matrix2cd u;
  u(0, 0) = cd(cs, -sn * az);
  u(0, 1) = cd(-sn * ay, -sn * ax);
  u(1, 0) = cd(sn * ay, -sn * ax);
  u(1, 1) = cd(cs, sn * az);
  return u * psi;
}

double start_field_for(const PairHamiltonianSpec& spec, const RampProtocol& protocol,
                       double factor) {
  const double hz_per_tesla = hz_from_angular(spec.gamma_h - spec.gamma_c);
  return std::clamp(factor * spec.g_hz / hz_per_tesla, protocol.b_low, protocol.b_high);
}

}  // namespace

double sudden_leakage(const RampProtocol& protocol, const PairHamiltonianSpec& spec) {
  protocol.validate();
  const auto start = zq_lower(zq_mixing_angle(zq_splitting_at(spec, protocol.b_high), spec.g_hz));
  const auto end = zq_upper(zq_mixing_angle(zq_splitting_at(spec, protocol.b_low), spec.g_hz));
  return std::norm(end.dot(start));
}

RampResult propagate_ramp(const PairPopulations& initial, const RampProtocol& protocol,
                          const PairHamiltonianSpec& spec, const PropagationOptions& options) {
  protocol.validate();
  initial.validate();
  if (initial.basis != Basis::Product) {
    throw std::invalid_argument("ramp propagation expects product-basis populations");
  }
  if (!(spec.g_hz >= 0.0) || !(spec.gamma_h > spec.gamma_c)) {
    throw std::invalid_argument("ramp propagation needs g >= 0 and gamma_H > gamma_C");
  }
  if (!(options.start_field_factor > 0.0) || !(options.step_tolerance > 0.0)) {
    throw std::invalid_argument("ramp propagation: bad options");
  }

  const double g = spec.g_hz;
  const double hz_per_tesla = hz_from_angular(spec.gamma_h - spec.gamma_c);
  auto adiabaticity = [&](double b) {
    const double d = zq_splitting_at(spec, b);
    const double sweep = hz_per_tesla * ramp_rate(ramp_time_at_field(b, protocol), protocol);
    return sweep > 0.0 ? kTwoPi * (d * d + g * g) / sweep : INFINITY;
  };
  double b_start = start_field_for(spec, protocol, options.start_field_factor);
  while (b_start < protocol.b_high && adiabaticity(b_start) < options.min_start_adiabaticity) {
    b_start = std::min(1.25 * b_start, protocol.b_high);
  }
  const double t_start = ramp_time_at_field(b_start, protocol);
  const double t_end = protocol.t2;
  auto splitting = [&](double t) {
    return zq_splitting_at(spec, ramp_field(std::min(t, t_end), protocol));
  };

  RampResult r{};
  r.start_field = b_start;
  r.start_time = t_start;
  r.landau_zener = landau_zener_estimate(protocol, spec);
  r.start_adiabaticity = adiabaticity(b_start);

  Eigen::Vector2cd psi = zq_lower(zq_mixing_angle(splitting(t_start), g));
  double t = t_start;
  if (t_end > t_start && g > 0.0) {
    const double span = t_end - t_start;
    double h = std::min(span, 0.05 / (kTwoPi * std::hypot(splitting(t_start), g)));
    const double h_min = 1e-14 * span;
    while (t < t_end) {
      if (r.steps >= options.max_steps) {
        throw NumericalError(fmt::format(
            "ramp propagation exceeded {} steps at t = {:.6g} s (B = {:.6g} T, h = {:.3g} s, "
            "gap*h = {:.3g} rad)",
            options.max_steps, t, ramp_field(std::min(t, t_end), protocol), h,
            kTwoPi * std::hypot(splitting(t), g) * h));
      }
      h = std::min(h, t_end - t);
      const auto full = magnus_step(psi, t, h, g, splitting);
      const auto half = magnus_step(magnus_step(psi, t, 0.5 * h, g, splitting), t + 0.5 * h,
                                    0.5 * h, g, splitting);
      const double err = (full - half).norm();
      if (err <= options.step_tolerance) {
        psi = half;
        t += h;
        ++r.steps;
      }
      const double grow = err == 0.0 ? 4.0 : 0.9 * std::pow(options.step_tolerance / err, 0.2);
      h *= std::clamp(grow, 0.1, 4.0);
      if (h < h_min && t < t_end) {
        throw NumericalError(fmt::format(
            "ramp propagation step collapsed to {:.3g} s at t = {:.6g} s (B = {:.6g} T); "
            "stiffness gap*h = {:.3g} rad",
            h, t, ramp_field(std::min(t, t_end), protocol),
            kTwoPi * std::hypot(splitting(t), g) * h));
      }
    }
  }

  r.norm_error = std::abs(psi.squaredNorm() - 1.0);
  const double a_end = zq_mixing_angle(zq_splitting_at(spec, protocol.b_low), g);
  const double stay = std::norm(zq_lower(a_end).dot(psi));
  r.diabatic_leakage = std::clamp(1.0 - stay / psi.squaredNorm(), 0.0, 1.0);

  // Incoherent start: the upper branch leaks by the same amount (2x2 unitary).
  const auto& n = initial.n;
  const double leak = r.diabatic_leakage;
  r.final_populations = {Basis::SingletTriplet,
                         {n[kUD] * (1.0 - leak) + n[kDU] * leak,
                          n[kDU] * (1.0 - leak) + n[kUD] * leak, n[kUU], n[kDD]}};
  return r;
}

}  // namespace hyperpol::pair
