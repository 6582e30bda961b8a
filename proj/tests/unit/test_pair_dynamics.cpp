#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "hyperpol/pair_dynamics.hpp"
#include "hyperpol/units.hpp"

using namespace hyperpol;
using namespace hyperpol::pair;

namespace {

constexpr double kPi = std::numbers::pi;

// Hz per tesla of the zero-quantum splitting, from the table constants.
double zq_hz_per_tesla() {
  return constants::kGammaProtonHzPerT - constants::kGammaCarbon13HzPerT;
}

// Zero-quantum block {ud, du} written out by hand, Hz.
Eigen::Matrix2cd zq_block(double g, double b) {
  const double d = zq_hz_per_tesla() * b;
  Eigen::Matrix2cd h;
  h << -d / 2 - g / 4, g / 2, g / 2, d / 2 - g / 4;
  return h;
}

// Lower / upper eigenvector of the block via Eigen, phase-free use only.
Eigen::Vector2cd zq_state(double g, double b, bool upper) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(zq_block(g, b));
  return es.eigenvectors().col(upper ? 1 : 0);
}

// Fixed-step classical RK4 on psi' = -2 pi i H(t) psi, starting in the lower
// state at b_start, projected onto the upper state at b_low.
double rk4_leakage(double g, const RampProtocol& p, double b_start, int steps) {
  const double t0 = ramp_time_at_field(b_start, p);
  const double h = (p.t2 - t0) / steps;
  Eigen::Vector2cd psi = zq_state(g, b_start, false);
  const std::complex<double> mi(0.0, -2.0 * kPi);
  auto rhs = [&](double t, const Eigen::Vector2cd& y) -> Eigen::Vector2cd {
    return mi * (zq_block(g, ramp_field(std::min(t, p.t2), p)) * y);
  };
  double t = t0;
  for (int k = 0; k < steps; ++k) {
    const auto k1 = rhs(t, psi);
    const auto k2 = rhs(t + h / 2, psi + h / 2 * k1);
    const auto k3 = rhs(t + h / 2, psi + h / 2 * k2);
    const auto k4 = rhs(t + h, psi + h * k3);
    psi += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t0 + h * (k + 1);
  }
  return std::norm(zq_state(g, p.b_low, true).dot(psi));
}

PairPopulations lower_branch_only() {
  return {Basis::Product, {0.0, 1.0, 0.0, 0.0}};
}

}  // namespace

TEST_CASE("zero-field spectrum") {
  const auto spec = PairHamiltonianSpec::defaults().at_field(0.0);
  Eigen::SelfAdjointEigenSolver<Matrix4> es(pair_hamiltonian(spec));
  const auto ev = es.eigenvalues();
  const double g = 220.0;
  CHECK(std::abs(ev(0) + 0.75 * g) <= 1e-10 * 0.75 * g);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(ev(i) - 0.25 * g) <= 1e-10 * 0.25 * g);

  const auto levels = eigenlevels(spec);
  CHECK(levels[0].label == StLabel::S0);
  CHECK(levels[0].energy_hz == doctest::Approx(-0.75 * g).epsilon(1e-14));
  CHECK(levels[0].singlet_character == doctest::Approx(1.0).epsilon(1e-14));
  for (int i = 1; i < 4; ++i) {
    CHECK(levels[i].energy_hz == doctest::Approx(0.25 * g).epsilon(1e-14));
    CHECK(levels[i].singlet_character == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  }
}

TEST_CASE("Hamiltonian structure at the polarizing field") {
  const auto spec = PairHamiltonianSpec::defaults();
  const Matrix4 h = pair_hamiltonian(spec);
  CHECK((h - h.adjoint()).norm() <= 1e-9);
  // uu=0 ud=1 du=2 dd=3; only ud/du couple
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const bool zq = (i == 1 && j == 2) || (i == 2 && j == 1);
      if (i != j && !zq) CHECK(std::abs(h(i, j)) == 0.0);
    }
  }
  CHECK(h(1, 2).real() == doctest::Approx(110.0).epsilon(1e-14));
  CHECK(spec.zq_splitting_hz() == doctest::Approx(zq_hz_per_tesla() * 0.36).epsilon(1e-14));
  CHECK(spec.zq_splitting_hz() == doctest::Approx(11.47284e6).epsilon(1e-6));
  CHECK((h(2, 2) - h(1, 1)).real() == doctest::Approx(spec.zq_splitting_hz()).epsilon(1e-12));
  // Zeeman + coupling on the stretched states
  const double nu_sum = (constants::kGammaProtonHzPerT + constants::kGammaCarbon13HzPerT) * 0.36;
  CHECK(h(0, 0).real() == doctest::Approx(55.0 + nu_sum / 2).epsilon(1e-14));
  CHECK(h(3, 3).real() == doctest::Approx(55.0 - nu_sum / 2).epsilon(1e-14));
}

TEST_CASE("no coupling gives a diagonal Hamiltonian") {
  auto spec = PairHamiltonianSpec::defaults();
  spec.g_hz = 0.0;
  const Matrix4 h = pair_hamiltonian(spec);
  CHECK((h - Matrix4(h.diagonal().asDiagonal())).norm() == 0.0);
}

TEST_CASE("eigenlevels match a numerical 2x2 diagonalization") {
  const double g = 220.0;
  for (double b : {1e-7, 1e-6, 6.9e-6, 3e-5, 1e-3, 0.36}) {
    const auto levels = eigenlevels(PairHamiltonianSpec::defaults().at_field(b));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(zq_block(g, b));
    CHECK(levels[0].energy_hz == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-12));
    CHECK(levels[1].energy_hz == doctest::Approx(es.eigenvalues()(1)).epsilon(1e-12));
    const Eigen::Vector2cd lo(levels[0].vector(1), levels[0].vector(2));
    const Eigen::Vector2cd up(levels[1].vector(1), levels[1].vector(2));
    CHECK(std::abs(lo.dot(es.eigenvectors().col(0))) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(up.dot(es.eigenvectors().col(1))) == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& l : levels) CHECK(l.vector.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("levels are continuous: S0 stays the lower zero-quantum branch") {
  double prev_char = 1.0 + 1e-12;
  for (int k = 0; k <= 300; ++k) {
    const double b = 1e-8 * std::pow(10.0, 7.5 * k / 300.0);
    const auto levels = eigenlevels(PairHamiltonianSpec::defaults().at_field(b));
    CHECK(levels[0].energy_hz < levels[1].energy_hz);
    CHECK(levels[0].singlet_character <= prev_char);
    CHECK(levels[0].singlet_character >= 0.5 - 1e-12);
    CHECK(levels[0].singlet_character + levels[1].singlet_character ==
          doctest::Approx(1.0).epsilon(1e-12));
    prev_char = levels[0].singlet_character;
  }
  // high field: lower branch is ud
  const auto hi = eigenlevels(PairHamiltonianSpec::defaults());
  CHECK(std::norm(hi[0].vector(1)) > 1.0 - 1e-8);
}

TEST_CASE("regime classification") {
  const auto spec = PairHamiltonianSpec::defaults();
  CHECK(classify_regime(spec) == Regime::HighField);
  CHECK(classify_regime(spec.at_field(1e-3)) == Regime::Intermediate);
  CHECK(classify_regime(spec.at_field(1e-7)) == Regime::LowField);
}

TEST_CASE("singlet-triplet vectors are orthonormal") {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double d = std::abs(singlet_triplet_vector(StLabel(i)).dot(singlet_triplet_vector(StLabel(j))));
      CHECK(d == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0));
    }
  }
}

TEST_CASE("singlet-order identity over random polarizations") {
  std::mt19937_64 rng(20260415);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 10000; ++k) {
    const buildup::PolarizationPair p{u(rng), u(rng)};
    const auto hf = high_field_populations(p);
    CHECK_NOTHROW(hf.validate());
    const auto st = adiabatic_map(hf, SingletAssignment::UpDownToSinglet);
    REQUIRE(st.basis == Basis::SingletTriplet);
    const double direct = singlet_order_from_populations(st);
    CHECK(std::abs(direct - singlet_order_closed_form(p)) <= 1e-12);
    // the other assignment swaps the roles of the two spins
    const auto alt = adiabatic_map(hf, SingletAssignment::DownUpToSinglet);
    CHECK(std::abs(singlet_order_from_populations(alt) - (p.p_h - p.p_c - p.p_c * p.p_h) / 3.0) <= 1e-12);
  }
}

TEST_CASE("operating point") {
  const buildup::PolarizationPair p{0.0, 0.006};
  const auto st = adiabatic_map(high_field_populations(p), SingletAssignment::UpDownToSinglet);
  CHECK(singlet_order_from_populations(st) == doctest::Approx(-0.002).epsilon(1e-12));
  CHECK(singlet_order_closed_form(p) == doctest::Approx(-0.002).epsilon(1e-12));
}

TEST_CASE("population validation and basis checks") {
  CHECK_THROWS_AS((PairPopulations{Basis::Product, {0.5, 0.5, 0.5, 0.0}}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((PairPopulations{Basis::Product, {1.5, -0.5, 0.0, 0.0}}.validate()),
                  std::invalid_argument);
  const PairPopulations st{Basis::SingletTriplet, {0.25, 0.25, 0.25, 0.25}};
  CHECK_THROWS_AS(adiabatic_map(st, SingletAssignment::UpDownToSinglet), std::invalid_argument);
  const PairPopulations pr{Basis::Product, {0.25, 0.25, 0.25, 0.25}};
  CHECK_THROWS_AS(singlet_order_from_populations(pr), std::invalid_argument);
  CHECK(singlet_order_from_populations(st) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("convention tokens") {
  CHECK(parse_assignment("eq8_consistent") == SingletAssignment::UpDownToSinglet);
  CHECK(parse_assignment("eq6_as_printed") == SingletAssignment::DownUpToSinglet);
  CHECK(to_string(SingletAssignment::UpDownToSinglet) == "eq8_consistent");
  CHECK_THROWS_AS(parse_assignment("eq7"), std::invalid_argument);
  CHECK(parse_ramp_shape("linear") == RampShape::Linear);
  CHECK(parse_ramp_shape("exponential") == RampShape::Exponential);
  CHECK(parse_ramp_shape("tanh") == RampShape::Tanh);
  CHECK_THROWS_AS(parse_ramp_shape("cubic"), std::invalid_argument);
}

TEST_CASE("ramp profiles") {
  for (auto shape : {RampShape::Linear, RampShape::Exponential, RampShape::Tanh}) {
    const RampProtocol p{0.36, 1e-6, 0.3, shape};
    CHECK(ramp_field(0.0, p) == doctest::Approx(0.36).epsilon(1e-15));
    CHECK(ramp_field(0.3, p) == 1e-6);
    double prev = INFINITY;
    for (int k = 0; k <= 1000; ++k) {
      const double t = 0.3 * k / 1000.0;
      const double b = ramp_field(t, p);
      CHECK(b < prev);
      prev = b;
      CHECK(ramp_time_at_field(b, p) == doctest::Approx(t).epsilon(1e-9).scale(1e-6));
      // rate against a central difference
      if (k > 0 && k < 1000) {
        const double h = 1e-7;
        const double fd = (ramp_field(t - h, p) - ramp_field(t + h, p)) / (2 * h);
        CHECK(ramp_rate(t, p) == doctest::Approx(fd).epsilon(1e-5));
      }
    }
    CHECK_THROWS_AS(ramp_field(0.31, p), std::invalid_argument);
  }
  CHECK_THROWS_AS((RampProtocol{1e-6, 0.36, 0.3, RampShape::Linear}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((RampProtocol{0.36, 1e-6, 0.0, RampShape::Linear}.validate()),
                  std::invalid_argument);
}

TEST_CASE("propagation agrees with an independent RK4 integration") {
  const auto spec = PairHamiltonianSpec::defaults();
  const double b_start = 100.0 * 220.0 / zq_hz_per_tesla();
  struct Case {
    RampShape shape;
    double t2;
    int steps;
  };
  for (const auto& c : {Case{RampShape::Linear, 3e-3, 60000}, Case{RampShape::Linear, 0.3, 60000},
                        Case{RampShape::Exponential, 3e-3, 200000}}) {
    const RampProtocol p{0.36, 1e-6, c.t2, c.shape};
    const auto r = propagate_ramp(lower_branch_only(), p, spec);
    CHECK(r.start_field >= b_start);
    CHECK(r.start_adiabaticity >= 1e3);
    const double ref = rk4_leakage(220.0, p, r.start_field, c.steps);
    CHECK(r.diabatic_leakage == doctest::Approx(ref).epsilon(1e-7));
    CHECK(r.norm_error < 1e-10);
  }
}

TEST_CASE("sudden leakage matches the eigenvector overlap") {
  const auto spec = PairHamiltonianSpec::defaults();
  const auto p = RampProtocol::defaults();
  const double ref = std::norm(zq_state(220.0, p.b_low, true).dot(zq_state(220.0, p.b_high, false)));
  CHECK(sudden_leakage(p, spec) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("Landau-Zener closed form") {
  const auto spec = PairHamiltonianSpec::defaults();
  const auto p = RampProtocol::defaults();
  const double sweep = zq_hz_per_tesla() * (p.b_high - p.b_low) / p.t2;
  CHECK(landau_zener_estimate(p, spec) ==
        doctest::Approx(std::exp(-kPi * kPi * 220.0 * 220.0 / sweep)).epsilon(1e-12));
}

TEST_CASE("propagation conserves populations and leakage falls with t2") {
  const auto spec = PairHamiltonianSpec::defaults();
  const auto init = high_field_populations({0.0013, 0.006});
  double prev = 1.0;
  for (double t2 : {3e-3, 3e-2, 0.3}) {
    const auto r = propagate_ramp(init, {0.36, 1e-6, t2, RampShape::Linear}, spec);
    double sum = 0.0;
    for (double n : r.final_populations.n) sum += n;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.final_populations.basis == Basis::SingletTriplet);
    CHECK_NOTHROW(r.final_populations.validate());
    CHECK(r.diabatic_leakage < prev);
    CHECK(r.start_adiabaticity >= 1e3);
    prev = r.diabatic_leakage;
    // stretched states are untouched
    CHECK(r.final_populations.n[2] == doctest::Approx(init.n[0]).epsilon(1e-14));
    CHECK(r.final_populations.n[3] == doctest::Approx(init.n[3]).epsilon(1e-14));
  }
}

TEST_CASE("leakage is insensitive to the start field") {
  const auto spec = PairHamiltonianSpec::defaults();
  const RampProtocol p{0.36, 1e-6, 3e-3, RampShape::Linear};
  PropagationOptions far;
  far.start_field_factor = 1000.0;
  far.min_start_adiabaticity = 1e5;
  const double a = propagate_ramp(lower_branch_only(), p, spec).diabatic_leakage;
  const double b = propagate_ramp(lower_branch_only(), p, spec, far).diabatic_leakage;
  CHECK(std::abs(a - b) < 1e-5);
}

TEST_CASE("a slow exponential ramp is adiabatic") {
  const auto spec = PairHamiltonianSpec::defaults();
  const auto init = high_field_populations({0.0013, 0.006});
  const auto r = propagate_ramp(init, {0.36, 1e-6, 0.3, RampShape::Exponential}, spec);
  CHECK(r.diabatic_leakage < 1e-4);
  const auto ideal = adiabatic_map(init, SingletAssignment::UpDownToSinglet);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(r.final_populations.n[i] - ideal.n[i]) < 1e-6);
}
