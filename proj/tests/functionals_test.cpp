#include "rbeam/functionals.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

namespace rbeam {
namespace {

BeamState projected(const BeamMesh& m, const InitialCondition& ic) {
  BeamState s = BeamState::zero(m);
  std::tie(s.w, s.v) = project_initial(m, ic);
  return s;
}

BeamState random_state(const BeamMesh& m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  BeamState s = BeamState::zero(m);
  for (auto& x : s.w) x = g(rng);
  for (auto& x : s.v) x = g(rng);
  return s;
}

// E(0) for w = x - sin x, w_t = 1 - cos x, evaluated in closed form.
double reference_E0() {
  const double s1 = std::sin(1.0), s2 = std::sin(2.0);
  return 0.5 * (1.0 - 2.0 * s1 + 0.5 + s2 / 4.0) + (0.5 - s2 / 4.0);
}

// Composite Simpson on [0, 1].
template <class F>
double simpson(F f, int panels = 20000) {
  const double h = 1.0 / panels;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

TEST(Energy, ZeroAndScaling) {
  const BeamMesh m = build_mesh(8);
  EXPECT_EQ(energy(m, BeamState::zero(m)), 0.0);
  std::mt19937_64 rng(5);
  BeamState s = random_state(m, rng);
  const double E = energy(m, s);
  EXPECT_GT(E, 0.0);
  s.w *= 3.0;
  s.v *= 3.0;
  EXPECT_NEAR(energy(m, s), 9.0 * E, 1e-12 * 9.0 * E);
}

TEST(Energy, ReferenceInitialEnergy) {
  EXPECT_NEAR(reference_E0(), 0.294867, 1e-6);
  const BeamMesh m = build_mesh(64);
  EXPECT_NEAR(energy(m, projected(m, InitialCondition::reference())), reference_E0(), 1e-6);
}

TEST(Energy, DimensionMismatch) {
  const BeamMesh m = build_mesh(4);
  BeamState s = BeamState::zero(m);
  s.v = Vector::Zero(2);
  EXPECT_THROW(energy(m, s), DimensionMismatch);
}

TEST(Rho, ZeroVelocityGivesZero) {
  const BeamMesh m = build_mesh(16);
  BeamState s = projected(m, InitialCondition::reference());
  s.v.setZero();
  EXPECT_EQ(rho(m, s, 0.75), 0.0);
}

TEST(Rho, RejectsAlphaOutsideRange) {
  const BeamMesh m = build_mesh(4);
  EXPECT_THROW(rho(m, BeamState::zero(m), 0.5), InvalidParameter);
  EXPECT_THROW(rho(m, BeamState::zero(m), 1.0), InvalidParameter);
}

TEST(Rho, ReferenceDataAgainstSimpson) {
  const double alpha = 0.75;
  const double oracle = simpson([alpha](double x) {
    const double w = x - std::sin(x), wx = 1.0 - std::cos(x), wxx = std::sin(x);
    const double v = 1.0 - std::cos(x), vx = std::sin(x);
    return v * (x * wx - alpha * w) + vx * ((1.0 - alpha) * wx + x * wxx);
  });
  const BeamMesh m = build_mesh(64);
  EXPECT_NEAR(rho(m, projected(m, InitialCondition::reference()), alpha), oracle, 1e-6);
}

TEST(Rho, BoundedByThreeTimesEnergy) {
  std::mt19937_64 rng(11);
  for (int n : {2, 4, 16, 32}) {
    const BeamMesh m = build_mesh(n);
    for (int trial = 0; trial < 100; ++trial) {
      const BeamState s = random_state(m, rng);
      for (double alpha : {0.51, 0.75, 0.99})
        EXPECT_LE(std::abs(rho(m, s, alpha)), 3.0 * energy(m, s)) << "n=" << n;
    }
  }
}

TEST(Lyapunov, Definition) {
  EXPECT_DOUBLE_EQ(lyapunov(2.0, -1.0, 0.1), 1.9);
  EXPECT_THROW(lyapunov(1.0, 1.0, 0.0), InvalidParameter);
}

TEST(Lyapunov, SandwichOnRandomStates) {
  std::mt19937_64 rng(13);
  const BeamMesh m = build_mesh(16);
  std::vector<FunctionalSample> samples;
  for (int trial = 0; trial < 200; ++trial)
    samples.push_back(sample_functionals(m, random_state(m, rng), {}, 0.75, 0.1));
  const BoundViolations b = check_bounds(samples, 0.1);
  EXPECT_EQ(b.sandwich, 0u);
  EXPECT_EQ(b.multiplier, 0u);
  EXPECT_EQ(b.negative_energy, 0u);
}

TEST(CheckBounds, CountsViolations) {
  FunctionalSample ok;
  ok.E = 1.0;
  ok.rho = 1.0;
  ok.V = 1.1;
  FunctionalSample bad = ok;
  bad.rho = 4.0;
  bad.V = 2.0;
  const std::vector<FunctionalSample> s{ok, bad};
  const BoundViolations b = check_bounds(s, 0.1);
  EXPECT_EQ(b.multiplier, 1u);
  EXPECT_EQ(b.sandwich, 1u);
}

TEST(SampleFunctionals, TracesAndRateRhs) {
  const BeamMesh m = build_mesh(8);
  const BeamState s = projected(m, InitialCondition::reference());
  const ControlInput u{-0.3, 0.2};
  const FunctionalSample f = sample_functionals(m, s, u, 0.75, 0.1);
  EXPECT_NEAR(f.wt1, 1.0 - std::cos(1.0), 1e-14);
  EXPECT_NEAR(f.wxt1, std::sin(1.0), 1e-14);
  EXPECT_NEAR(f.w1, 1.0 - std::sin(1.0), 1e-14);
  EXPECT_NEAR(f.dE_dt_rhs, -0.3 * std::sin(1.0) + 0.2 * (1.0 - std::cos(1.0)), 1e-14);
  EXPECT_DOUBLE_EQ(f.V, f.E + 0.1 * f.rho);
}

TEST(RhoRateRhs, StaticStateReducesToPotentialTerms) {
  FunctionalSample f;
  f.int_wxx2 = 2.0;
  f.w1 = 0.5;
  f.wx1 = 0.25;
  const double alpha = 0.75;
  const double wxx1 = 0.4;
  const double expected = -(1.5 - alpha) * 2.0 - 0.5 * wxx1 * wxx1;
  EXPECT_DOUBLE_EQ(rho_rate_rhs(f, alpha, wxx1), expected);
  f.U1 = 0.1;
  f.U2 = -0.2;
  EXPECT_DOUBLE_EQ(rho_rate_rhs(f, alpha, wxx1),
                   expected - 0.2 * 0.25 + alpha * 0.2 * 0.5 + 0.1 * ((1 - alpha) * 0.25 + wxx1));
}

TEST(EnergyRateIdentity, QuadraticIsExactAndBreaksAreSkipped) {
  std::vector<FunctionalSample> s(11);
  for (int i = 0; i <= 10; ++i) {
    s[i].t = 0.1 * i;
    s[i].E = s[i].t * s[i].t;
    s[i].dE_dt_rhs = 2.0 * s[i].t;
  }
  s[5].dE_dt_rhs = 100.0;
  const std::vector<std::size_t> breaks{5};
  const IdentityReport with_break = energy_rate_identity(s, breaks);
  EXPECT_LE(with_break.max_residual, 1e-13);
  EXPECT_EQ(with_break.checked, 8u);
  EXPECT_NEAR(with_break.dt, 0.1, 1e-15);
  EXPECT_TRUE(std::isnan(with_break.lhs.front()));
  EXPECT_NEAR(energy_rate_identity(s).max_residual, 99.0, 1e-9);
}

TEST(EnergyRateIdentity, NeedsThreeSamples) {
  std::vector<FunctionalSample> s(2);
  s[1].t = 1.0;
  EXPECT_THROW(energy_rate_identity(s), InvalidParameter);
  EXPECT_THROW(rho_rate_check(s, 0.75), InvalidParameter);
}

// Trajectory with a control held constant over the whole run (no jumps).
std::vector<FunctionalSample> held_run(int n, double dt, double T, const InitialCondition& ic,
                                       const ControlInput& u, double alpha) {
  const BeamMesh m = build_mesh(n);
  const NewmarkIntegrator integ(m, {dt});
  BeamState s = projected(m, ic);
  s.a = integ.consistent_acceleration(s.w, u);
  std::vector<FunctionalSample> out{sample_functionals(m, s, u, alpha, 0.1)};
  const int steps = static_cast<int>(std::lround(T / dt));
  for (int k = 0; k < steps; ++k) {
    s = integ.step(s, u);
    out.push_back(sample_functionals(m, s, u, alpha, 0.1));
  }
  return out;
}

InitialCondition smooth_ic() {
  // iota = x^2 (1 - x)^3, varsigma = x^2 (1 - x)^2
  return InitialCondition::polynomial({0, 0, 1, -3, 3, -1}, {0, 0, 1, -2, 1});
}

TEST(EnergyRateIdentity, SecondOrderInTimeWithHeldControl) {
  const ControlInput u{-0.02, 0.01};
  const auto r1 = energy_rate_identity(held_run(16, 2e-3, 0.5, smooth_ic(), u, 0.75)).max_residual;
  const auto r2 = energy_rate_identity(held_run(16, 1e-3, 0.5, smooth_ic(), u, 0.75)).max_residual;
  EXPECT_LT(r2, r1);
  EXPECT_GE(r1 / r2, 3.5);
}

TEST(RhoRateCheck, ConvergesForSmoothUncontrolledData) {
  const double alpha = 0.75;
  const auto coarse = rho_rate_check(held_run(16, 1.0 / (16 * 32), 0.25, smooth_ic(), {}, alpha), alpha);
  const auto fine = rho_rate_check(held_run(64, 1.0 / (64 * 32), 0.25, smooth_ic(), {}, alpha), alpha);
  EXPECT_GT(coarse.checked, 0u);
  EXPECT_GE(coarse.max_residual / fine.max_residual, 10.0);
}

}  // namespace
}  // namespace rbeam
