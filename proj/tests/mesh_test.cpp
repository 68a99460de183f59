#include "rbeam/mesh.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "rbeam/dynamics.hpp"
#include "rbeam/functionals.hpp"

namespace rbeam {
namespace {

// Nodal Hermite data of w(x) = a x^2 + b x^3.
Vector cubic_dofs(const BeamMesh& mesh, double a, double b) {
  Vector w(mesh.dim());
  for (int i = 1; i <= mesh.n_elements; ++i) {
    const double x = i * mesh.h;
    w[2 * i - 2] = a * x * x + b * x * x * x;
    w[2 * i - 1] = 2 * a * x + 3 * b * x * x;
  }
  return w;
}

// E(0) for iota = x - sin x, varsigma = 1 - cos x, integrated by hand:
// 1/2 int (1 - cos x)^2 + 1/2 int sin^2 x + 1/2 int sin^2 x over [0, 1].
double reference_energy() {
  const double s1 = std::sin(1.0), s2 = std::sin(2.0);
  const double int_one_minus_cos_sq = 1.0 - 2.0 * s1 + 0.5 + s2 / 4.0;
  const double int_sin_sq = 0.5 - s2 / 4.0;
  return 0.5 * int_one_minus_cos_sq + int_sin_sq;
}

TEST(BuildMesh, TwoElementsHaveFourDofs) {
  const BeamMesh m = build_mesh(2);
  EXPECT_EQ(m.dim(), 4);
  EXPECT_EQ(m.M0.rows(), 4);
  EXPECT_EQ(m.A.cols(), 4);
  EXPECT_EQ(m.K.rows(), 4);
  EXPECT_DOUBLE_EQ(m.h, 0.5);
  EXPECT_EQ(Eigen::LLT<Matrix>(m.M0 + m.A).info(), Eigen::Success);
}

TEST(BuildMesh, RejectsTooFewElementsAndLowQuadrature) {
  EXPECT_THROW(build_mesh(1), InvalidParameter);
  EXPECT_THROW(build_mesh(0), InvalidParameter);
  EXPECT_THROW(build_mesh(4, 2), InvalidParameter);
}

TEST(BuildMesh, MatricesExactlySymmetricAndDefinite) {
  for (int n : {2, 4, 8, 16, 32, 64}) {
    const BeamMesh m = build_mesh(n);
    for (const Matrix* mat : {&m.M0, &m.A, &m.K}) {
      EXPECT_EQ((*mat - mat->transpose()).cwiseAbs().maxCoeff(), 0.0) << "n=" << n;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> mass(m.M0 + m.A), stiff(m.K), m0(m.M0);
    EXPECT_GT(mass.eigenvalues().minCoeff(), 0.0) << "n=" << n;
    EXPECT_GT(stiff.eigenvalues().minCoeff(), 0.0) << "n=" << n;
    EXPECT_GT(m0.eigenvalues().minCoeff(), 0.0) << "n=" << n;
  }
}

TEST(BuildMesh, SelectionVectorsPickLastNode) {
  const BeamMesh m = build_mesh(5);
  EXPECT_EQ(m.sel_w1.sum(), 1.0);
  EXPECT_EQ(m.sel_wx1.sum(), 1.0);
  EXPECT_EQ(m.sel_w1[m.dim() - 2], 1.0);
  EXPECT_EQ(m.sel_wx1[m.dim() - 1], 1.0);
  EXPECT_EQ(m.sel_w1.cwiseAbs().sum(), 1.0);
}

TEST(BuildMesh, QuadraticProbe) {
  const BeamMesh m = build_mesh(8);
  const Vector w = cubic_dofs(m, 1.0, 0.0);
  EXPECT_NEAR(w.dot(m.K * w), 4.0, 1e-12);
  EXPECT_NEAR(w.dot(m.A * w), 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(w.dot(m.M0 * w), 1.0 / 5.0, 1e-12);
}

TEST(BuildMesh, CubicsIntegratedExactly) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n : {2, 3, 8, 16}) {
    const BeamMesh m = build_mesh(n);
    for (int trial = 0; trial < 20; ++trial) {
      const double a = u(rng), b = u(rng);
      const Vector w = cubic_dofs(m, a, b);
      // Symbolic integrals of (2a + 6bx)^2, (2ax + 3bx^2)^2, (ax^2 + bx^3)^2.
      const double k = 4 * a * a + 12 * a * b + 12 * b * b;
      const double ax = 4 * a * a / 3 + 3 * a * b + 9 * b * b / 5;
      const double m0 = a * a / 5 + a * b / 3 + b * b / 7;
      EXPECT_NEAR(w.dot(m.K * w), k, 1e-10 * std::max(1.0, k));
      EXPECT_NEAR(w.dot(m.A * w), ax, 1e-10 * std::max(1.0, ax));
      EXPECT_NEAR(w.dot(m.M0 * w), m0, 1e-10 * std::max(1.0, m0));
    }
  }
}

TEST(InitialCondition, RejectsClampIncompatibleData) {
  auto one = [](double) { return 1.0; };
  auto zero = [](double) { return 0.0; };
  EXPECT_THROW(InitialCondition(one, zero, zero, zero), InvalidParameter);
  EXPECT_THROW(InitialCondition::polynomial({0.0, 1.0}, {}), InvalidParameter);
  EXPECT_NO_THROW(InitialCondition::polynomial({0.0, 0.0, 1.0}, {0.0, 0.0, 0.0, 2.0}));
}

TEST(ProjectInitial, ZeroData) {
  const BeamMesh m = build_mesh(6);
  const auto [w, v] = project_initial(m, InitialCondition::zero());
  EXPECT_EQ(w.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(v.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ProjectInitial, ReferenceEndpointValue) {
  for (int n : {2, 7, 32}) {
    const BeamMesh m = build_mesh(n);
    const auto [w, v] = project_initial(m, InitialCondition::reference());
    EXPECT_NEAR(m.w1(w), 1.0 - std::sin(1.0), 1e-15);
    EXPECT_NEAR(m.w1(w), 0.158529, 1e-6);
    EXPECT_NEAR(m.wx1(v), std::sin(1.0), 1e-15);
  }
}

TEST(ProjectInitial, ReferenceEnergyMatchesOracle) {
  const double oracle = reference_energy();
  EXPECT_NEAR(oracle, 0.294867, 1e-6);
  const BeamMesh m = build_mesh(64);
  BeamState s = BeamState::zero(m);
  std::tie(s.w, s.v) = project_initial(m, InitialCondition::reference());
  EXPECT_NEAR(energy(m, s), oracle, 1e-6);
}

TEST(ProjectInitial, EnergyConvergesAtLeastSecondOrder) {
  const double oracle = reference_energy();
  std::vector<double> err;
  for (int n : {8, 16, 32, 64}) {
    const BeamMesh m = build_mesh(n);
    BeamState s = BeamState::zero(m);
    std::tie(s.w, s.v) = project_initial(m, InitialCondition::reference());
    err.push_back(std::abs(energy(m, s) - oracle));
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_GE(std::log2(err[i - 1] / err[i]), 2.0);
}

TEST(DiscreteNorms, ZeroVector) {
  const BeamMesh m = build_mesh(4);
  const Norms n = discrete_norms(m, Vector::Zero(m.dim()));
  EXPECT_EQ(n.w, 0.0);
  EXPECT_EQ(n.wx, 0.0);
  EXPECT_EQ(n.wxx, 0.0);
}

TEST(DiscreteNorms, QuadraticOnAnyMesh) {
  for (int n : {2, 3, 9, 20}) {
    const BeamMesh m = build_mesh(n);
    const Norms nr = discrete_norms(m, cubic_dofs(m, 1.0, 0.0));
    EXPECT_NEAR(nr.w, 1.0 / std::sqrt(5.0), 1e-13);
    EXPECT_NEAR(nr.wx, 2.0 / std::sqrt(3.0), 1e-13);
    EXPECT_NEAR(nr.wxx, 2.0, 1e-13);
  }
}

TEST(DiscreteNorms, DimensionMismatch) {
  const BeamMesh m = build_mesh(4);
  EXPECT_THROW(discrete_norms(m, Vector::Zero(3)), DimensionMismatch);
}

TEST(DiscreteNorms, PoincareOrderingForReferenceData) {
  const BeamMesh m = build_mesh(64);
  const auto [w, v] = project_initial(m, InitialCondition::reference());
  const Norms n = discrete_norms(m, w);
  EXPECT_LE(n.w, n.wx);
  EXPECT_LE(n.wx, n.wxx);
}

TEST(DiscreteNorms, PoincareOrderingOnRandomVectors) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  for (int n : {2, 4, 8, 16, 32, 64}) {
    const BeamMesh m = build_mesh(n);
    for (int trial = 0; trial < 100; ++trial) {
      Vector w(m.dim());
      for (auto& x : w) x = g(rng);
      const Norms nr = discrete_norms(m, w);
      EXPECT_LE(nr.w, nr.wx) << "n=" << n;
      EXPECT_LE(nr.wx, nr.wxx) << "n=" << n;
    }
  }
}

TEST(BeamMesh, EvalAtMatchesNodalData) {
  const BeamMesh m = build_mesh(10);
  const auto [w, v] = project_initial(m, InitialCondition::reference());
  for (int i = 0; i <= 10; ++i) {
    const double x = i * m.h;
    const PointValue p = m.eval_at(w, x);
    EXPECT_NEAR(p.w, x - std::sin(x), 1e-14);
    EXPECT_NEAR(p.wx, 1.0 - std::cos(x), 1e-13);
  }
}

}  // namespace
}  // namespace rbeam
