#pragma once

// Hermite-cubic Galerkin discretization of the clamped beam on [0, 1].
//
// Each node carries two degrees of freedom (value, slope). The clamped node at
// x = 0 is eliminated, so a mesh with n elements has 2n unknowns ordered
// (w_1, w_x,1, w_2, w_x,2, ..., w_n, w_x,n).

#include <array>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rbeam/error.hpp"
#include "rbeam/quadrature.hpp"

namespace rbeam {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace hermite {

/// Shape functions and their x-derivatives on an element of length h at local coordinate xi.
struct ShapeValues {
  std::array<double, 4> n;
  std::array<double, 4> dn;
  std::array<double, 4> ddn;
};

inline ShapeValues shape(double xi, double h) {
  const double x2 = xi * xi, x3 = x2 * xi;
  ShapeValues s;
  s.n = {1.0 - 3.0 * x2 + 2.0 * x3, h * (xi - 2.0 * x2 + x3), 3.0 * x2 - 2.0 * x3, h * (x3 - x2)};
  s.dn = {(-6.0 * xi + 6.0 * x2) / h, 1.0 - 4.0 * xi + 3.0 * x2, (6.0 * xi - 6.0 * x2) / h,
          -2.0 * xi + 3.0 * x2};
  s.ddn = {(-6.0 + 12.0 * xi) / (h * h), (-4.0 + 6.0 * xi) / h, (6.0 - 12.0 * xi) / (h * h),
           (-2.0 + 6.0 * xi) / h};
  return s;
}

}  // namespace hermite

/// Value and first two x-derivatives of a Hermite interpolant at one point.
struct PointValue {
  double w = 0.0;
  double wx = 0.0;
  double wxx = 0.0;
};

struct BeamMesh {
  int n_elements = 0;
  double h = 0.0;
  int quad_order = 4;
  Matrix M0;  // int w u
  Matrix A;   // int w_x u_x
  Matrix K;   // int w_xx u_xx
  Vector sel_w1;
  Vector sel_wx1;

  Eigen::Index dim() const { return 2 * static_cast<Eigen::Index>(n_elements); }

  /// Reduced indices of the four local DOFs of element e; -1 marks a clamped DOF.
  std::array<Eigen::Index, 4> element_dofs(int e) const {
    const Eigen::Index base = 2 * static_cast<Eigen::Index>(e) - 2;
    return {base, base + 1, base + 2, base + 3};
  }

  std::array<double, 4> gather(const Vector& dofs, int e) const {
    std::array<double, 4> local{};
    const auto idx = element_dofs(e);
    for (int i = 0; i < 4; ++i) local[i] = idx[i] >= 0 ? dofs[idx[i]] : 0.0;
    return local;
  }

  PointValue eval(const Vector& dofs, int e, double xi) const {
    const auto local = gather(dofs, e);
    const auto s = hermite::shape(xi, h);
    PointValue p;
    for (int i = 0; i < 4; ++i) {
      p.w += s.n[i] * local[i];
      p.wx += s.dn[i] * local[i];
      p.wxx += s.ddn[i] * local[i];
    }
    return p;
  }

  /// Evaluates the interpolant at a physical coordinate x in [0, 1].
  PointValue eval_at(const Vector& dofs, double x) const {
    int e = static_cast<int>(std::floor(x / h));
    if (e >= n_elements) e = n_elements - 1;
    if (e < 0) e = 0;
    return eval(dofs, e, x / h - e);
  }

  double w1(const Vector& dofs) const { return sel_w1.dot(dofs); }
  double wx1(const Vector& dofs) const { return sel_wx1.dot(dofs); }

  void check_dim(const Vector& v, const char* what) const {
    if (v.size() != dim())
      throw DimensionMismatch(what, static_cast<std::size_t>(dim()),
                              static_cast<std::size_t>(v.size()));
  }
};

/// Assembles M0, A and K from Hermite cubics with `quad_order`-point Gauss quadrature.
inline BeamMesh build_mesh(int n_elements, int quad_order = 4) {
  if (n_elements < 2) throw InvalidParameter("build_mesh: n_elements must be >= 2");
  if (quad_order < 3) throw InvalidParameter("build_mesh: quad_order must be >= 3");

  BeamMesh mesh;
  mesh.n_elements = n_elements;
  mesh.h = 1.0 / n_elements;
  mesh.quad_order = quad_order;
  const Eigen::Index n = mesh.dim();
  mesh.M0 = Matrix::Zero(n, n);
  mesh.A = Matrix::Zero(n, n);
  mesh.K = Matrix::Zero(n, n);

  const GaussRule rule = gauss_legendre_unit(quad_order);
  const double h = mesh.h;

  // Element matrices are identical on a uniform mesh.
  Eigen::Matrix4d me = Eigen::Matrix4d::Zero(), ae = me, ke = me;
  for (int q = 0; q < rule.order(); ++q) {
    const auto s = hermite::shape(rule.points[q], h);
    const double wq = rule.weights[q] * h;
    for (int i = 0; i < 4; ++i) {
      for (int j = i; j < 4; ++j) {
        me(i, j) += wq * s.n[i] * s.n[j];
        ae(i, j) += wq * s.dn[i] * s.dn[j];
        ke(i, j) += wq * s.ddn[i] * s.ddn[j];
      }
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) {
      me(i, j) = me(j, i);
      ae(i, j) = ae(j, i);
      ke(i, j) = ke(j, i);
    }

  for (int e = 0; e < n_elements; ++e) {
    const auto idx = mesh.element_dofs(e);
    for (int i = 0; i < 4; ++i) {
      if (idx[i] < 0) continue;
      for (int j = 0; j < 4; ++j) {
        if (idx[j] < 0) continue;
        mesh.M0(idx[i], idx[j]) += me(i, j);
        mesh.A(idx[i], idx[j]) += ae(i, j);
        mesh.K(idx[i], idx[j]) += ke(i, j);
      }
    }
  }

  mesh.sel_w1 = Vector::Zero(n);
  mesh.sel_wx1 = Vector::Zero(n);
  mesh.sel_w1[n - 2] = 1.0;
  mesh.sel_wx1[n - 1] = 1.0;
  return mesh;
}

/// Initial displacement and velocity profiles with their slopes.
///
/// Construction checks compatibility with the clamp, iota(0) = iota'(0) = 0 and
/// likewise for varsigma, to within 1e-12.
class InitialCondition {
 public:
  using Fn = std::function<double(double)>;

  InitialCondition(Fn iota, Fn iota_x, Fn varsigma, Fn varsigma_x)
      : iota_(std::move(iota)),
        iota_x_(std::move(iota_x)),
        varsigma_(std::move(varsigma)),
        varsigma_x_(std::move(varsigma_x)) {
    constexpr double tol = 1e-12;
    if (std::abs(iota_(0.0)) > tol || std::abs(iota_x_(0.0)) > tol ||
        std::abs(varsigma_(0.0)) > tol || std::abs(varsigma_x_(0.0)) > tol)
      throw InvalidParameter("InitialCondition: data incompatible with clamp w(0) = w_x(0) = 0");
  }

  double iota(double x) const { return iota_(x); }
  double iota_x(double x) const { return iota_x_(x); }
  double varsigma(double x) const { return varsigma_(x); }
  double varsigma_x(double x) const { return varsigma_x_(x); }

  static InitialCondition zero() {
    auto z = [](double) { return 0.0; };
    return {z, z, z, z};
  }

  /// iota = x - sin x, varsigma = 1 - cos x.
  static InitialCondition reference() {
    return {[](double x) { return x - std::sin(x); }, [](double x) { return 1.0 - std::cos(x); },
            [](double x) { return 1.0 - std::cos(x); }, [](double x) { return std::sin(x); }};
  }

  /// Power-series data: iota = sum a_j x^j, varsigma = sum b_j x^j.
  static InitialCondition polynomial(std::vector<double> a, std::vector<double> b) {
    auto value = [](std::vector<double> c) {
      return [c = std::move(c)](double x) {
        double s = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
        return s;
      };
    };
    auto slope = [](std::vector<double> c) {
      return [c = std::move(c)](double x) {
        double s = 0.0;
        for (std::size_t j = c.size(); j-- > 1;) s = s * x + static_cast<double>(j) * c[j];
        return s;
      };
    };
    return {value(a), slope(a), value(b), slope(b)};
  }

 private:
  Fn iota_, iota_x_, varsigma_, varsigma_x_;
};

/// Nodal Hermite interpolation of the initial data (values and slopes at nodes 1..n).
inline std::pair<Vector, Vector> project_initial(const BeamMesh& mesh, const InitialCondition& ic) {
  Vector w0(mesh.dim()), v0(mesh.dim());
  for (int i = 1; i <= mesh.n_elements; ++i) {
    const double x = i * mesh.h;
    const Eigen::Index k = 2 * static_cast<Eigen::Index>(i) - 2;
    w0[k] = ic.iota(x);
    w0[k + 1] = ic.iota_x(x);
    v0[k] = ic.varsigma(x);
    v0[k + 1] = ic.varsigma_x(x);
  }
  return {w0, v0};
}

struct Norms {
  double w = 0.0;
  double wx = 0.0;
  double wxx = 0.0;
};

/// L2 norms of the interpolant and its first two derivatives.
inline Norms discrete_norms(const BeamMesh& mesh, const Vector& w) {
  mesh.check_dim(w, "discrete_norms");
  const GaussRule rule = gauss_legendre_unit(mesh.quad_order);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int e = 0; e < mesh.n_elements; ++e) {
    for (int q = 0; q < rule.order(); ++q) {
      const PointValue p = mesh.eval(w, e, rule.points[q]);
      const double wq = rule.weights[q] * mesh.h;
      s0 += wq * p.w * p.w;
      s1 += wq * p.wx * p.wx;
      s2 += wq * p.wxx * p.wxx;
    }
  }
  return {std::sqrt(s0), std::sqrt(s1), std::sqrt(s2)};
}

}  // namespace rbeam
