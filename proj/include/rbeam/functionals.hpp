#pragma once

// Scalar functionals on discrete states: the energy E, the multiplier rho, the
// Lyapunov value V = E + lambda rho, and numerical checks of their rate identities.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "rbeam/dynamics.hpp"
#include "rbeam/error.hpp"
#include "rbeam/mesh.hpp"
#include "rbeam/quadrature.hpp"

namespace rbeam {

/// E = 1/2 v'M0 v + 1/2 w'K w + 1/2 v'A v.
inline double energy(const BeamMesh& mesh, const BeamState& s) {
  mesh.check_dim(s.w, "energy: w");
  mesh.check_dim(s.v, "energy: v");
  return 0.5 * s.v.dot(mesh.M0 * s.v) + 0.5 * s.w.dot(mesh.K * s.w) + 0.5 * s.v.dot(mesh.A * s.v);
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0)) throw InvalidParameter("alpha must be in (1/2, 1)");
}

/// rho = int w_t (x w_x - alpha w) + w_xt ((1 - alpha) w_x + x w_xx) dx, five-point Gauss per element.
inline double rho(const BeamMesh& mesh, const BeamState& s, double alpha) {
  mesh.check_dim(s.w, "rho: w");
  mesh.check_dim(s.v, "rho: v");
  check_alpha(alpha);
  static const GaussRule rule = gauss_legendre_unit(5);
  double sum = 0.0;
  for (int e = 0; e < mesh.n_elements; ++e) {
    for (int q = 0; q < rule.order(); ++q) {
      const double xi = rule.points[q];
      const double x = (e + xi) * mesh.h;
      const PointValue w = mesh.eval(s.w, e, xi);
      const PointValue v = mesh.eval(s.v, e, xi);
      sum += rule.weights[q] * mesh.h *
             (v.w * (x * w.wx - alpha * w.w) + v.wx * ((1.0 - alpha) * w.wx + x * w.wxx));
    }
  }
  return sum;
}

inline double lyapunov(double E, double rho_value, double lambda) {
  if (!(lambda > 0.0)) throw InvalidParameter("lyapunov: lambda must be > 0");
  return E + lambda * rho_value;
}

/// One row of a trajectory: functionals plus the traces the rate identities need.
struct FunctionalSample {
  double t = 0.0;
  double E = 0.0;
  double rho = 0.0;
  double V = 0.0;
  double dE_dt_lhs = std::numeric_limits<double>::quiet_NaN();
  double dE_dt_rhs = 0.0;
  double wt1 = 0.0;
  double wxt1 = 0.0;
  double U1 = 0.0;
  double U2 = 0.0;
  // Traces for the rho-rate check.
  double w1 = 0.0;
  double wx1 = 0.0;
  double wxx1_interp = 0.0;
  double int_wt2 = 0.0;
  double int_wxt2 = 0.0;
  double int_wxx2 = 0.0;
};

/// u is the control held over the step that starts at s.t.
inline FunctionalSample sample_functionals(const BeamMesh& mesh, const BeamState& s,
                                           const ControlInput& u, double alpha, double lambda) {
  FunctionalSample f;
  f.t = s.t;
  f.E = energy(mesh, s);
  f.rho = rho(mesh, s, alpha);
  f.V = lyapunov(f.E, f.rho, lambda);
  f.wt1 = mesh.w1(s.v);
  f.wxt1 = mesh.wx1(s.v);
  f.U1 = u.U1;
  f.U2 = u.U2;
  // -K1 w_xt(1,t) w_xt(1,t_k) - K2 w_t(1,t) w_t(1,t_k)
  f.dE_dt_rhs = u.U1 * f.wxt1 + u.U2 * f.wt1;
  f.w1 = mesh.w1(s.w);
  f.wx1 = mesh.wx1(s.w);
  f.wxx1_interp = mesh.eval(s.w, mesh.n_elements - 1, 1.0).wxx;
  f.int_wt2 = s.v.dot(mesh.M0 * s.v);
  f.int_wxt2 = s.v.dot(mesh.A * s.v);
  f.int_wxx2 = s.w.dot(mesh.K * s.w);
  return f;
}

/// Right side of the rho-rate identity written with the held controls
/// (U1 = -K1 w_xt(1,t_k), U2 = -K2 w_t(1,t_k)). `wxx1` is the boundary curvature to use:
/// U1 under the boundary condition, or the interpolant's endpoint value.
inline double rho_rate_rhs(const FunctionalSample& f, double alpha, double wxx1) {
  return 0.5 * f.wt1 * f.wt1 - (0.5 + alpha) * f.int_wt2 - (alpha - 0.5) * f.int_wxt2 +
         0.5 * f.wxt1 * f.wxt1 - (1.5 - alpha) * f.int_wxx2 - 0.5 * wxx1 * wxx1 +
         f.U2 * f.wx1 - alpha * f.U2 * f.w1 + f.U1 * ((1.0 - alpha) * f.wx1 + wxx1);
}

struct IdentityReport {
  double max_residual = 0.0;
  double max_residual_alt = 0.0;  // rho check only: interpolant curvature at x = 1
  double max_bc_discrepancy = 0.0;  // rho check only: max |w_xx^h(1) - U1|
  double dt = 0.0;
  std::size_t checked = 0;
  std::vector<double> lhs;  // centered differences, NaN where not evaluated
};

namespace detail {

inline std::vector<bool> excluded_mask(std::size_t n, std::span<const std::size_t> breaks) {
  std::vector<bool> mask(n, false);
  if (n > 0) mask.front() = mask.back() = true;
  for (auto b : breaks)
    if (b < n) mask[b] = true;
  return mask;
}

inline double uniform_spacing(std::span<const FunctionalSample> s) {
  if (s.size() < 3) throw InvalidParameter("identity check needs at least 3 samples");
  const double dt = s[1].t - s[0].t;
  if (!(dt > 0.0)) throw InvalidParameter("identity check: samples must increase in time");
  return dt;
}

}  // namespace detail

/// Max over interior samples of |(E(t+dt) - E(t-dt)) / (2 dt) - RHS(t)|.
///
/// Samples listed in `breaks` are skipped: the held control jumps there, so
/// dE/dt has a jump and the centered difference straddles it.
inline IdentityReport energy_rate_identity(std::span<const FunctionalSample> s,
                                           std::span<const std::size_t> breaks = {}) {
  IdentityReport r;
  r.dt = detail::uniform_spacing(s);
  const auto mask = detail::excluded_mask(s.size(), breaks);
  r.lhs.assign(s.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    r.lhs[i] = (s[i + 1].E - s[i - 1].E) / (2.0 * r.dt);
    if (mask[i]) continue;
    r.max_residual = std::max(r.max_residual, std::abs(r.lhs[i] - s[i].dE_dt_rhs));
    ++r.checked;
  }
  return r;
}

/// Same for rho, against the rate identity with w_xx(1,t) = U1 (boundary condition).
/// `max_residual_alt` uses the interpolant's endpoint curvature instead.
inline IdentityReport rho_rate_check(std::span<const FunctionalSample> s, double alpha,
                                     std::span<const std::size_t> breaks = {}) {
  check_alpha(alpha);
  IdentityReport r;
  r.dt = detail::uniform_spacing(s);
  const auto mask = detail::excluded_mask(s.size(), breaks);
  r.lhs.assign(s.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < s.size(); ++i)
    r.max_bc_discrepancy = std::max(r.max_bc_discrepancy, std::abs(s[i].wxx1_interp - s[i].U1));
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    r.lhs[i] = (s[i + 1].rho - s[i - 1].rho) / (2.0 * r.dt);
    if (mask[i]) continue;
    r.max_residual = std::max(r.max_residual, std::abs(r.lhs[i] - rho_rate_rhs(s[i], alpha, s[i].U1)));
    r.max_residual_alt =
        std::max(r.max_residual_alt, std::abs(r.lhs[i] - rho_rate_rhs(s[i], alpha, s[i].wxx1_interp)));
    ++r.checked;
  }
  return r;
}

struct BoundViolations {
  std::size_t sandwich = 0;    // (1 - 3 lambda) E <= V <= (1 + 3 lambda) E
  std::size_t multiplier = 0;  // |rho| <= 3 E
  std::size_t negative_energy = 0;
};

inline BoundViolations check_bounds(std::span<const FunctionalSample> s, double lambda,
                                    double slack = 1e-10) {
  BoundViolations b;
  for (const auto& f : s) {
    if (f.E < -slack) ++b.negative_energy;
    if (std::abs(f.rho) > 3.0 * f.E + slack) ++b.multiplier;
    if (f.V < (1.0 - 3.0 * lambda) * f.E - slack || f.V > (1.0 + 3.0 * lambda) * f.E + slack)
      ++b.sandwich;
  }
  return b;
}

}  // namespace rbeam
