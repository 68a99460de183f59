#pragma once

// Time integration of (M0 + A) w'' + K w = f(t) with Newmark average acceleration.

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>

#include "rbeam/error.hpp"
#include "rbeam/mesh.hpp"

namespace rbeam {

struct BeamState {
  double t = 0.0;
  Vector w;
  Vector v;
  Vector a;

  static BeamState zero(const BeamMesh& mesh, double t = 0.0) {
    const auto n = mesh.dim();
    return {t, Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
  }

  bool finite() const { return w.allFinite() && v.allFinite() && a.allFinite(); }
};

/// Boundary controls at x = 1: U1 prescribes w_xx(1), U2 the shear-type balance.
struct ControlInput {
  double U1 = 0.0;
  double U2 = 0.0;

  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

enum class Scheme { newmark_average_acceleration };

struct IntegratorConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::newmark_average_acceleration;
  double linear_solver_tol = 0.0;  // 0 selects the direct Cholesky solve
};

/// f = U1 sel_wx1 + U2 sel_w1.
inline Vector control_force(const BeamMesh& mesh, const ControlInput& u) {
  return u.U1 * mesh.sel_wx1 + u.U2 * mesh.sel_w1;
}

class NewmarkIntegrator {
 public:
  static constexpr double kGamma = 0.5;
  static constexpr double kBeta = 0.25;

  NewmarkIntegrator(const BeamMesh& mesh, IntegratorConfig cfg) : mesh_(&mesh) {
    mass_ = mesh.M0 + mesh.A;
    mass_llt_.compute(mass_);
    if (mass_llt_.info() != Eigen::Success)
      throw NumericalFailure("NewmarkIntegrator: M0 + A is not positive definite");
    set_config(cfg);
  }

  const BeamMesh& mesh() const { return *mesh_; }
  const IntegratorConfig& config() const { return cfg_; }
  double dt() const { return cfg_.dt; }

  /// Refactorizes the effective matrix only when dt changes.
  void set_config(IntegratorConfig cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
      throw InvalidParameter("IntegratorConfig: dt must be > 0");
    if (cfg.linear_solver_tol < 0.0)
      throw InvalidParameter("IntegratorConfig: linear_solver_tol must be >= 0");
    const bool refactor = !factored_ || cfg.dt != cfg_.dt;
    cfg_ = cfg;
    if (!refactor) return;
    effective_ = mass_ + (kBeta * cfg_.dt * cfg_.dt) * mesh_->K;
    effective_llt_.compute(effective_);
    if (effective_llt_.info() != Eigen::Success)
      throw NumericalFailure("NewmarkIntegrator: effective matrix is singular");
    factored_ = true;
  }

  /// a = (M0 + A)^{-1} (f(u) - K w).
  Vector consistent_acceleration(const Vector& w, const ControlInput& u) const {
    mesh_->check_dim(w, "consistent_acceleration");
    return mass_llt_.solve(control_force(*mesh_, u) - mesh_->K * w);
  }

  /// Advances one step with u held constant over [t, t + dt].
  BeamState step(const BeamState& s, const ControlInput& u) const {
    mesh_->check_dim(s.w, "step: w");
    mesh_->check_dim(s.v, "step: v");
    mesh_->check_dim(s.a, "step: a");
    const double dt = cfg_.dt;
    const Vector predictor = s.w + dt * s.v + (kBeta * dt * dt) * s.a;
    const Vector rhs = control_force(*mesh_, u) - mesh_->K * predictor;

    BeamState next;
    next.t = s.t + dt;
    next.a = solve_effective(rhs);
    next.w = predictor + (kBeta * dt * dt) * next.a;
    next.v = s.v + (kGamma * dt) * (s.a + next.a);
    if (!next.finite()) throw NumericalFailure("step: non-finite state");
    return next;
  }

  /// Integrates backwards by one step (the scheme is time-symmetric).
  BeamState step_back(const BeamState& s, const ControlInput& u) const {
    BeamState flipped = s;
    flipped.v = -s.v;
    BeamState prev = step(flipped, u);
    prev.v = -prev.v;
    prev.t = s.t - cfg_.dt;
    return prev;
  }

 private:
  Vector solve_effective(const Vector& rhs) const {
    if (cfg_.linear_solver_tol == 0.0) return effective_llt_.solve(rhs);
    Eigen::ConjugateGradient<Matrix, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(cfg_.linear_solver_tol);
    cg.compute(effective_);
    Vector x = cg.solve(rhs);
    if (cg.info() != Eigen::Success) throw NumericalFailure("step: iterative solve did not converge");
    return x;
  }

  const BeamMesh* mesh_;
  IntegratorConfig cfg_{};
  bool factored_ = false;
  Matrix mass_;
  Matrix effective_;
  Eigen::LLT<Matrix> mass_llt_;
  Eigen::LLT<Matrix> effective_llt_;
};

inline Vector consistent_acceleration(const BeamMesh& mesh, const Vector& w, const Vector& v,
                                      const ControlInput& u) {
  mesh.check_dim(v, "consistent_acceleration: v");
  return NewmarkIntegrator(mesh, {}).consistent_acceleration(w, u);
}

/// One-off step; factorizes on every call. Use NewmarkIntegrator in loops.
inline BeamState step(const BeamMesh& mesh, const BeamState& state, const ControlInput& u,
                      const IntegratorConfig& cfg) {
  return NewmarkIntegrator(mesh, cfg).step(state, u);
}

}  // namespace rbeam
