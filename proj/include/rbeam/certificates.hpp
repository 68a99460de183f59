#pragma once

// Exponential-stability certificate for the event-triggered closed loop.
//
// Given gains (K1, K2), the multiplier weight alpha and tuning parameters
// (lambda, mu, beta, beta0, theta), the closed loop satisfies
//
//     E(t) <= G exp(-delta t) E(0)
//
// provided lambda < lambda*, mu > mu_min, beta < lambda C / (2 mu), theta > delta / 2
// and the 2x2 matrices D1, D2 are negative definite.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "rbeam/error.hpp"

namespace rbeam {

/// Strict inequalities a < b are accepted only when a < b - kStrictTol.
inline constexpr double kStrictTol = 1e-12;

enum class EpsilonVariant { theorem_statement, proof_formula };

inline const char* to_string(EpsilonVariant v) {
  return v == EpsilonVariant::theorem_statement ? "theorem_statement" : "proof_formula";
}

struct CertificateInputs {
  double K1 = 0.2;
  double K2 = 0.1;
  double alpha = 0.75;
  double lambda = 0.1;
  double mu = 0.08;
  double beta = 0.01;
  double beta0 = 0.005;
  double theta = 0.2;
  EpsilonVariant epsilon_variant = EpsilonVariant::theorem_statement;

  void validate() const {
    if (!(K1 > 0.0) || !(K2 > 0.0)) throw InvalidParameter("certificate: K1, K2 must be > 0");
    if (!(alpha > 0.5 && alpha < 1.0)) throw InvalidParameter("certificate: alpha must be in (1/2, 1)");
    if (!(lambda > 0.0)) throw InvalidParameter("certificate: lambda must be > 0");
    if (!(mu > 0.0)) throw InvalidParameter("certificate: mu must be > 0");
    if (!(beta >= 0.0)) throw InvalidParameter("certificate: beta must be >= 0");
    if (!(beta0 > 0.0)) throw InvalidParameter("certificate: beta0 must be > 0");
    if (!(theta > 0.0)) throw InvalidParameter("certificate: theta must be > 0");
  }
};

struct Envelope {
  double delta = 0.0;
  double delta_hat = 0.0;
  double G = 0.0;
};

struct DMatrices {
  Eigen::Matrix2d D1;
  Eigen::Matrix2d D2;
  bool D1_negative_definite = false;
  bool D2_negative_definite = false;

  bool both_negative_definite() const { return D1_negative_definite && D2_negative_definite; }
};

struct Certificate {
  CertificateInputs inputs;
  double epsilon = 0.0;
  double lambda_star = 0.0;
  double C = 0.0;
  double mu_min = std::numeric_limits<double>::quiet_NaN();
  double delta = std::numeric_limits<double>::quiet_NaN();
  double delta_hat = std::numeric_limits<double>::quiet_NaN();
  double G = std::numeric_limits<double>::quiet_NaN();
  DMatrices D;
  bool valid = false;
  std::vector<std::string> violations;
};

inline double derive_epsilon(double K1, double K2, double alpha, EpsilonVariant variant) {
  if (!(K1 > 0.0) || !(K2 > 0.0)) throw InvalidParameter("derive_epsilon: K1, K2 must be > 0");
  if (!(alpha > 0.5 && alpha < 1.0)) throw InvalidParameter("derive_epsilon: alpha must be in (1/2, 1)");
  if (variant == EpsilonVariant::theorem_statement)
    return (2.0 * K2 * (1.0 + alpha) + 2.0 * K1 * (1.0 - alpha)) / (3.0 - 2.0 * alpha);
  const double om = 1.0 - alpha;
  return (2.0 * K2 * K2 * (1.0 + alpha * alpha) + 2.0 * K1 * K1 * om * om) / (3.0 - 2.0 * alpha);
}

/// lambda* = min{2 K2 / (2 eps + 1), K1 / sqrt(2 K1^2 + eps), 1/3}.
inline double derive_lambda_star(double K1, double K2, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidParameter("derive_lambda_star: epsilon must be > 0");
  return std::min({2.0 * K2 / (2.0 * epsilon + 1.0), K1 / std::sqrt(2.0 * K1 * K1 + epsilon),
                   1.0 / 3.0});
}

/// C = min{2 alpha - 1, (3 - 2 alpha) / 4}.
inline double derive_C(double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0)) throw InvalidParameter("derive_C: alpha must be in (1/2, 1)");
  return std::min(2.0 * alpha - 1.0, (3.0 - 2.0 * alpha) / 4.0);
}

/// Lower bound on mu from the D1/D2 determinant conditions and mu > lambda / 2.
///
/// Throws when lambda is outside (0, lambda*) or when either denominator is not
/// positive; the message names the offending branch.
inline double derive_mu_min(double K1, double K2, double epsilon, double lambda) {
  if (!(lambda > 0.0)) throw InvalidParameter("derive_mu_min: lambda must be > 0");
  const double lstar = derive_lambda_star(K1, K2, epsilon);
  if (!(lambda < lstar - kStrictTol))
    throw InvalidParameter("derive_mu_min: lambda must be < lambda* = " + std::to_string(lstar));
  const double den1 = 4.0 * K2 - 2.0 * lambda - 4.0 * lambda * epsilon;
  const double den2 = 4.0 * K1 - 2.0 * lambda - 2.0 * lambda * epsilon - 4.0 * lambda * K1 * K1;
  if (!(den1 > kStrictTol))
    throw InvalidParameter("derive_mu_min: nonpositive denominator in the K2 (D1) branch");
  if (!(den2 > kStrictTol))
    throw InvalidParameter("derive_mu_min: nonpositive denominator in the K1 (D2) branch");
  const double l2 = lambda * lambda;
  const double b1 = (K2 * K2 - 2.0 * epsilon * l2) / den1;
  const double b2 = (K1 * K1 - l2 * epsilon - 2.0 * l2 * K1 * K1) / den2;
  return std::max({b1, b2, lambda / 2.0});
}

namespace detail {
/// Trace/determinant test for a symmetric 2x2 matrix.
inline bool negative_definite_2x2(const Eigen::Matrix2d& m) {
  return m.trace() < 0.0 && m.determinant() > 0.0;
}
}  // namespace detail

inline DMatrices check_D_matrices(double K1, double K2, double epsilon, double lambda, double mu) {
  DMatrices d;
  const double corner = lambda / 2.0 - mu;
  d.D1 << corner, mu - K2 / 2.0, mu - K2 / 2.0, lambda * epsilon - mu;
  d.D2 << corner, mu - K1 / 2.0, mu - K1 / 2.0, lambda * epsilon / 2.0 + lambda * K1 * K1 - mu;
  d.D1_negative_definite = detail::negative_definite_2x2(d.D1);
  d.D2_negative_definite = detail::negative_definite_2x2(d.D2);
  return d;
}

/// delta = (lambda C - 2 mu beta) / (1 - 3 lambda), delta_hat = 2 mu beta0 / (1 - 3 lambda),
/// G = (1 + 3 lambda) / (1 - 3 lambda) (1 + delta_hat / (2 theta - delta)).
inline Envelope derive_envelope(double C, double lambda, double mu, double beta, double beta0,
                                double theta) {
  if (!(lambda > 0.0 && lambda < 1.0 / 3.0 - kStrictTol))
    throw InvalidParameter("derive_envelope: lambda must be in (0, 1/3)");
  if (!(mu > 0.0)) throw InvalidParameter("derive_envelope: mu must be > 0");
  if (!(beta >= 0.0 && beta < lambda * C / (2.0 * mu) - kStrictTol))
    throw InvalidParameter("derive_envelope: beta must be in [0, lambda C / (2 mu))");
  if (!(beta0 > 0.0)) throw InvalidParameter("derive_envelope: beta0 must be > 0");
  const double s = 1.0 - 3.0 * lambda;
  Envelope env;
  env.delta = (lambda * C - 2.0 * mu * beta) / s;
  env.delta_hat = 2.0 * mu * beta0 / s;
  if (!(theta > env.delta / 2.0 + kStrictTol))
    throw InvalidParameter("derive_envelope: theta must exceed delta / 2");
  env.G = (1.0 + 3.0 * lambda) / s * (1.0 + env.delta_hat / (2.0 * theta - env.delta));
  return env;
}

/// Evaluates every condition and lists failures in `violations`. Only malformed inputs
/// (alpha outside (1/2, 1), nonpositive gains) throw.
inline Certificate certify(const CertificateInputs& in) {
  in.validate();
  Certificate c;
  c.inputs = in;
  auto fail = [&c](std::string msg) { c.violations.push_back(std::move(msg)); };

  c.epsilon = derive_epsilon(in.K1, in.K2, in.alpha, in.epsilon_variant);
  c.lambda_star = derive_lambda_star(in.K1, in.K2, c.epsilon);
  c.C = derive_C(in.alpha);

  if (!(in.lambda < c.lambda_star - kStrictTol))
    fail("lambda >= lambda* (" + std::to_string(in.lambda) + " >= " + std::to_string(c.lambda_star) + ")");
  if (!(in.lambda < 1.0 / 3.0 - kStrictTol)) fail("lambda >= 1/3");

  try {
    c.mu_min = derive_mu_min(in.K1, in.K2, c.epsilon, in.lambda);
    if (!(in.mu > c.mu_min + kStrictTol))
      fail("mu <= mu_min (" + std::to_string(in.mu) + " <= " + std::to_string(c.mu_min) + ")");
  } catch (const InvalidParameter& e) {
    if (in.lambda < c.lambda_star - kStrictTol) fail(e.what());
  }

  c.D = check_D_matrices(in.K1, in.K2, c.epsilon, in.lambda, in.mu);
  if (!c.D.D1_negative_definite) fail("D1 not negative definite");
  if (!c.D.D2_negative_definite) fail("D2 not negative definite");

  const double beta_max = in.lambda * c.C / (2.0 * in.mu);
  if (!(in.beta < beta_max - kStrictTol))
    fail("beta >= lambda C / (2 mu) (" + std::to_string(in.beta) + " >= " + std::to_string(beta_max) + ")");

  const double s = 1.0 - 3.0 * in.lambda;
  if (s > 0.0) {
    c.delta = (in.lambda * c.C - 2.0 * in.mu * in.beta) / s;
    c.delta_hat = 2.0 * in.mu * in.beta0 / s;
    if (!(c.delta > kStrictTol)) fail("delta <= 0");
    if (!(in.theta > c.delta / 2.0 + kStrictTol)) {
      fail("theta <= delta / 2");
    } else {
      c.G = (1.0 + 3.0 * in.lambda) / s * (1.0 + c.delta_hat / (2.0 * in.theta - c.delta));
      if (!(c.G > 1.0)) fail("G <= 1");
    }
  }

  c.valid = c.violations.empty();
  return c;
}

struct SearchGrid {
  int alpha_points = 16;
  int lambda_points = 16;
  int mu_points = 16;
  int beta_points = 16;
};

struct SearchResult {
  std::optional<Certificate> certificate;  // empty when infeasible
  double best_delta = 0.0;                  // largest delta among valid grid points
  std::optional<Certificate> best_delta_certificate;
  long evaluated = 0;
  long valid_points = 0;
  std::map<std::string, long> binding_constraints;  // first violation -> count
};

/// Grid search in the design order alpha -> lambda -> mu -> beta.
///
/// Returns the valid grid point with delta >= target_delta and the smallest G
/// (ties broken lexicographically on (G, lambda, mu)).
inline SearchResult search_for_rate(double K1, double K2, double target_delta, double beta0,
                                    double theta, EpsilonVariant variant = EpsilonVariant::theorem_statement,
                                    const SearchGrid& grid = {}) {
  if (!(target_delta > 0.0)) throw InvalidParameter("search_for_rate: target_delta must be > 0");
  if (!(K1 > 0.0) || !(K2 > 0.0)) throw InvalidParameter("search_for_rate: K1, K2 must be > 0");
  if (!(beta0 > 0.0) || !(theta > 0.0))
    throw InvalidParameter("search_for_rate: beta0 and theta must be > 0");

  SearchResult res;
  auto key = [](const Certificate& c) { return std::make_tuple(c.G, c.inputs.lambda, c.inputs.mu); };

  for (int ia = 1; ia <= grid.alpha_points; ++ia) {
    const double alpha = 0.5 + 0.5 * ia / (grid.alpha_points + 1.0);
    const double eps = derive_epsilon(K1, K2, alpha, variant);
    const double lstar = derive_lambda_star(K1, K2, eps);
    const double C = derive_C(alpha);
    for (int il = 1; il <= grid.lambda_points; ++il) {
      const double lambda = lstar * il / (grid.lambda_points + 1.0);
      double mu_min = 0.0;
      try {
        mu_min = derive_mu_min(K1, K2, eps, lambda);
      } catch (const InvalidParameter& e) {
        ++res.binding_constraints[e.what()];
        continue;
      }
      for (int im = 1; im <= grid.mu_points; ++im) {
        const double mu = mu_min * (1.0 + 9.0 * im / grid.mu_points);
        const double beta_max = lambda * C / (2.0 * mu);
        for (int ib = 0; ib < grid.beta_points; ++ib) {
          CertificateInputs in{K1, K2, alpha, lambda, mu, beta_max * ib / grid.beta_points, beta0,
                               theta, variant};
          Certificate c = certify(in);
          ++res.evaluated;
          if (!c.valid) {
            const std::string& v = c.violations.front();
            ++res.binding_constraints[v.substr(0, v.find(" ("))];
            continue;
          }
          ++res.valid_points;
          if (!res.best_delta_certificate || c.delta > res.best_delta) {
            res.best_delta = c.delta;
            res.best_delta_certificate = c;
          }
          if (c.delta < target_delta) {
            ++res.binding_constraints["delta < target_delta"];
            continue;
          }
          if (!res.certificate || key(c) < key(*res.certificate)) res.certificate = c;
        }
      }
    }
  }
  return res;
}

}  // namespace rbeam
