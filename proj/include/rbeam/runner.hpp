#pragma once

// Closed-loop experiments: event-triggered, continuous and uncontrolled runs.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "rbeam/certificates.hpp"
#include "rbeam/dynamics.hpp"
#include "rbeam/error.hpp"
#include "rbeam/functionals.hpp"
#include "rbeam/mesh.hpp"
#include "rbeam/triggering.hpp"

namespace rbeam {

inline constexpr const char* kVersion = "0.1.0";

/// Relative slack applied to the certified bound when computing envelope_ok.
inline constexpr double kEnvelopeSlack = 0.01;

enum class Mode { event_triggered, continuous, uncontrolled };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::event_triggered: return "event_triggered";
    case Mode::continuous: return "continuous";
    case Mode::uncontrolled: return "uncontrolled";
  }
  return "?";
}

/// Either a named preset or power-series coefficients for iota and varsigma.
struct InitialConditionSpec {
  std::string preset = "reference";  // reference | zero | random | coefficients
  std::vector<double> iota;
  std::vector<double> varsigma;

  InitialCondition build(std::uint64_t seed) const {
    if (preset == "reference") return InitialCondition::reference();
    if (preset == "zero") return InitialCondition::zero();
    if (preset == "coefficients") return InitialCondition::polynomial(iota, varsigma);
    if (preset == "random") {
      // x^2..x^5 with uniform coefficients: clamp-compatible by construction.
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::vector<double> a(6, 0.0), b(6, 0.0);
      for (int j = 2; j < 6; ++j) a[j] = u(rng);
      for (int j = 2; j < 6; ++j) b[j] = u(rng);
      return InitialCondition::polynomial(a, b);
    }
    throw InvalidParameter("unknown initial-condition preset '" + preset + "'");
  }
};

/// Multiplier parameters for an attached certificate; gains and trigger
/// parameters come from the scenario itself.
struct CertificateSpec {
  double alpha = 0.75;
  double lambda = 0.1;
  double mu = 0.08;
  EpsilonVariant epsilon_variant = EpsilonVariant::theorem_statement;
};

struct Scenario {
  ControllerGains gains{0.2, 0.1};
  TriggerParams trigger{0.01, 0.005, 0.2, 0.0};
  std::optional<CertificateSpec> certificate;
  InitialConditionSpec ic;
  double T = 2.0;
  int n_elements = 32;
  double dt = 1e-3;
  Mode mode = Mode::event_triggered;
  int output_stride = 10;
  std::uint64_t seed = 0;
  int dump_field_stride = 0;  // 0 disables the (t, x, w) field output
  // Used for rho and V when no certificate is attached.
  double alpha = 0.75;
  double lambda = 0.1;

  long steps() const { return std::lround(T / dt); }

  void validate() const {
    if (!(T > 0.0)) throw InvalidParameter("scenario: T must be > 0");
    if (!(dt > 0.0)) throw InvalidParameter("scenario: dt must be > 0");
    const long n = steps();
    if (n < 1 || std::abs(n * dt - T) > 1e-9 * T)
      throw InvalidParameter("scenario: dt must divide T");
    if (output_stride < 1) throw InvalidParameter("scenario: output_stride must be >= 1");
    if (dump_field_stride < 0) throw InvalidParameter("scenario: dump_field_stride must be >= 0");
    if (n_elements < 2) throw InvalidParameter("scenario: n_elements must be >= 2");
    if (mode != Mode::uncontrolled) gains.validate();
    TriggerParams tp = trigger;
    tp.E0 = 0.0;
    tp.validate();
    check_alpha(multiplier_alpha());
    if (!(multiplier_lambda() > 0.0)) throw InvalidParameter("scenario: lambda must be > 0");
  }

  double multiplier_alpha() const { return certificate ? certificate->alpha : alpha; }
  double multiplier_lambda() const { return certificate ? certificate->lambda : lambda; }

  std::optional<CertificateInputs> certificate_inputs() const {
    if (!certificate) return std::nullopt;
    return CertificateInputs{gains.K1,         gains.K2,           certificate->alpha,
                             certificate->lambda, certificate->mu, trigger.beta,
                             trigger.beta0,    trigger.theta,      certificate->epsilon_variant};
  }
};

/// The standard closed-loop experiment with the certificate of the worked example attached.
inline Scenario reference_scenario() {
  Scenario s;
  s.certificate = CertificateSpec{};
  return s;
}

class CertificateInvalid : public std::runtime_error {
 public:
  explicit CertificateInvalid(Certificate c)
      : std::runtime_error("attached certificate is invalid"), certificate(std::move(c)) {}
  Certificate certificate;
};

struct EnvelopeViolation {
  double t = 0.0;
  double E = 0.0;
  double bound = 0.0;
};

struct RunSummary {
  double E0 = 0.0;
  double E_final = 0.0;
  double decay_rate_fit = 0.0;  // -(slope of log E over [T/4, T])
  long trigger_count = 0;
  long steps = 0;
  std::optional<double> min_inter_event_time;
  std::optional<bool> envelope_ok;
  std::optional<EnvelopeViolation> first_envelope_violation;
  double energy_identity_residual = 0.0;
  double rho_identity_residual = 0.0;
  double rho_identity_residual_interp = 0.0;
  double boundary_curvature_discrepancy = 0.0;
  std::size_t sandwich_violations = 0;
  std::size_t multiplier_violations = 0;
  double wall_time_s = 0.0;
};

struct FieldRow {
  double t;
  double x;
  double w;
};

struct RunResult {
  Scenario scenario;
  std::optional<Certificate> certificate;
  std::vector<FunctionalSample> samples;   // every step, t = 0 .. T
  std::vector<TriggerEvent> events;
  std::vector<std::size_t> event_steps;    // step index of each event
  std::vector<FieldRow> field;
  RunSummary summary;

  /// E0 G exp(-delta t) when a valid certificate is attached.
  std::optional<double> envelope_bound(double t) const {
    if (!certificate || !certificate->valid) return std::nullopt;
    return certificate->G * std::exp(-certificate->delta * t) * summary.E0;
  }
};

/// Least-squares slope of log E against t over samples with t in [t0, t1].
inline double fit_log_slope(std::span<const FunctionalSample> s, double t0, double t1) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& f : s) {
    if (f.t < t0 - 1e-12 || f.t > t1 + 1e-12 || !(f.E > 0.0)) continue;
    const double y = std::log(f.E);
    n += 1;
    sx += f.t;
    sy += y;
    sxx += f.t * f.t;
    sxy += f.t * y;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace detail {

inline void summarize(RunResult& r) {
  RunSummary& sum = r.summary;
  const auto& s = r.samples;
  sum.E_final = s.back().E;
  sum.steps = static_cast<long>(s.size()) - 1;
  sum.trigger_count = static_cast<long>(r.events.size());
  sum.min_inter_event_time = min_inter_event_time(std::span<const TriggerEvent>(r.events));
  sum.decay_rate_fit = -fit_log_slope(s, r.scenario.T / 4.0, r.scenario.T);

  if (r.certificate) {
    sum.envelope_ok = true;
    for (const auto& f : s) {
      const double bound = *r.envelope_bound(f.t);
      if (f.E > (1.0 + kEnvelopeSlack) * bound) {
        sum.envelope_ok = false;
        sum.first_envelope_violation = EnvelopeViolation{f.t, f.E, bound};
        break;
      }
    }
  }

  // Control is a sampled continuous feedback in continuous mode (jumps are O(dt));
  // in event mode every trigger is an O(1) jump in the held control.
  std::vector<std::size_t> breaks;
  if (r.scenario.mode == Mode::event_triggered) breaks = r.event_steps;
  if (s.size() >= 3) {
    const IdentityReport er = energy_rate_identity(s, breaks);
    const IdentityReport rr = rho_rate_check(s, r.scenario.multiplier_alpha(), breaks);
    sum.energy_identity_residual = er.max_residual;
    sum.rho_identity_residual = rr.max_residual;
    sum.rho_identity_residual_interp = rr.max_residual_alt;
    sum.boundary_curvature_discrepancy = rr.max_bc_discrepancy;
    for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i].dE_dt_lhs = er.lhs[i];
  }
  const BoundViolations bv = check_bounds(s, r.scenario.multiplier_lambda());
  sum.sandwich_violations = bv.sandwich;
  sum.multiplier_violations = bv.multiplier;
}

inline void dump_field(const BeamMesh& mesh, const BeamState& st, std::vector<FieldRow>& out) {
  constexpr int kGrid = 64;
  for (int j = 0; j < kGrid; ++j) {
    const double x = static_cast<double>(j) / (kGrid - 1);
    out.push_back({st.t, x, mesh.eval_at(st.w, x).w});
  }
}

}  // namespace detail

/// Runs one closed-loop simulation.
///
/// Triggering is checked on every accepted step; a detection at t_n resamples the
/// boundary velocities and the new control is held from the step starting at t_n.
inline RunResult run(const Scenario& sc) {
  sc.validate();
  const auto wall_start = std::chrono::steady_clock::now();

  RunResult r;
  r.scenario = sc;
  if (auto in = sc.certificate_inputs()) {
    r.certificate = certify(*in);
    if (!r.certificate->valid) throw CertificateInvalid(*r.certificate);
  }

  const BeamMesh mesh = build_mesh(sc.n_elements);
  const NewmarkIntegrator integ(mesh, IntegratorConfig{sc.dt});
  const double alpha = sc.multiplier_alpha();
  const double lambda = sc.multiplier_lambda();

  BeamState state = BeamState::zero(mesh);
  std::tie(state.w, state.v) = project_initial(mesh, sc.ic.build(sc.seed));

  TriggerParams tp = sc.trigger;
  tp.E0 = energy(mesh, state);
  r.summary.E0 = tp.E0;

  TriggerState ts;
  ts.record(0.0, mesh.w1(state.v), mesh.wx1(state.v), TriggerCause::initial);
  r.event_steps.push_back(0);
  auto control = [&]() -> ControlInput {
    return sc.mode == Mode::uncontrolled ? ControlInput{} : control_from_samples(sc.gains, ts);
  };
  ControlInput u = control();
  state.a = integ.consistent_acceleration(state.w, u);
  if (!state.finite()) throw NumericalFailure("non-finite initial state", 0);

  const long n_steps = sc.steps();
  r.samples.reserve(static_cast<std::size_t>(n_steps) + 1);
  r.samples.push_back(sample_functionals(mesh, state, u, alpha, lambda));
  if (sc.dump_field_stride > 0) detail::dump_field(mesh, state, r.field);

  for (long n = 1; n <= n_steps; ++n) {
    try {
      state = integ.step(state, u);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure("non-finite state", n);
    }
    state.t = n * sc.dt;
    const double wt1 = mesh.w1(state.v);
    const double wxt1 = mesh.wx1(state.v);

    bool resample = false;
    TriggerCause cause = TriggerCause::e;
    if (sc.mode == Mode::continuous) {
      resample = true;
      cause = dominant_cause(trigger_errors(ts, wt1, wxt1));
    } else if (sc.mode == Mode::event_triggered) {
      const double E = energy(mesh, state);
      if (should_trigger(ts, tp, state.t, E, wt1, wxt1)) {
        resample = true;
        cause = dominant_cause(trigger_errors(ts, wt1, wxt1));
      }
    }
    if (resample) {
      ts.record(state.t, wt1, wxt1, cause);
      r.event_steps.push_back(static_cast<std::size_t>(n));
      u = control();
      state.a = integ.consistent_acceleration(state.w, u);
    }
    r.samples.push_back(sample_functionals(mesh, state, u, alpha, lambda));
    if (!std::isfinite(r.samples.back().E)) throw NumericalFailure("non-finite energy", n);
    if (sc.dump_field_stride > 0 && n % sc.dump_field_stride == 0)
      detail::dump_field(mesh, state, r.field);
  }

  r.events = std::move(ts.events);
  detail::summarize(r);
  r.summary.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return r;
}

struct Comparison {
  RunResult first;
  RunResult second;
  double update_ratio_first = 0.0;   // trigger_count / steps
  double update_ratio_second = 0.0;
  double count_ratio = 0.0;          // first.trigger_count / second.trigger_count
  double max_energy_difference = 0.0;
};

inline Comparison compare(const Scenario& a, const Scenario& b) {
  Comparison c{run(a), run(b)};
  auto ratio = [](const RunResult& r) {
    return static_cast<double>(r.summary.trigger_count) / static_cast<double>(r.summary.steps);
  };
  c.update_ratio_first = ratio(c.first);
  c.update_ratio_second = ratio(c.second);
  c.count_ratio = static_cast<double>(c.first.summary.trigger_count) /
                  static_cast<double>(c.second.summary.trigger_count);
  const std::size_t n = std::min(c.first.samples.size(), c.second.samples.size());
  for (std::size_t i = 0; i < n; ++i)
    c.max_energy_difference =
        std::max(c.max_energy_difference, std::abs(c.first.samples[i].E - c.second.samples[i].E));
  return c;
}

/// Event-triggered versus continuous on the same discretization.
inline Comparison compare(const Scenario& sc) {
  Scenario ev = sc, co = sc;
  ev.mode = Mode::event_triggered;
  co.mode = Mode::continuous;
  return compare(ev, co);
}

inline const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes{"beta", "beta0", "theta", "K1", "K2", "n_elements", "dt"};
  return axes;
}

inline Scenario with_axis(Scenario sc, const std::string& axis, double value) {
  if (axis == "beta") sc.trigger.beta = value;
  else if (axis == "beta0") sc.trigger.beta0 = value;
  else if (axis == "theta") sc.trigger.theta = value;
  else if (axis == "K1") sc.gains.K1 = value;
  else if (axis == "K2") sc.gains.K2 = value;
  else if (axis == "n_elements") {
    if (value != std::round(value)) throw InvalidParameter("sweep: n_elements must be an integer");
    sc.n_elements = static_cast<int>(value);
  } else if (axis == "dt") sc.dt = value;
  else throw InvalidParameter("sweep: unknown axis '" + axis + "'");
  return sc;
}

struct SweepRow {
  double value;
  RunResult result;
};

/// One run per value, in the order given.
inline std::vector<SweepRow> sweep(const Scenario& base, const std::string& axis,
                                   const std::vector<double>& values) {
  std::vector<Scenario> scenarios;
  for (double v : values) scenarios.push_back(with_axis(base, axis, v));
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) rows.push_back({values[i], run(scenarios[i])});
  return rows;
}

}  // namespace rbeam
