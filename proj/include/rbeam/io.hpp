#pragma once

// JSON scenario/certificate files and CSV outputs.

#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "rbeam/certificates.hpp"
#include "rbeam/error.hpp"
#include "rbeam/runner.hpp"
#include "rbeam/triggering.hpp"

namespace rbeam::io {

using nlohmann::json;

namespace detail {

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                                const std::string& where) {
  if (!j.is_object()) throw InvalidParameter(where + ": expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw InvalidParameter(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidParameter(where + ": bad value for '" + key + "': " + e.what());
  }
}

inline EpsilonVariant parse_variant(const std::string& s) {
  if (s == "theorem_statement") return EpsilonVariant::theorem_statement;
  if (s == "proof_formula") return EpsilonVariant::proof_formula;
  throw InvalidParameter("unknown epsilon_variant '" + s + "'");
}

inline Mode parse_mode(const std::string& s) {
  if (s == "event_triggered") return Mode::event_triggered;
  if (s == "continuous") return Mode::continuous;
  if (s == "uncontrolled") return Mode::uncontrolled;
  throw InvalidParameter("unknown mode '" + s + "'");
}

inline std::string fmt(double x) { return rbeam::detail::fmt_double(x); }

}  // namespace detail

/// Strict parse: every key optional, unknown keys rejected.
inline Scenario scenario_from_json(const json& j) {
  using namespace detail;
  static const std::set<std::string> keys{
      "K1", "K2", "beta", "beta0", "theta", "certificate", "ic", "T", "n_elements", "dt",
      "mode", "output_stride", "seed", "dump_field_stride", "alpha", "lambda"};
  reject_unknown_keys(j, keys, "scenario");
  Scenario s;
  const std::string w = "scenario";
  read(j, "K1", s.gains.K1, w);
  read(j, "K2", s.gains.K2, w);
  read(j, "beta", s.trigger.beta, w);
  read(j, "beta0", s.trigger.beta0, w);
  read(j, "theta", s.trigger.theta, w);
  read(j, "T", s.T, w);
  read(j, "n_elements", s.n_elements, w);
  read(j, "dt", s.dt, w);
  read(j, "output_stride", s.output_stride, w);
  read(j, "seed", s.seed, w);
  read(j, "dump_field_stride", s.dump_field_stride, w);
  read(j, "alpha", s.alpha, w);
  read(j, "lambda", s.lambda, w);
  if (j.contains("mode")) {
    std::string m;
    read(j, "mode", m, w);
    s.mode = parse_mode(m);
  }
  if (j.contains("certificate") && !j.at("certificate").is_null()) {
    const json& c = j.at("certificate");
    reject_unknown_keys(c, {"alpha", "lambda", "mu", "epsilon_variant"}, "scenario.certificate");
    CertificateSpec spec;
    read(c, "alpha", spec.alpha, "scenario.certificate");
    read(c, "lambda", spec.lambda, "scenario.certificate");
    read(c, "mu", spec.mu, "scenario.certificate");
    if (c.contains("epsilon_variant")) {
      std::string v;
      read(c, "epsilon_variant", v, "scenario.certificate");
      spec.epsilon_variant = parse_variant(v);
    }
    s.certificate = spec;
  }
  if (j.contains("ic")) {
    const json& ic = j.at("ic");
    if (ic.is_string()) {
      s.ic.preset = ic.get<std::string>();
    } else {
      reject_unknown_keys(ic, {"preset", "iota", "varsigma"}, "scenario.ic");
      read(ic, "preset", s.ic.preset, "scenario.ic");
      read(ic, "iota", s.ic.iota, "scenario.ic");
      read(ic, "varsigma", s.ic.varsigma, "scenario.ic");
      if ((ic.contains("iota") || ic.contains("varsigma")) && !ic.contains("preset"))
        s.ic.preset = "coefficients";
    }
    // Builds once so incompatible data is reported as an invalid scenario.
    (void)s.ic.build(s.seed);
  }
  s.validate();
  return s;
}

inline json to_json(const Scenario& s) {
  json j{{"K1", s.gains.K1},
         {"K2", s.gains.K2},
         {"beta", s.trigger.beta},
         {"beta0", s.trigger.beta0},
         {"theta", s.trigger.theta},
         {"T", s.T},
         {"n_elements", s.n_elements},
         {"dt", s.dt},
         {"mode", to_string(s.mode)},
         {"output_stride", s.output_stride},
         {"seed", s.seed},
         {"dump_field_stride", s.dump_field_stride},
         {"alpha", s.alpha},
         {"lambda", s.lambda}};
  json ic{{"preset", s.ic.preset}};
  if (s.ic.preset == "coefficients") {
    ic["iota"] = s.ic.iota;
    ic["varsigma"] = s.ic.varsigma;
  }
  j["ic"] = ic;
  if (s.certificate)
    j["certificate"] = {{"alpha", s.certificate->alpha},
                        {"lambda", s.certificate->lambda},
                        {"mu", s.certificate->mu},
                        {"epsilon_variant", to_string(s.certificate->epsilon_variant)}};
  else
    j["certificate"] = nullptr;
  return j;
}

inline CertificateInputs certificate_inputs_from_json(const json& j) {
  using namespace detail;
  reject_unknown_keys(j, {"K1", "K2", "alpha", "lambda", "mu", "beta", "beta0", "theta", "epsilon_variant"},
                      "certificate inputs");
  CertificateInputs in;
  const std::string w = "certificate inputs";
  read(j, "K1", in.K1, w);
  read(j, "K2", in.K2, w);
  read(j, "alpha", in.alpha, w);
  read(j, "lambda", in.lambda, w);
  read(j, "mu", in.mu, w);
  read(j, "beta", in.beta, w);
  read(j, "beta0", in.beta0, w);
  read(j, "theta", in.theta, w);
  if (j.contains("epsilon_variant")) {
    std::string v;
    read(j, "epsilon_variant", v, w);
    in.epsilon_variant = parse_variant(v);
  }
  return in;
}

inline json to_json(const CertificateInputs& in) {
  return {{"K1", in.K1},       {"K2", in.K2},       {"alpha", in.alpha},
          {"lambda", in.lambda}, {"mu", in.mu},     {"beta", in.beta},
          {"beta0", in.beta0}, {"theta", in.theta}, {"epsilon_variant", to_string(in.epsilon_variant)}};
}

inline json to_json(const Certificate& c) {
  using detail::number_or_null;
  auto mat = [](const Eigen::Matrix2d& m) {
    return json{{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
  };
  return {{"inputs", to_json(c.inputs)},
          {"epsilon", number_or_null(c.epsilon)},
          {"lambda_star", number_or_null(c.lambda_star)},
          {"C", number_or_null(c.C)},
          {"mu_min", number_or_null(c.mu_min)},
          {"delta", number_or_null(c.delta)},
          {"delta_hat", number_or_null(c.delta_hat)},
          {"G", number_or_null(c.G)},
          {"D1", mat(c.D.D1)},
          {"D2", mat(c.D.D2)},
          {"D1_negative_definite", c.D.D1_negative_definite},
          {"D2_negative_definite", c.D.D2_negative_definite},
          {"valid", c.valid},
          {"violations", c.violations}};
}

inline json to_json(const SearchResult& r, double target_delta) {
  json j{{"target_delta", target_delta},
         {"feasible", r.certificate.has_value()},
         {"best_delta", r.best_delta},
         {"evaluated", r.evaluated},
         {"valid_points", r.valid_points},
         {"binding_constraints", r.binding_constraints}};
  j["certificate"] = r.certificate ? to_json(*r.certificate) : json(nullptr);
  j["best_delta_certificate"] =
      r.best_delta_certificate ? to_json(*r.best_delta_certificate) : json(nullptr);
  return j;
}

inline json to_json(const RunSummary& s) {
  using detail::number_or_null;
  json j{{"E0", s.E0},
         {"E_final", s.E_final},
         {"decay_rate_fit", number_or_null(s.decay_rate_fit)},
         {"trigger_count", s.trigger_count},
         {"steps", s.steps},
         {"energy_identity_residual", s.energy_identity_residual},
         {"rho_identity_residual", s.rho_identity_residual},
         {"rho_identity_residual_interp", s.rho_identity_residual_interp},
         {"boundary_curvature_discrepancy", s.boundary_curvature_discrepancy},
         {"sandwich_violations", s.sandwich_violations},
         {"multiplier_violations", s.multiplier_violations},
         {"wall_time_s", s.wall_time_s}};
  j["min_inter_event_time"] = s.min_inter_event_time ? json(*s.min_inter_event_time) : json(nullptr);
  j["envelope_ok"] = s.envelope_ok ? json(*s.envelope_ok) : json(nullptr);
  if (s.first_envelope_violation)
    j["first_envelope_violation"] = {{"t", s.first_envelope_violation->t},
                                     {"E", s.first_envelope_violation->E},
                                     {"bound", s.first_envelope_violation->bound}};
  else
    j["first_envelope_violation"] = nullptr;
  return j;
}

inline json summary_json(const RunResult& r) {
  json j = to_json(r.summary);
  j["scenario"] = to_json(r.scenario);
  j["version"] = kVersion;
  j["certificate"] = r.certificate ? to_json(*r.certificate) : json(nullptr);
  return j;
}

inline json comparison_json(const Comparison& c) {
  return {{"first", summary_json(c.first)},
          {"second", summary_json(c.second)},
          {"update_ratio_first", c.update_ratio_first},
          {"update_ratio_second", c.update_ratio_second},
          {"count_ratio", c.count_ratio},
          {"max_energy_difference", c.max_energy_difference},
          {"version", kVersion}};
}

/// Columns: t, E, rho, V, wt1, wxt1, U1, U2, envelope_bound. Rows every `stride`
/// steps plus the final sample.
inline void write_trajectory_csv(std::ostream& os, const RunResult& r, int stride) {
  using detail::fmt;
  os << "t,E,rho,V,wt1,wxt1,U1,U2,envelope_bound\n";
  const std::size_t n = r.samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != n) continue;
    const auto& f = r.samples[i];
    os << fmt(f.t) << ',' << fmt(f.E) << ',' << fmt(f.rho) << ',' << fmt(f.V) << ','
       << fmt(f.wt1) << ',' << fmt(f.wxt1) << ',' << fmt(f.U1) << ',' << fmt(f.U2) << ',';
    if (auto b = r.envelope_bound(f.t)) os << fmt(*b);
    os << '\n';
  }
}

inline void write_field_csv(std::ostream& os, const std::vector<FieldRow>& rows) {
  using detail::fmt;
  os << "t,x,w\n";
  for (const auto& row : rows) os << fmt(row.t) << ',' << fmt(row.x) << ',' << fmt(row.w) << '\n';
}

inline void write_sweep_csv(std::ostream& os, const std::string& axis,
                            const std::vector<SweepRow>& rows) {
  using detail::fmt;
  os << axis
     << ",E0,E_final,relative_energy_change,decay_rate_fit,trigger_count,steps,"
        "min_inter_event_time,envelope_ok,energy_identity_residual,rho_identity_residual\n";
  for (const auto& row : rows) {
    const RunSummary& s = row.result.summary;
    os << fmt(row.value) << ',' << fmt(s.E0) << ',' << fmt(s.E_final) << ','
       << fmt((s.E_final - s.E0) / s.E0) << ',' << fmt(s.decay_rate_fit) << ',' << s.trigger_count
       << ',' << s.steps << ',';
    if (s.min_inter_event_time) os << fmt(*s.min_inter_event_time);
    os << ',';
    if (s.envelope_ok) os << (*s.envelope_ok ? "true" : "false");
    os << ',' << fmt(s.energy_identity_residual) << ',' << fmt(s.rho_identity_residual) << '\n';
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidParameter("'" + path + "': " + e.what());
  }
}

}  // namespace rbeam::io
