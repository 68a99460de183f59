#pragma once

// Event-triggered sampling of the boundary velocities w_t(1, .) and w_xt(1, .).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rbeam/dynamics.hpp"
#include "rbeam/error.hpp"

namespace rbeam {

struct TriggerParams {
  double beta = 0.01;
  double beta0 = 0.005;
  double theta = 0.2;
  double E0 = 0.0;  // captured once at t = 0

  void validate() const {
    if (!(beta >= 0.0)) throw InvalidParameter("TriggerParams: beta must be >= 0");
    if (!(beta0 > 0.0)) throw InvalidParameter("TriggerParams: beta0 must be > 0");
    if (!(theta > 0.0)) throw InvalidParameter("TriggerParams: theta must be > 0");
    if (!(E0 >= 0.0)) throw InvalidParameter("TriggerParams: E0 must be >= 0");
  }

  /// beta E(t) + beta0 E(0) exp(-2 theta t)
  double threshold(double t, double E_t) const {
    return beta * E_t + beta0 * E0 * std::exp(-2.0 * theta * t);
  }
};

struct ControllerGains {
  double K1 = 0.2;
  double K2 = 0.1;

  void validate() const {
    if (!(K1 > 0.0) || !(K2 > 0.0)) throw InvalidParameter("ControllerGains: K1, K2 must be > 0");
  }
};

enum class TriggerCause { initial, e, e_hat };

inline const char* to_string(TriggerCause c) {
  switch (c) {
    case TriggerCause::initial: return "initial";
    case TriggerCause::e: return "e";
    case TriggerCause::e_hat: return "e_hat";
  }
  return "?";
}

struct TriggerEvent {
  int k = 0;
  double t = 0.0;
  double sampled_wt1 = 0.0;
  double sampled_wxt1 = 0.0;
  TriggerCause cause = TriggerCause::initial;
};

struct TriggerErrors {
  double e = 0.0;
  double e_hat = 0.0;

  double max_sq() const { return std::max(e * e, e_hat * e_hat); }
};

/// Last sample and the append-only event log. A fresh state has k = -1 and no events;
/// afterwards k == events.size() - 1 always holds.
struct TriggerState {
  double t_k = 0.0;
  double sampled_wt1 = 0.0;
  double sampled_wxt1 = 0.0;
  int k = -1;
  std::vector<TriggerEvent> events;

  /// In-place form of update_sample().
  void record(double t, double wt1_now, double wxt1_now, TriggerCause cause) {
    if (!events.empty() && !(t > t_k))
      throw InvalidParameter("TriggerState: event times must strictly increase");
    t_k = t;
    sampled_wt1 = wt1_now;
    sampled_wxt1 = wxt1_now;
    ++k;
    events.push_back({k, t, wt1_now, wxt1_now, cause});
  }
};

/// e_k = w_t(1,t) - w_t(1,t_k), e_hat_k = w_xt(1,t) - w_xt(1,t_k).
inline TriggerErrors trigger_errors(const TriggerState& ts, double wt1_now, double wxt1_now) {
  return {wt1_now - ts.sampled_wt1, wxt1_now - ts.sampled_wxt1};
}

/// max(e_k^2, e_hat_k^2) >= beta E(t) + beta0 E(0) exp(-2 theta t).
inline bool should_trigger(const TriggerState& ts, const TriggerParams& tp, double t, double E_t,
                           double wt1_now, double wxt1_now) {
  return trigger_errors(ts, wt1_now, wxt1_now).max_sq() >= tp.threshold(t, E_t);
}

/// Which error crossed the threshold; ties go to e.
inline TriggerCause dominant_cause(const TriggerErrors& err) {
  return err.e * err.e >= err.e_hat * err.e_hat ? TriggerCause::e : TriggerCause::e_hat;
}

inline TriggerState update_sample(TriggerState ts, double t, double wt1_now, double wxt1_now,
                                  TriggerCause cause) {
  ts.record(t, wt1_now, wxt1_now, cause);
  return ts;
}

/// U1 = -K1 w_xt(1, t_k), U2 = -K2 w_t(1, t_k).
inline ControlInput control_from_samples(const ControllerGains& g, const TriggerState& ts) {
  return {-g.K1 * ts.sampled_wxt1, -g.K2 * ts.sampled_wt1};
}

/// Same law evaluated on instantaneous traces (continuous-time controller).
inline ControlInput control_continuous(const ControllerGains& g, double wt1_now, double wxt1_now) {
  return {-g.K1 * wxt1_now, -g.K2 * wt1_now};
}

/// Smallest t_{k+1} - t_k; nullopt with fewer than two events.
inline std::optional<double> min_inter_event_time(std::span<const TriggerEvent> events) {
  if (events.size() < 2) return std::nullopt;
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < events.size(); ++i) m = std::min(m, events[i].t - events[i - 1].t);
  return m;
}

inline std::optional<double> min_inter_event_time(const std::vector<double>& times) {
  if (times.size() < 2) return std::nullopt;
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < times.size(); ++i) m = std::min(m, times[i] - times[i - 1]);
  return m;
}

namespace detail {
inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

/// Columns: k, t_k, sampled_wt1, sampled_wxt1, cause, inter_event_time (empty for k = 0).
inline void write_events_csv(std::ostream& os, std::span<const TriggerEvent> events) {
  using detail::fmt_double;
  os << "k,t_k,sampled_wt1,sampled_wxt1,cause,inter_event_time\n";
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    os << ev.k << ',' << fmt_double(ev.t) << ',' << fmt_double(ev.sampled_wt1) << ','
       << fmt_double(ev.sampled_wxt1) << ',' << to_string(ev.cause) << ',';
    if (i > 0) os << fmt_double(ev.t - events[i - 1].t);
    os << '\n';
  }
}

}  // namespace rbeam
