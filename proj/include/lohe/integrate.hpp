#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lohe/models.hpp"

namespace lohe {

enum class Method { RK4, RK45 };

struct RenormalizePolicy {
  bool enabled = false;
  double threshold = 1e-6;
  bool operator==(const RenormalizePolicy&) const = default;
};

struct IntegratorConfig {
  Method method = Method::RK4;
  /// Fixed step for RK4, initial step for RK45.
  double dt = 1e-3;
  double rtol = 1e-9;
  double atol = 1e-12;
  double t_end = 1.0;
  double sample_every = 1e-2;
  RenormalizePolicy renormalize;

  /// Throws InvalidInput on nonpositive steps, dt >= t_end, or a sample
  /// cadence that is not a whole number of fixed steps.
  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  /// max_j | ||member_j|| - 1 | at each sample (0 for phase states).
  std::vector<double> norm_drift;
  std::vector<double> renormalization_times;
  /// Accepted step sizes in order; replayed by integrate_pair in adaptive mode.
  std::vector<double> step_sizes;

  std::size_t size() const noexcept { return times.size(); }
  double max_norm_drift() const {
    return norm_drift.empty() ? 0.0 : *std::max_element(norm_drift.begin(), norm_drift.end());
  }
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what + " at t=" + std::to_string(time)), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Non-finite derivative or state; carries the trajectory up to the fault.
template <class State>
class IntegrationFault : public IntegrationError {
 public:
  IntegrationFault(const std::string& what, double time, Trajectory<State> partial)
      : IntegrationError(what, time), partial_(std::move(partial)) {}
  const Trajectory<State>& partial() const noexcept { return partial_; }

 private:
  Trajectory<State> partial_;
};

template <class State>
using Rhs = std::function<State(double, const State&)>;
template <class State>
using Observer = std::function<void(double, const State&)>;

// Vector-space operations on the two state types the integrator handles.
namespace state_ops {

inline void add_scaled(Members& y, double a, const Members& x) {
  for (std::size_t j = 0; j < y.size(); ++j) y[j].add_scaled(a, x[j]);
}
inline void add_scaled(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline bool all_finite(const Members& y) {
  for (const auto& m : y)
    for (const auto& e : m.entries())
      if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
  return true;
}
inline bool all_finite(const std::vector<double>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

/// max_i |err_i| / (atol + rtol * max(|y0_i|, |y1_i|))
inline double error_ratio(const Members& y0, const Members& y1, const Members& err, double rtol,
                          double atol) {
  double r = 0.0;
  for (std::size_t j = 0; j < err.size(); ++j)
    for (std::size_t a = 0; a < err[j].size(); ++a) {
      const double scale = atol + rtol * std::max(std::abs(y0[j][a]), std::abs(y1[j][a]));
      r = std::max(r, std::abs(err[j][a]) / scale);
    }
  return r;
}
inline double error_ratio(const std::vector<double>& y0, const std::vector<double>& y1,
                          const std::vector<double>& err, double rtol, double atol) {
  double r = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i)
    r = std::max(r, std::abs(err[i]) / (atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]))));
  return r;
}

inline double norm_drift(const Members& y) {
  double d = 0.0;
  for (const auto& m : y) d = std::max(d, std::abs(frobenius_norm(m) - 1.0));
  return d;
}
inline double norm_drift(const std::vector<double>&) { return 0.0; }

inline void renormalize(Members& y) {
  for (auto& m : y) m *= 1.0 / frobenius_norm(m);
}
inline void renormalize(std::vector<double>&) {}

}  // namespace state_ops

/// Classical four-stage Runge-Kutta step from (t, y) to t + dt.
template <class State>
State step_rk4(const Rhs<State>& rhs, const State& y, double dt, double t = 0.0) {
  if (!(dt > 0.0)) throw InvalidInput("step size must be positive");
  auto eval = [&](double tt, const State& s) {
    State k = rhs(tt, s);
    if (!state_ops::all_finite(k)) throw IntegrationError("non-finite derivative", tt);
    return k;
  };
  const State k1 = eval(t, y);
  State s = y;
  state_ops::add_scaled(s, 0.5 * dt, k1);
  const State k2 = eval(t + 0.5 * dt, s);
  s = y;
  state_ops::add_scaled(s, 0.5 * dt, k2);
  const State k3 = eval(t + 0.5 * dt, s);
  s = y;
  state_ops::add_scaled(s, dt, k3);
  const State k4 = eval(t + dt, s);
  State out = y;
  state_ops::add_scaled(out, dt / 6.0, k1);
  state_ops::add_scaled(out, dt / 3.0, k2);
  state_ops::add_scaled(out, dt / 3.0, k3);
  state_ops::add_scaled(out, dt / 6.0, k4);
  return out;
}

/// One Dormand-Prince 5(4) step: returns the fifth-order solution and the
/// embedded error estimate.
template <class State>
std::pair<State, State> step_dopri5(const Rhs<State>& rhs, const State& y, double h, double t) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b_hat (b_hat: 5179/57600, 0, 7571/16695, 393/640, -92097/339200, 187/2100, 1/40)
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto eval = [&](double tt, const State& s) {
    State k = rhs(tt, s);
    if (!state_ops::all_finite(k)) throw IntegrationError("non-finite derivative", tt);
    return k;
  };
  auto stage = [&](std::initializer_list<std::pair<double, const State*>> terms) {
    State s = y;
    for (const auto& [a, k] : terms) state_ops::add_scaled(s, h * a, *k);
    return s;
  };
  const State k1 = eval(t, y);
  const State k2 = eval(t + c2 * h, stage({{a21, &k1}}));
  const State k3 = eval(t + c3 * h, stage({{a31, &k1}, {a32, &k2}}));
  const State k4 = eval(t + c4 * h, stage({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const State k5 = eval(t + c5 * h, stage({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const State k6 =
      eval(t + h, stage({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  State y5 = stage({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const State k7 = eval(t + h, y5);

  // err = h * (e1 k1 + e3 k3 + e4 k4 + e5 k5 + e6 k6 + e7 k7)
  State err = k1;
  state_ops::add_scaled(err, -1.0, k1);  // exact zeros with the right shape
  state_ops::add_scaled(err, h * e1, k1);
  state_ops::add_scaled(err, h * e3, k3);
  state_ops::add_scaled(err, h * e4, k4);
  state_ops::add_scaled(err, h * e5, k5);
  state_ops::add_scaled(err, h * e6, k6);
  state_ops::add_scaled(err, h * e7, k7);
  return {std::move(y5), std::move(err)};
}

namespace detail {

inline long whole_multiple(double total, double step, const char* what) {
  const double q = total / step;
  const long n = std::lround(q);
  if (n < 1 || std::abs(q - double(n)) > 1e-9 * std::max(1.0, q))
    throw InvalidInput(std::string(what) + " must be a whole number of steps");
  return n;
}

template <class State>
void record(Trajectory<State>& traj, double t, const State& y, const Observer<State>& obs) {
  traj.times.push_back(t);
  traj.states.push_back(y);
  traj.norm_drift.push_back(state_ops::norm_drift(y));
  if (obs) obs(t, y);
}

template <class State>
void maybe_renormalize(Trajectory<State>& traj, double t, State& y, const RenormalizePolicy& p) {
  if (p.enabled && state_ops::norm_drift(y) > p.threshold) {
    state_ops::renormalize(y);
    traj.renormalization_times.push_back(t);
  }
}

template <class State>
Trajectory<State> run_fixed(const Rhs<State>& rhs, const State& initial,
                            const IntegratorConfig& cfg, const Observer<State>& obs) {
  const long n_steps = whole_multiple(cfg.t_end, cfg.dt, "t_end");
  const long per_sample = whole_multiple(cfg.sample_every, cfg.dt, "sample_every");
  Trajectory<State> traj;
  State y = initial;
  record(traj, 0.0, y, obs);
  for (long k = 0; k < n_steps; ++k) {
    const double t = double(k) * cfg.dt;
    const double t_next = double(k + 1) * cfg.dt;
    try {
      y = step_rk4(rhs, y, cfg.dt, t);
    } catch (const IntegrationError& e) {
      throw IntegrationFault<State>("integration fault: non-finite derivative", e.time(),
                                    std::move(traj));
    }
    traj.step_sizes.push_back(cfg.dt);
    maybe_renormalize(traj, t_next, y, cfg.renormalize);
    if ((k + 1) % per_sample == 0 || k + 1 == n_steps) record(traj, t_next, y, obs);
  }
  return traj;
}

/// Adaptive Dormand-Prince. When `replay` is given, the step sequence is
/// taken from it verbatim and no error control is applied.
template <class State>
Trajectory<State> run_adaptive(const Rhs<State>& rhs, const State& initial,
                               const IntegratorConfig& cfg, const Observer<State>& obs,
                               const std::vector<double>* replay) {
  constexpr double kSafety = 0.9, kMinGrowth = 0.2, kMaxGrowth = 5.0;
  Trajectory<State> traj;
  State y = initial;
  double t = 0.0;
  record(traj, t, y, obs);
  double next_sample = std::min(cfg.sample_every, cfg.t_end);
  double h = cfg.dt;
  std::size_t replay_index = 0;
  const double snap = 1e-12 * std::max(1.0, cfg.t_end);

  while (t < cfg.t_end - snap) {
    double step = replay ? replay->at(replay_index++) : std::min(h, next_sample - t);
    std::pair<State, State> trial;
    try {
      trial = step_dopri5(rhs, y, step, t);
    } catch (const IntegrationError& e) {
      throw IntegrationFault<State>("integration fault: non-finite derivative", e.time(),
                                    std::move(traj));
    }
    if (!replay) {
      const double ratio = state_ops::error_ratio(y, trial.first, trial.second, cfg.rtol, cfg.atol);
      const double growth =
          ratio == 0.0 ? kMaxGrowth
                       : std::clamp(kSafety * std::pow(ratio, -0.2), kMinGrowth, kMaxGrowth);
      if (ratio > 1.0) {
        h = step * growth;
        if (h < 1e-14 * std::max(1.0, t)) throw IntegrationFault<State>("step size underflow", t, std::move(traj));
        continue;
      }
      // Keep the controller's proposal when this step was clipped to a sample.
      const bool clipped = step < h;
      h = clipped ? std::max(h, step * growth) : step * growth;
    }
    y = std::move(trial.first);
    t += step;
    traj.step_sizes.push_back(step);
    if (std::abs(t - next_sample) <= snap) t = next_sample;
    maybe_renormalize(traj, t, y, cfg.renormalize);
    if (t >= next_sample) {
      record(traj, t, y, obs);
      next_sample = std::min(next_sample + cfg.sample_every, cfg.t_end);
      if (cfg.t_end - next_sample <= snap) next_sample = cfg.t_end;
    }
  }
  if (traj.times.back() != t) record(traj, t, y, obs);
  return traj;
}

}  // namespace detail

inline void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  if (!(t_end > 0.0)) throw InvalidInput("t_end must be positive");
  if (!(dt < t_end)) throw InvalidInput("dt must be smaller than t_end");
  if (!(sample_every > 0.0)) throw InvalidInput("sample_every must be positive");
  if (renormalize.enabled && !(renormalize.threshold > 0.0))
    throw InvalidInput("renormalization threshold must be positive");
  if (method == Method::RK45 && (!(rtol > 0.0) || !(atol > 0.0)))
    throw InvalidInput("rtol and atol must be positive");
  if (method == Method::RK4) {
    detail::whole_multiple(t_end, dt, "t_end");
    detail::whole_multiple(sample_every, dt, "sample_every");
  }
}

/// Integrates from t = 0 to cfg.t_end. Samples land on exact step boundaries
/// (RK4) or are hit by clipping the step (RK45); nothing is interpolated.
template <class State>
Trajectory<State> integrate(const Rhs<State>& rhs, const State& initial,
                            const IntegratorConfig& cfg, const Observer<State>& observer = {}) {
  cfg.validate();
  if (cfg.method == Method::RK4) return detail::run_fixed(rhs, initial, cfg, observer);
  return detail::run_adaptive(rhs, initial, cfg, observer, nullptr);
}

/// Integrates two initial conditions on one shared time grid. In adaptive
/// mode the step sequence of the first run is replayed for the second.
template <class State>
std::pair<Trajectory<State>, Trajectory<State>> integrate_pair(const Rhs<State>& rhs,
                                                               const State& initial_a,
                                                               const State& initial_b,
                                                               const IntegratorConfig& cfg) {
  cfg.validate();
  if (cfg.method == Method::RK4)
    return {detail::run_fixed(rhs, initial_a, cfg, {}), detail::run_fixed(rhs, initial_b, cfg, {})};
  Trajectory<State> a = detail::run_adaptive(rhs, initial_a, cfg, {}, nullptr);
  Trajectory<State> b = detail::run_adaptive(rhs, initial_b, cfg, {}, &a.step_sizes);
  return {std::move(a), std::move(b)};
}

}  // namespace lohe
