/**
 * @file sim.hpp
 * @brief Fixed-step RK4 and adaptive Runge-Kutta-Fehlberg 4(5) integration
 *        of the coupled system, and seeded perturbation experiments around a
 *        homogeneous equilibrium.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netstab/assembly.hpp"
#include "netstab/error.hpp"
#include "netstab/stability.hpp"

namespace netstab {

enum class Method { rk4, rkf45 };

[[nodiscard]] constexpr std::string_view to_string(Method m) noexcept {
  return m == Method::rk4 ? "rk4" : "rkf45";
}

struct StepStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  double min_dt = std::numeric_limits<double>::infinity();
  double max_dt = 0.0;
  /// Largest scaled error estimate among accepted RKF45 steps; <= 1 by construction.
  double max_error_ratio = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StackedState> states;
  Method method = Method::rkf45;
  StepStats step_stats;
  bool diverged = false;
  /// Step cap reached before t_end.
  bool truncated = false;
  std::string reason;
};

struct IntegrationControls {
  double dt = 1e-2;
  double abs_tol = 1e-9;
  double rel_tol = 1e-7;
  std::size_t max_steps = 1'000'000;
  double min_dt = 1e-14;
  double blowup = 1e12;
  /// When false only the initial and final states are kept.
  bool record_all = true;
};

using VectorField = std::function<std::vector<double>(std::span<const double>)>;

namespace detail {

inline void axpy(std::vector<double>& out, std::span<const double> x, double h,
                 std::initializer_list<std::pair<double, const std::vector<double>*>> terms) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    double acc = 0.0;
    for (const auto& [c, k] : terms) acc += c * (*k)[i];
    out[i] = x[i] + h * acc;
  }
}

inline bool escaped(std::span<const double> x, double bound) {
  for (double v : x)
    if (!std::isfinite(v) || std::abs(v) > bound) return true;
  return false;
}

class Recorder {
 public:
  Recorder(Trajectory& traj, bool all) : traj_(traj), all_(all) {}
  void push(double t, const std::vector<double>& x) {
    if (all_ || traj_.times.size() < 2) {
      traj_.times.push_back(t);
      traj_.states.push_back(x);
    } else {
      traj_.times.back() = t;
      traj_.states.back() = x;
    }
  }

 private:
  Trajectory& traj_;
  bool all_;
};

inline void note_step(StepStats& s, double h) {
  ++s.steps;
  s.min_dt = std::min(s.min_dt, h);
  s.max_dt = std::max(s.max_dt, h);
}

inline void integrate_rk4(const VectorField& f, std::vector<double> x, double t_end,
                          const IntegrationControls& ctl, Trajectory& traj) {
  if (!(ctl.dt > 0.0)) throw InvalidArgument("integrate: rk4 needs dt > 0");
  const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / ctl.dt - 1e-9));
  const double h = t_end / static_cast<double>(std::max<std::size_t>(n_steps, 1));
  Recorder rec(traj, ctl.record_all);
  std::vector<double> tmp(x.size());
  for (std::size_t k = 1; k <= std::max<std::size_t>(n_steps, 1); ++k) {
    if (traj.step_stats.steps >= ctl.max_steps) {
      traj.truncated = true;
      traj.reason = "step cap reached";
      return;
    }
    const auto k1 = f(x);
    axpy(tmp, x, h / 2, {{1.0, &k1}});
    const auto k2 = f(tmp);
    axpy(tmp, x, h / 2, {{1.0, &k2}});
    const auto k3 = f(tmp);
    axpy(tmp, x, h, {{1.0, &k3}});
    const auto k4 = f(tmp);
    axpy(tmp, x, h / 6, {{1.0, &k1}, {2.0, &k2}, {2.0, &k3}, {1.0, &k4}});
    if (escaped(tmp, ctl.blowup)) {
      traj.diverged = true;
      traj.reason = "state left the finite range";
      return;
    }
    x.swap(tmp);
    note_step(traj.step_stats, h);
    rec.push(static_cast<double>(k) * h, x);
  }
}

// Fehlberg 4(5) tableau.
inline constexpr double a21 = 1.0 / 4;
inline constexpr double a31 = 3.0 / 32, a32 = 9.0 / 32;
inline constexpr double a41 = 1932.0 / 2197, a42 = -7200.0 / 2197, a43 = 7296.0 / 2197;
inline constexpr double a51 = 439.0 / 216, a52 = -8.0, a53 = 3680.0 / 513, a54 = -845.0 / 4104;
inline constexpr double a61 = -8.0 / 27, a62 = 2.0, a63 = -3544.0 / 2565, a64 = 1859.0 / 4104,
                        a65 = -11.0 / 40;
inline constexpr double b41 = 25.0 / 216, b43 = 1408.0 / 2565, b44 = 2197.0 / 4104,
                        b45 = -1.0 / 5;
inline constexpr double b51 = 16.0 / 135, b53 = 6656.0 / 12825, b54 = 28561.0 / 56430,
                        b55 = -9.0 / 50, b56 = 2.0 / 55;

inline void integrate_rkf45(const VectorField& f, std::vector<double> x, double t_end,
                            const IntegrationControls& ctl, Trajectory& traj) {
  if (!(ctl.abs_tol > 0.0) || !(ctl.rel_tol >= 0.0)) {
    throw InvalidArgument("integrate: rkf45 needs abs_tol > 0 and rel_tol >= 0");
  }
  Recorder rec(traj, ctl.record_all);
  const std::size_t n = x.size();
  std::vector<double> tmp(n), y4(n);
  double t = 0.0;
  double h = std::min(ctl.dt, t_end);
  while (t < t_end) {
    if (traj.step_stats.steps >= ctl.max_steps) {
      traj.truncated = true;
      traj.reason = "step cap reached";
      return;
    }
    if (h < ctl.min_dt) {
      traj.diverged = true;
      traj.reason = "step size underflow";
      return;
    }
    const bool last = t + h >= t_end;
    if (last) h = t_end - t;

    const auto k1 = f(x);
    axpy(tmp, x, h, {{a21, &k1}});
    const auto k2 = f(tmp);
    axpy(tmp, x, h, {{a31, &k1}, {a32, &k2}});
    const auto k3 = f(tmp);
    axpy(tmp, x, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    const auto k4 = f(tmp);
    axpy(tmp, x, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    const auto k5 = f(tmp);
    axpy(tmp, x, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    const auto k6 = f(tmp);

    axpy(y4, x, h, {{b41, &k1}, {b43, &k3}, {b44, &k4}, {b45, &k5}});
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y5 =
          x[i] + h * (b51 * k1[i] + b53 * k3[i] + b54 * k4[i] + b55 * k5[i] + b56 * k6[i]);
      const double scale = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(x[i]), std::abs(y4[i]));
      err = std::max(err, std::abs(y5 - y4[i]) / scale);
    }
    if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();

    if (err <= 1.0) {
      if (escaped(y4, ctl.blowup)) {
        traj.diverged = true;
        traj.reason = "state left the finite range";
        return;
      }
      t = last ? t_end : t + h;
      x.swap(y4);
      note_step(traj.step_stats, h);
      traj.step_stats.max_error_ratio = std::max(traj.step_stats.max_error_ratio, err);
      rec.push(t, x);
    } else {
      ++traj.step_stats.rejected;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
  }
}

}  // namespace detail

/// Integrates x' = f(x) from t = 0 to t_end, recording accepted steps.
[[nodiscard]] inline Trajectory integrate(const VectorField& f, std::span<const double> x0,
                                          double t_end, Method method,
                                          const IntegrationControls& ctl = {}) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw InvalidArgument("integrate: t_end must be finite and > 0");
  }
  for (double v : x0)
    if (!std::isfinite(v)) throw InvalidArgument("integrate: non-finite initial state");
  Trajectory traj;
  traj.method = method;
  traj.times.push_back(0.0);
  traj.states.emplace_back(x0.begin(), x0.end());
  std::vector<double> x(x0.begin(), x0.end());
  if (method == Method::rk4) {
    detail::integrate_rk4(f, std::move(x), t_end, ctl, traj);
  } else {
    detail::integrate_rkf45(f, std::move(x), t_end, ctl, traj);
  }
  return traj;
}

[[nodiscard]] inline Trajectory integrate(const CoupledSystem& system, std::span<const double> x0,
                                          double t_end, Method method,
                                          const IntegrationControls& ctl = {}) {
  system.require_state(x0);
  const VectorField f = [&system](std::span<const double> x) { return eval_coupled_f(system, x); };
  return integrate(f, x0, t_end, method, ctl);
}

// ---------------------------------------------------------------- perturbation

enum class Classification { converged, diverged, inconclusive };

[[nodiscard]] constexpr std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::converged: return "converged";
    case Classification::diverged: return "diverged";
    case Classification::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

inline constexpr double kConvergedFactor = 0.01;
inline constexpr double kDivergedFactor = 100.0;
inline constexpr double kMaxHorizon = 1e4;

struct TrialResult {
  Classification classification = Classification::inconclusive;
  double initial_distance = 0.0;
  double final_distance = 0.0;
  std::string note;
};

struct ConvergenceResult {
  Classification classification = Classification::inconclusive;
  /// Largest final distance over trials.
  double final_distance = 0.0;
  double initial_distance = 0.0;
  double horizon = 0.0;
  std::vector<TrialResult> trials;

  [[nodiscard]] double distance_ratio() const noexcept {
    return initial_distance > 0.0 ? final_distance / initial_distance
                                  : std::numeric_limits<double>::quiet_NaN();
  }
};

struct PerturbOptions {
  double delta = 1e-3;
  /// Defaults to 10 / |abscissa| capped at 1e4.
  std::optional<double> horizon;
  std::size_t trials = 8;
  std::uint64_t seed = 0;
  Method method = Method::rkf45;
  IntegrationControls controls{};
};

[[nodiscard]] inline double default_horizon(double abscissa) {
  if (abscissa == 0.0 || !std::isfinite(abscissa)) return kMaxHorizon;
  return std::min(kMaxHorizon, 10.0 / std::abs(abscissa));
}

namespace detail {

/// Standard normal draws via Box-Muller; identical across standard libraries.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : rng_(seed) {}
  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace detail

/// Unit-norm random directions, one per trial, reproducible from the seed.
[[nodiscard]] inline std::vector<std::vector<double>> perturbation_directions(std::size_t dim,
                                                                              std::size_t trials,
                                                                              std::uint64_t seed) {
  detail::NormalSource normal(seed);
  std::vector<std::vector<double>> out;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> v(dim);
    double norm = 0.0;
    while (norm == 0.0) {
      for (double& x : v) x = normal();
      norm = std::sqrt(detail::dot(v, v));
    }
    for (double& x : v) x /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

/**
 * @brief Integrates from x̄ + delta u for seeded random unit directions u and
 *        classifies each trial: converged at <= 0.01x the initial distance,
 *        diverged at >= 100x or on escape, otherwise inconclusive.
 *
 * Aggregate: converged iff every trial converged, diverged iff any diverged.
 */
[[nodiscard]] inline ConvergenceResult perturb_and_classify(const CoupledSystem& system,
                                                            const HomogeneousEquilibrium& eq,
                                                            const PerturbOptions& opt = {}) {
  if (!(opt.delta >= 0.0) || !std::isfinite(opt.delta)) {
    throw InvalidArgument("perturb_and_classify: delta must be finite and >= 0");
  }
  if (opt.trials < 1) throw InvalidArgument("perturb_and_classify: need at least one trial");
  ConvergenceResult out;
  out.initial_distance = opt.delta;
  out.horizon = opt.horizon ? *opt.horizon : default_horizon(spectral_verdict(system, eq).abscissa);
  if (!(out.horizon > 0.0)) throw InvalidArgument("perturb_and_classify: horizon must be > 0");

  IntegrationControls ctl = opt.controls;
  ctl.record_all = false;
  const auto dirs = perturbation_directions(system.size(), opt.trials, opt.seed);
  // With delta = 0 the state only moves by integration error.
  const double rest_bound = 100.0 * (ctl.abs_tol + ctl.rel_tol * detail::inf_norm(eq.stacked));
  for (const auto& u : dirs) {
    TrialResult tr;
    tr.initial_distance = opt.delta;
    std::vector<double> x0(eq.stacked);
    for (std::size_t i = 0; i < x0.size(); ++i) x0[i] += opt.delta * u[i];
    bool decided = false;
    try {
      const auto traj = integrate(system, x0, out.horizon, opt.method, ctl);
      tr.final_distance = detail::distance(traj.states.back(), eq.stacked);
      if (traj.diverged) {
        tr.classification = Classification::diverged;
        tr.note = traj.reason;
        decided = true;
      } else if (traj.truncated) {
        tr.note = traj.reason;
        decided = true;
      }
    } catch (const DomainError& e) {
      tr.classification = Classification::diverged;
      tr.final_distance = std::numeric_limits<double>::infinity();
      tr.note = std::string("left the model domain: ") + e.what();
      decided = true;
    }
    if (!decided) {
      if (opt.delta == 0.0) {
        tr.classification = tr.final_distance <= rest_bound ? Classification::converged
                                                            : Classification::inconclusive;
      } else if (tr.final_distance <= kConvergedFactor * opt.delta) {
        tr.classification = Classification::converged;
      } else if (tr.final_distance >= kDivergedFactor * opt.delta) {
        tr.classification = Classification::diverged;
      }
    }
    out.final_distance = std::max(out.final_distance, tr.final_distance);
    out.trials.push_back(std::move(tr));
  }

  const bool all_converged = std::all_of(out.trials.begin(), out.trials.end(), [](const auto& t) {
    return t.classification == Classification::converged;
  });
  const bool any_diverged = std::any_of(out.trials.begin(), out.trials.end(), [](const auto& t) {
    return t.classification == Classification::diverged;
  });
  out.classification = any_diverged    ? Classification::diverged
                       : all_converged ? Classification::converged
                                       : Classification::inconclusive;
  return out;
}

// ---------------------------------------------------------------- CSV

/// Header t,x_1_1,...,x_n_m then one row per recorded state, 17 significant digits.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj, std::size_t patches,
                                 std::size_t variables) {
  os << "t";
  for (std::size_t i = 1; i <= variables; ++i)
    for (std::size_t j = 1; j <= patches; ++j) os << ",x_" << i << '_' << j;
  os << '\n';
  char buf[32];
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[r]);
    os << buf;
    for (double v : traj.states[r]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace netstab
