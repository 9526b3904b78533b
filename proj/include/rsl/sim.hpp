#pragma once
// sim.hpp -- fixed-step integration of the closed-loop formation dynamics
// and steady-state detection on the recorded trajectories.

#include <cmath>
#include <cstddef>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "rsl/control.hpp"
#include "rsl/graph.hpp"
#include "rsl/mat.hpp"

namespace rsl {

// One classic fourth-order Runge-Kutta step of x' = f(t, x).
template <typename Rhs>
Vec rk4_step(Rhs&& f, double t, const Vec& x, double h) {
  const Vec k1 = f(t, x);
  const Vec k2 = f(t + 0.5 * h, x + (0.5 * h) * k1);
  const Vec k3 = f(t + 0.5 * h, x + (0.5 * h) * k2);
  const Vec k4 = f(t + h, x + h * k3);
  Vec out = x;
  const double w = h / 6.0;
  axpy(w, k1, out);
  axpy(2.0 * w, k2, out);
  axpy(2.0 * w, k3, out);
  axpy(w, k4, out);
  return out;
}

struct SimConfig {
  double h = 1e-3;          // integration step
  double t_end = 10.0;      // final time
  int record_every = 1;     // keep every k-th step (first and last always kept)
  double blowup = 1e6;      // any position coordinate beyond this aborts the run
};

// Recorded samples of one closed-loop run.  Positions and velocities are
// agent-major stacked vectors; the estimate rows are present only when the
// controller tracks per-edge estimates.
struct Trajectory {
  int m = 0;
  int n = 0;
  int edge_count = 0;
  bool has_estimate = false;
  Vec t;
  std::vector<Vec> p;
  std::vector<Vec> v;
  std::vector<Vec> mu_hat;

  std::size_t samples() const { return t.size(); }
};

// Integrate the closed loop from (p0, v0) with the controller's own state
// layout.  Steps are uniform; sample j is taken at j * record_every steps,
// and the final step is always recorded.  A position coordinate exceeding
// cfg.blowup (or any non-finite state entry) raises DivergenceError stamped
// with the simulation time.
inline Trajectory simulate(const FormationGraph& g, const ShapeSpec& shape, const Controller& ctl,
                           const Vec& p0, const Vec& v0, const SimConfig& cfg,
                           const Vec& mu_hat0 = {}) {
  if (!(cfg.h > 0.0)) throw InvalidInput("simulate: step must be positive");
  if (!(cfg.t_end > 0.0)) throw InvalidInput("simulate: t_end must be positive");
  if (cfg.record_every < 1) throw InvalidInput("simulate: record_every must be >= 1");
  const long long steps = std::llround(cfg.t_end / cfg.h);
  if (steps < 1) throw InvalidInput("simulate: t_end shorter than one step");

  const int nm = g.n() * shape.m;
  Vec x = pack_state(ctl, g, shape.m, p0, v0, mu_hat0);
  const auto rhs = [&](double, const Vec& s) { return ctl.derivative(g, shape, s); };

  Trajectory traj;
  traj.m = shape.m;
  traj.n = g.n();
  traj.edge_count = g.edge_count();
  traj.has_estimate = ctl.tracks_estimate();

  const auto record = [&](double t) {
    traj.t.push_back(t);
    traj.p.push_back(segment(x, 0, nm));
    traj.v.push_back(segment(x, nm, nm));
    if (traj.has_estimate)
      traj.mu_hat.push_back(segment(x, 2 * static_cast<std::size_t>(nm), g.edge_count()));
  };

  record(0.0);
  for (long long step = 1; step <= steps; ++step) {
    const double t_prev = static_cast<double>(step - 1) * cfg.h;
    x = rk4_step(rhs, t_prev, x, cfg.h);
    const double t = static_cast<double>(step) * cfg.h;
    if (!all_finite(x))
      throw DivergenceError("simulate: state became non-finite at t = " + std::to_string(t), t);
    for (int i = 0; i < nm; ++i)
      if (std::fabs(x[i]) > cfg.blowup)
        throw DivergenceError("simulate: position left the guard region at t = " + std::to_string(t),
                              t);
    if (step % cfg.record_every == 0 || step == steps) record(t);
  }
  return traj;
}

struct SteadyReport {
  bool steady = false;
  double t_detect = 0.0;    // end of the first window after which all stay quiet
  std::string last_channel; // the monitor that settles last
};

namespace detail {

// Sliding-window max-min (variation) of a series, windows measured in time.
// For each sample index j with t_j - t_0 >= window, the variation over
// [t_j - window, t_j]; indices before that hold -1.
inline std::vector<double> window_variation(const Vec& t, const Vec& c, double window) {
  const std::size_t n = t.size();
  std::vector<double> var(n, -1.0);
  std::deque<std::size_t> lo, hi;
  std::size_t begin = 0;
  for (std::size_t j = 0; j < n; ++j) {
    while (!hi.empty() && c[hi.back()] <= c[j]) hi.pop_back();
    hi.push_back(j);
    while (!lo.empty() && c[lo.back()] >= c[j]) lo.pop_back();
    lo.push_back(j);
    while (t[begin] < t[j] - window) {
      if (hi.front() == begin) hi.pop_front();
      if (lo.front() == begin) lo.pop_front();
      ++begin;
    }
    if (t[j] - t.front() >= window) var[j] = c[hi.front()] - c[lo.front()];
  }
  return var;
}

}  // namespace detail

// Decide when a run has settled.  Monitored scalars: each agent speed s_i,
// each |e_k|, and each estimate mu_hat_k when present.  A channel is quiet
// over a window when its max-min variation there stays below tol times the
// channel's own full-trajectory magnitude (with a small absolute floor, so
// channels that are identically zero do not divide by nothing).  The run is
// steady once every window from some point on is quiet for every channel;
// t_detect is the end of the first such window.
inline SteadyReport detect_steady_state(const FormationGraph& g, const ShapeSpec& shape,
                                        const Trajectory& traj, double window = 1.0,
                                        double tol = 1e-3) {
  if (!(window > 0.0)) throw InvalidInput("detect_steady_state: window must be positive");
  if (traj.samples() < 2) return SteadyReport{};

  std::vector<std::pair<std::string, Vec>> channels;
  const std::size_t ns = traj.samples();
  for (int i = 0; i < traj.n; ++i) {
    Vec c(ns);
    for (std::size_t j = 0; j < ns; ++j)
      c[j] = norm(segment(traj.v[j], static_cast<std::size_t>(i) * traj.m, traj.m));
    channels.emplace_back("s[" + std::to_string(i + 1) + "]", std::move(c));
  }
  std::vector<Vec> errs(ns);
  if (traj.edge_count > 0)
    for (std::size_t j = 0; j < ns; ++j) errs[j] = distance_errors(g, shape, traj.p[j]);
  for (int k = 0; k < traj.edge_count; ++k) {
    Vec c(ns);
    for (std::size_t j = 0; j < ns; ++j) c[j] = std::fabs(errs[j][k]);
    channels.emplace_back("|e[" + std::to_string(k + 1) + "]|", std::move(c));
  }
  if (traj.has_estimate)
    for (int k = 0; k < traj.edge_count; ++k) {
      Vec c(ns);
      for (std::size_t j = 0; j < ns; ++j) c[j] = traj.mu_hat[j][k];
      channels.emplace_back("mu_hat[" + std::to_string(k + 1) + "]", std::move(c));
    }

  SteadyReport rep;
  std::size_t quiet_from = 0;  // first index whose window (and all later) pass
  bool any_window = false;
  for (const auto& [name, series] : channels) {
    const double scale = std::max(max_abs(series), 1e-9);
    const std::vector<double> var = detail::window_variation(traj.t, series, window);
    std::size_t first_ok = ns;  // first quiet window after the last violation
    for (std::size_t j = 0; j < ns; ++j) {
      if (var[j] < 0.0) continue;
      any_window = true;
      if (var[j] > tol * scale)
        first_ok = ns;
      else if (first_ok == ns)
        first_ok = j;
    }
    if (first_ok == ns) return SteadyReport{};  // this channel never settles
    if (first_ok > quiet_from) {
      quiet_from = first_ok;
      rep.last_channel = name;
    }
  }
  if (!any_window) return SteadyReport{};
  rep.steady = true;
  rep.t_detect = traj.t[quiet_from];
  return rep;
}

}  // namespace rsl
