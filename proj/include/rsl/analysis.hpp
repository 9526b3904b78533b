#pragma once
// analysis.hpp -- post-hoc trajectory analytics: rigid-body velocity
// extraction, energy-style monitor functions, and constancy reports over a
// trailing window.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "rsl/control.hpp"
#include "rsl/graph.hpp"
#include "rsl/linalg.hpp"
#include "rsl/mat.hpp"
#include "rsl/sim.hpp"

namespace rsl {

// Best rigid-body reading of one velocity snapshot: v_i ~ v_c + omega x
// (p_i - centroid), least squares over (v_c, omega).  In the plane omega is
// the single scalar spin; in space it is a 3-vector.  The residual is the
// fit error relative to the field magnitude.
struct BodyMotion {
  Vec v_c;       // centroid velocity, length m
  Vec omega;     // spin: length 1 (m == 2) or 3 (m == 3)
  Vec centroid;  // instantaneous centroid, length m
  double residual = 0.0;
};

inline BodyMotion fit_body_motion(int m, const Vec& p, const Vec& v) {
  detail::check_dim(m);
  if (p.size() != v.size() || p.empty() || p.size() % static_cast<std::size_t>(m) != 0)
    throw InvalidInput("fit_body_motion: bad stacked p/v");
  const int n = static_cast<int>(p.size()) / m;
  BodyMotion bm;
  bm.centroid.assign(m, 0.0);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < m; ++d) bm.centroid[d] += p[static_cast<std::size_t>(i) * m + d] / n;

  const int spin = m == 2 ? 1 : 3;
  Mat design(n * m, m + spin);
  for (int i = 0; i < n; ++i) {
    Vec q(m);
    for (int d = 0; d < m; ++d) {
      q[d] = p[static_cast<std::size_t>(i) * m + d] - bm.centroid[d];
      design(i * m + d, d) = 1.0;
    }
    if (m == 2) {
      design(i * 2 + 0, 2) = -q[1];
      design(i * 2 + 1, 2) = q[0];
    } else {
      // v = v_c - q x omega: the skew of q with flipped sign.
      design(i * 3 + 0, 4) = q[2];
      design(i * 3 + 0, 5) = -q[1];
      design(i * 3 + 1, 3) = -q[2];
      design(i * 3 + 1, 5) = q[0];
      design(i * 3 + 2, 3) = q[1];
      design(i * 3 + 2, 4) = -q[0];
    }
  }
  const Vec sol = least_squares(design, v);
  bm.v_c = segment(sol, 0, m);
  bm.omega = segment(sol, m, spin);
  const double vn = norm(v);
  bm.residual = vn > 0.0 ? norm(design * sol - v) / vn : 0.0;
  return bm;
}

// Angle in degrees between the centroid velocity and the spin axis; only
// meaningful in space.  Zero velocity or zero spin count as aligned.
inline double axis_alignment_deg(const Vec& v_c, const Vec& omega) {
  if (v_c.size() != 3 || omega.size() != 3)
    throw InvalidInput("axis_alignment_deg: needs 3-vectors");
  const double a = norm(v_c), b = norm(omega);
  if (a == 0.0 || b == 0.0) return 0.0;
  double c = std::fabs(dot(v_c, omega)) / (a * b);
  if (c > 1.0) c = 1.0;
  return std::acos(c) * 180.0 / 3.14159265358979323846;
}

// Orthonormal frame riding on the formation, built from the first two edge
// directions (first edge only, in the plane).  For a rigidly moving shape
// the frame co-rotates exactly, so body components of fitted velocities are
// the right constancy monitors.
inline Mat body_frame(const FormationGraph& g, int m, const Vec& p) {
  const Vec z = relative_positions(g, m, p);
  Vec b1 = segment(z, 0, m);
  const double n1 = norm(b1);
  if (n1 == 0.0) throw PreconditionError("body_frame: first edge has zero length");
  b1 = (1.0 / n1) * b1;
  Mat frame(m, m);
  if (m == 2) {
    frame(0, 0) = b1[0];
    frame(1, 0) = b1[1];
    frame(0, 1) = -b1[1];
    frame(1, 1) = b1[0];
    return frame;
  }
  if (g.edge_count() < 2) throw PreconditionError("body_frame: need two edges in space");
  Vec b2 = segment(z, m, m);
  axpy(-dot(b2, b1), b1, b2);
  const double n2 = norm(b2);
  if (n2 == 0.0) throw PreconditionError("body_frame: first two edges are parallel");
  b2 = (1.0 / n2) * b2;
  const Vec b3 = {b1[1] * b2[2] - b1[2] * b2[1], b1[2] * b2[0] - b1[0] * b2[2],
                  b1[0] * b2[1] - b1[1] * b2[0]};
  for (int i = 0; i < 3; ++i) {
    frame(i, 0) = b1[i];
    frame(i, 1) = b2[i];
    frame(i, 2) = b3[i];
  }
  return frame;
}

// ---- energy-style monitor functions -------------------------------------

// Shape-plus-speed energy, 1/2 |e|^2 + sum_i s_i^2.  Non-increasing along
// the gradient law and the blended family near a rigid target shape.
inline double lyapunov_shape_speed(const FormationGraph& g, const ShapeSpec& shape, const Vec& p,
                                   const Vec& v) {
  const Vec e = distance_errors(g, shape, p);
  return 0.5 * norm_sq(e) + norm_sq(v);
}

// Estimation energy, 1/2 |mu - mu_hat|^2 + 1/2 |v|^2 + 1/4 |e|^2.  Its time
// derivative along the velocity-driven estimator loop is exactly -|v|^2.
inline double lyapunov_estimator(const FormationGraph& g, const ShapeSpec& shape, const Vec& mu,
                                 const Vec& p, const Vec& v, const Vec& mu_hat) {
  detail::check_edge_vector(g, mu, "lyapunov_estimator");
  detail::check_edge_vector(g, mu_hat, "lyapunov_estimator");
  const Vec e = distance_errors(g, shape, p);
  return 0.5 * norm_sq(mu - mu_hat) + 0.5 * norm_sq(v) + 0.25 * norm_sq(e);
}

// Steady-motion energy in velocity-error coordinates,
//   V = (eps c1 + c2)/4 |e|^2 + 1/2 |e_v|^2 + eps e_v . (B kron I_m) D_z e,
// with e_v = v - (A_v kron I_m) z.  Positive definite for small eps.
inline double lyapunov_motion(const FormationGraph& g, const ShapeSpec& shape,
                              const MotionParams& mp, double eps, const Vec& p, const Vec& v) {
  const int m = shape.m;
  const Vec z = relative_positions(g, m, p);
  const Vec e = detail::errors_from_z(shape, z);
  const Vec e_v = v - edge_weighted_sum(mp.a_v, m, z);
  Vec ge(p.size(), 0.0);  // (B kron I_m) D_z e
  for (int k = 0; k < g.edge_count(); ++k)
    for (int d = 0; d < m; ++d) {
      const double f = e[k] * z[static_cast<std::size_t>(k) * m + d];
      ge[static_cast<std::size_t>(g.tail(k)) * m + d] += f;
      ge[static_cast<std::size_t>(g.head(k)) * m + d] -= f;
    }
  return 0.25 * (eps * mp.c1 + mp.c2) * norm_sq(e) + 0.5 * norm_sq(e_v) + eps * dot(e_v, ge);
}

// Monitor function matched to the controller: shape/speed energy for the
// plain laws, estimation energy for the estimating laws, steady-motion
// energy for the motion law.  x is the controller's stacked state.
inline double lyapunov_value(const Controller& ctl, const FormationGraph& g,
                             const ShapeSpec& shape, const Vec& x, double eps = 0.05) {
  const int nm = g.n() * shape.m;
  const Vec p = segment(x, 0, nm);
  const Vec v = segment(x, nm, nm);
  switch (ctl.law) {
    case ControlLaw::estimator1:
    case ControlLaw::estimator2: {
      const Vec mu_hat = segment(x, 2 * static_cast<std::size_t>(nm), g.edge_count());
      return lyapunov_estimator(g, shape, ctl.mu, p, v, mu_hat);
    }
    case ControlLaw::motion:
      return lyapunov_motion(g, shape, ctl.motion, eps, p, v);
    default:
      return lyapunov_shape_speed(g, shape, p, v);
  }
}

// ---- constancy over a trailing window ------------------------------------

struct ChannelStat {
  std::string name;
  double mean = 0.0;
  double variation = 0.0;  // (max - min) / max |value| over the window
};

struct ConstancyReport {
  double t_from = 0.0;
  std::vector<ChannelStat> channels;

  // Largest relative variation among channels whose name starts with prefix.
  double worst(const std::string& prefix) const {
    double w = 0.0;
    for (const auto& c : channels)
      if (c.name.rfind(prefix, 0) == 0) w = std::max(w, c.variation);
    return w;
  }
  const ChannelStat* find(const std::string& name) const {
    for (const auto& c : channels)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

inline ChannelStat channel_stat(std::string name, const Vec& values) {
  ChannelStat st;
  st.name = std::move(name);
  if (values.empty()) return st;
  double lo = values[0], hi = values[0], sum = 0.0;
  for (double x : values) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    sum += x;
  }
  st.mean = sum / static_cast<double>(values.size());
  st.variation = (hi - lo) / std::max(std::max(std::fabs(hi), std::fabs(lo)), 1e-9);
  return st;
}

}  // namespace detail

// How steady the tail of a run really is.  Over [t_from, end] (default: the
// final fifth) the report tracks, per sample: agent speeds, |e_k|, agent
// acceleration magnitudes (central differences of the recorded velocities),
// the fitted spin and centroid-velocity magnitudes, and their components in
// the co-rotating body frame.  Each channel reports its relative variation.
inline ConstancyReport constancy_report(const FormationGraph& g, const ShapeSpec& shape,
                                        const Trajectory& traj, double t_from = -1.0) {
  if (traj.samples() < 3) throw InvalidInput("constancy_report: too few samples");
  const double t0 = traj.t.front(), t1 = traj.t.back();
  if (t_from < t0) t_from = t0 + 0.8 * (t1 - t0);
  std::size_t begin = 0;
  while (begin < traj.samples() && traj.t[begin] < t_from) ++begin;
  if (traj.samples() - begin < 3)
    throw InvalidInput("constancy_report: window holds fewer than three samples");

  ConstancyReport rep;
  rep.t_from = traj.t[begin];
  const std::size_t ns = traj.samples();
  const int m = traj.m;

  std::vector<Vec> speeds(traj.n), errmags(g.edge_count()), accels(traj.n);
  Vec vc_mag, om_mag;
  std::vector<Vec> vc_body(m), om_body(m == 2 ? 1 : 3);
  for (std::size_t j = begin; j < ns; ++j) {
    for (int i = 0; i < traj.n; ++i)
      speeds[i].push_back(norm(segment(traj.v[j], static_cast<std::size_t>(i) * m, m)));
    const Vec e = distance_errors(g, shape, traj.p[j]);
    for (int k = 0; k < g.edge_count(); ++k) errmags[k].push_back(std::fabs(e[k]));
    if (j > begin && j + 1 < ns) {
      const double dt = traj.t[j + 1] - traj.t[j - 1];
      for (int i = 0; i < traj.n; ++i) {
        const Vec dv = segment(traj.v[j + 1], static_cast<std::size_t>(i) * m, m) -
                       segment(traj.v[j - 1], static_cast<std::size_t>(i) * m, m);
        accels[i].push_back(norm(dv) / dt);
      }
    }
    const BodyMotion bm = fit_body_motion(m, traj.p[j], traj.v[j]);
    vc_mag.push_back(norm(bm.v_c));
    om_mag.push_back(norm(bm.omega));
    const Mat frame = body_frame(g, m, traj.p[j]);
    const Vec vc_b = frame.t() * bm.v_c;
    for (int d = 0; d < m; ++d) vc_body[d].push_back(vc_b[d]);
    if (m == 2) {
      om_body[0].push_back(bm.omega[0]);
    } else {
      const Vec om_b = frame.t() * bm.omega;
      for (int d = 0; d < 3; ++d) om_body[d].push_back(om_b[d]);
    }
  }

  for (int i = 0; i < traj.n; ++i)
    rep.channels.push_back(detail::channel_stat("s[" + std::to_string(i + 1) + "]", speeds[i]));
  for (int k = 0; k < g.edge_count(); ++k)
    rep.channels.push_back(detail::channel_stat("|e[" + std::to_string(k + 1) + "]|", errmags[k]));
  for (int i = 0; i < traj.n; ++i)
    rep.channels.push_back(detail::channel_stat("a[" + std::to_string(i + 1) + "]", accels[i]));
  rep.channels.push_back(detail::channel_stat("vc.mag", vc_mag));
  rep.channels.push_back(detail::channel_stat("omega.mag", om_mag));
  for (int d = 0; d < m; ++d)
    rep.channels.push_back(detail::channel_stat("vc.b" + std::to_string(d + 1), vc_body[d]));
  for (std::size_t d = 0; d < om_body.size(); ++d)
    rep.channels.push_back(detail::channel_stat("omega.b" + std::to_string(d + 1), om_body[d]));
  return rep;
}

// A priori cap on the shape error under the velocity-driven estimator: from
// monotone estimation energy, |e(t)| can never exceed
//   sqrt(2 |mu - mu_hat(0)|^2 + 2 |v(0)|^2 + |e(0)|^2).
inline double shape_error_bound(const Vec& mu, const Vec& mu_hat0, const Vec& v0, const Vec& e0) {
  return std::sqrt(2.0 * norm_sq(mu - mu_hat0) + 2.0 * norm_sq(v0) + norm_sq(e0));
}

}  // namespace rsl
