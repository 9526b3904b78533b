#pragma once
// control.hpp -- distance-based formation control laws for double-integrator
// agents.
//
// Every law below shares one skeleton: agent i steers along the relative
// positions z_k of its incident edges, each edge weighted by its squared
// distance error e_k = |z_k|^2 - d_k^2 (plus per-edge bias weights in the
// mismatched and estimating variants).  The tail agent of an edge is the one
// whose range measurement carries the bias mu_k, so it only ever sees the
// sum e_k + mu_k; the head agent measures e_k cleanly.  Estimating variants
// let the tail agent learn its own bias online.
//
// State stacking is agent-major: p and v hold n blocks of m coordinates;
// estimator states hold one scalar per edge.

#include <cstddef>
#include <string>
#include <vector>

#include "rsl/graph.hpp"
#include "rsl/mat.hpp"

namespace rsl {

namespace detail {

// e_k = |z_k|^2 - d_k^2 from already-computed relative positions.
inline Vec errors_from_z(const ShapeSpec& shape, const Vec& z) {
  const int cnt = static_cast<int>(z.size()) / shape.m;
  Vec e(cnt);
  for (int k = 0; k < cnt; ++k)
    e[k] = norm_sq(segment(z, static_cast<std::size_t>(k) * shape.m, shape.m)) -
           shape.dist[k] * shape.dist[k];
  return e;
}

inline void check_state_pair(const FormationGraph& g, int m, const Vec& p, const Vec& v,
                             const char* who) {
  if (static_cast<int>(p.size()) != g.n() * m || v.size() != p.size())
    throw InvalidInput(std::string(who) + ": p/v have wrong length");
}

inline void check_edge_vector(const FormationGraph& g, const Vec& w, const char* who) {
  if (static_cast<int>(w.size()) != g.edge_count())
    throw InvalidInput(std::string(who) + ": per-edge vector has wrong length");
}

}  // namespace detail

// u_i = sum_k a(i,k) z_k: apply an n x |E| edge-weight matrix to stacked edge
// vectors, producing one m-vector per agent.  This is (A kron I_m) z without
// materializing the Kronecker product.
inline Vec edge_weighted_sum(const Mat& a, int m, const Vec& z) {
  if (static_cast<int>(z.size()) != a.cols() * m)
    throw InvalidInput("edge_weighted_sum: z has wrong length");
  Vec u(static_cast<std::size_t>(a.rows()) * m, 0.0);
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double w = a(i, k);
      if (w == 0.0) continue;
      for (int d = 0; d < m; ++d)
        u[static_cast<std::size_t>(i) * m + d] += w * z[static_cast<std::size_t>(k) * m + d];
    }
  return u;
}

// Per-edge tail-weight matrix: entry (tail(k), k) holds w_k, everything else
// zero.  Applying it to z reproduces the stacked tail-side bias forces, which
// is how a constant mismatch acts like a formation-level steering term.
inline Mat build_A1(const FormationGraph& g, const Vec& w) {
  detail::check_edge_vector(g, w, "build_A1");
  Mat a1(g.n(), g.edge_count());
  for (int k = 0; k < g.edge_count(); ++k) a1(g.tail(k), k) = w[k];
  return a1;
}

// Plain shape stabilizer: u = -v - sum_k (B kron I_m) z_k e_k.  Damped
// gradient descent on the quartic edge potential.
inline Vec gradient_control(const FormationGraph& g, const ShapeSpec& shape, const Vec& p,
                            const Vec& v) {
  const int m = shape.m;
  detail::check_state_pair(g, m, p, v, "gradient_control");
  const Vec z = relative_positions(g, m, p);
  const Vec e = detail::errors_from_z(shape, z);
  Vec u = -1.0 * v;
  for (int k = 0; k < g.edge_count(); ++k)
    for (int d = 0; d < m; ++d) {
      const double f = e[k] * z[static_cast<std::size_t>(k) * m + d];
      u[static_cast<std::size_t>(g.tail(k)) * m + d] -= f;
      u[static_cast<std::size_t>(g.head(k)) * m + d] += f;
    }
  return u;
}

struct SecondOrderRhs {
  Vec pdot;
  Vec vdot;
};

// One-parameter blend between the damped gradient flow (lambda = 0) and a
// first-order shape flow with filtered velocity (lambda = 1):
//   pdot = (1-lambda) v - lambda g,   vdot = -(1-lambda) g - v,
// where g is the stacked edge-potential gradient.  All members dissipate the
// same potential, so their equilibria share stability properties.
inline SecondOrderRhs hamiltonian_family_rhs(const FormationGraph& g, const ShapeSpec& shape,
                                             double lambda, const Vec& p, const Vec& v) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw InvalidInput("hamiltonian_family_rhs: lambda must lie in [0, 1]");
  const int m = shape.m;
  detail::check_state_pair(g, m, p, v, "hamiltonian_family_rhs");
  const Vec z = relative_positions(g, m, p);
  const Vec e = detail::errors_from_z(shape, z);
  Vec grad(p.size(), 0.0);
  for (int k = 0; k < g.edge_count(); ++k)
    for (int d = 0; d < m; ++d) {
      const double f = e[k] * z[static_cast<std::size_t>(k) * m + d];
      grad[static_cast<std::size_t>(g.tail(k)) * m + d] += f;
      grad[static_cast<std::size_t>(g.head(k)) * m + d] -= f;
    }
  SecondOrderRhs rhs;
  rhs.pdot = ((1.0 - lambda) * v) - (lambda * grad);
  rhs.vdot = (-(1.0 - lambda)) * grad - v;
  return rhs;
}

// Shape stabilizer with uncorrected measurement biases: every tail agent
// substitutes e_k + mu_k for e_k.  Steady states are distorted shapes in
// collective motion rather than the desired one at rest.
inline Vec mismatched_control(const FormationGraph& g, const ShapeSpec& shape, const Vec& mu,
                              const Vec& p, const Vec& v) {
  const int m = shape.m;
  detail::check_state_pair(g, m, p, v, "mismatched_control");
  detail::check_edge_vector(g, mu, "mismatched_control");
  const Vec z = relative_positions(g, m, p);
  const Vec e = detail::errors_from_z(shape, z);
  Vec u = -1.0 * v;
  for (int k = 0; k < g.edge_count(); ++k)
    for (int d = 0; d < m; ++d) {
      const double zd = z[static_cast<std::size_t>(k) * m + d];
      u[static_cast<std::size_t>(g.tail(k)) * m + d] -= (e[k] + mu[k]) * zd;
      u[static_cast<std::size_t>(g.head(k)) * m + d] += e[k] * zd;
    }
  return u;
}

struct EstimatorRhs {
  Vec u;           // stacked accelerations
  Vec mu_hat_dot;  // per-edge estimator rates
};

// Bias-compensated stabilizer, velocity-driven estimator: each tail agent
// subtracts its current estimate from the biased measurement and adapts the
// estimate against the component of its own velocity along the edge,
//   mu_hat_dot_k = -z_k . v_tail(k).
// Dissipation of the shape/speed/estimation energy pins the minus sign.
inline EstimatorRhs estimator1_rhs(const FormationGraph& g, const ShapeSpec& shape, const Vec& mu,
                                   const Vec& p, const Vec& v, const Vec& mu_hat) {
  const int m = shape.m;
  detail::check_state_pair(g, m, p, v, "estimator1_rhs");
  detail::check_edge_vector(g, mu, "estimator1_rhs");
  detail::check_edge_vector(g, mu_hat, "estimator1_rhs");
  const Vec z = relative_positions(g, m, p);
  const Vec e = detail::errors_from_z(shape, z);
  EstimatorRhs rhs;
  rhs.u = -1.0 * v;
  rhs.mu_hat_dot.assign(mu.size(), 0.0);
  for (int k = 0; k < g.edge_count(); ++k) {
    const double biased = e[k] + mu[k];  // all a tail agent can measure
    double along = 0.0;
    for (int d = 0; d < m; ++d) {
      const double zd = z[static_cast<std::size_t>(k) * m + d];
      rhs.u[static_cast<std::size_t>(g.tail(k)) * m + d] -= (biased - mu_hat[k]) * zd;
      rhs.u[static_cast<std::size_t>(g.head(k)) * m + d] += e[k] * zd;
      along += zd * v[static_cast<std::size_t>(g.tail(k)) * m + d];
    }
    rhs.mu_hat_dot[k] = -along;
  }
  return rhs;
}

// Bias-compensated stabilizer, measurement-driven estimator: the tail agent
// low-pass tracks its own biased measurement,
//   mu_hat_dot_k = kappa (e_k + mu_k - mu_hat_k).
// Converges exactly when the shape's bias-free loop is exponentially stable.
inline EstimatorRhs estimator2_rhs(const FormationGraph& g, const ShapeSpec& shape, const Vec& mu,
                                   double kappa, const Vec& p, const Vec& v, const Vec& mu_hat) {
  if (!(kappa > 0.0)) throw InvalidInput("estimator2_rhs: kappa must be positive");
  const int m = shape.m;
  detail::check_state_pair(g, m, p, v, "estimator2_rhs");
  detail::check_edge_vector(g, mu, "estimator2_rhs");
  detail::check_edge_vector(g, mu_hat, "estimator2_rhs");
  const Vec z = relative_positions(g, m, p);
  const Vec e = detail::errors_from_z(shape, z);
  EstimatorRhs rhs;
  rhs.u = -1.0 * v;
  rhs.mu_hat_dot.assign(mu.size(), 0.0);
  for (int k = 0; k < g.edge_count(); ++k) {
    const double biased = e[k] + mu[k];
    for (int d = 0; d < m; ++d) {
      const double zd = z[static_cast<std::size_t>(k) * m + d];
      rhs.u[static_cast<std::size_t>(g.tail(k)) * m + d] -= (biased - mu_hat[k]) * zd;
      rhs.u[static_cast<std::size_t>(g.head(k)) * m + d] += e[k] * zd;
    }
    rhs.mu_hat_dot[k] = kappa * (biased - mu_hat[k]);
  }
  return rhs;
}

// Designed steady-motion weights.  a_v turns relative positions into the
// velocity field the formation should settle on; a_a = a_v B^T a_v supplies
// the matching feed-forward acceleration; a = c1 a_v + a_a is what the
// control law applies.
struct MotionParams {
  double c1 = 1.0;
  double c2 = 1.0;
  Mat a_v;
  Mat a_a;
  Mat a;
};

// Shape stabilizer with velocity and acceleration feed-forward:
//   u = -c1 v - c2 (B kron I_m) D_z e + (A kron I_m) z.
// With bias weights designed off the target shape, the closed loop settles
// on a rigid collective motion instead of a rest shape.
inline Vec motion_control(const FormationGraph& g, const ShapeSpec& shape,
                          const MotionParams& mp, const Vec& p, const Vec& v) {
  const int m = shape.m;
  detail::check_state_pair(g, m, p, v, "motion_control");
  if (mp.a.rows() != g.n() || mp.a.cols() != g.edge_count())
    throw InvalidInput("motion_control: weight matrix has wrong shape");
  const Vec z = relative_positions(g, m, p);
  const Vec e = detail::errors_from_z(shape, z);
  Vec u = edge_weighted_sum(mp.a, m, z);
  axpy(-mp.c1, v, u);
  for (int k = 0; k < g.edge_count(); ++k)
    for (int d = 0; d < m; ++d) {
      const double f = mp.c2 * e[k] * z[static_cast<std::size_t>(k) * m + d];
      u[static_cast<std::size_t>(g.tail(k)) * m + d] -= f;
      u[static_cast<std::size_t>(g.head(k)) * m + d] += f;
    }
  return u;
}

// Quartic potential of a single edge, V_k = e_k^2 / 4, and its gradient with
// respect to the stacked positions (e_k z_k at the tail, the negative at the
// head).
inline double edge_potential(const FormationGraph& g, const ShapeSpec& shape, int k,
                             const Vec& p) {
  const Vec e = distance_errors(g, shape, p);
  if (k < 0 || k >= g.edge_count()) throw InvalidInput("edge_potential: edge out of range");
  return 0.25 * e[k] * e[k];
}

inline Vec edge_potential_gradient(const FormationGraph& g, const ShapeSpec& shape, int k,
                                   const Vec& p) {
  if (k < 0 || k >= g.edge_count())
    throw InvalidInput("edge_potential_gradient: edge out of range");
  const int m = shape.m;
  const Vec z = relative_positions(g, m, p);
  const Vec e = detail::errors_from_z(shape, z);
  Vec grad(p.size(), 0.0);
  for (int d = 0; d < m; ++d) {
    const double f = e[k] * z[static_cast<std::size_t>(k) * m + d];
    grad[static_cast<std::size_t>(g.tail(k)) * m + d] += f;
    grad[static_cast<std::size_t>(g.head(k)) * m + d] -= f;
  }
  return grad;
}

// Kinetic plus shape energy, phi = 1/2 |v|^2 + 1/4 |e|^2.  Non-increasing
// along the gradient law and the whole blended family.
inline double formation_potential(const FormationGraph& g, const ShapeSpec& shape, const Vec& p,
                                  const Vec& v) {
  const Vec e = distance_errors(g, shape, p);
  return 0.5 * norm_sq(v) + 0.25 * norm_sq(e);
}

enum class ControlLaw {
  gradient,
  hamiltonian,
  mismatched,
  estimator1,
  estimator2,
  motion,
};

// A configured control law plus everything needed to evaluate the full
// closed-loop state derivative.  The state layout is [p; v] with the
// per-edge estimates appended when the law tracks them.  The blended family
// owns pdot itself (it is not v there); every other law is a genuine double
// integrator.
struct Controller {
  ControlLaw law = ControlLaw::gradient;
  double lambda = 0.0;  // blend weight, law == hamiltonian
  Vec mu;               // true per-edge biases (mismatched/estimating laws)
  double kappa = 1.0;   // estimator gain, law == estimator2
  MotionParams motion;  // designed weights, law == motion

  bool tracks_estimate() const {
    return law == ControlLaw::estimator1 || law == ControlLaw::estimator2;
  }

  int state_size(const FormationGraph& g, int m) const {
    return 2 * g.n() * m + (tracks_estimate() ? g.edge_count() : 0);
  }

  Vec derivative(const FormationGraph& g, const ShapeSpec& shape, const Vec& x) const {
    const int nm = g.n() * shape.m;
    if (static_cast<int>(x.size()) != state_size(g, shape.m))
      throw InvalidInput("Controller: state has wrong length");
    const Vec p = segment(x, 0, nm);
    const Vec v = segment(x, nm, nm);
    switch (law) {
      case ControlLaw::gradient:
        return concat(v, gradient_control(g, shape, p, v));
      case ControlLaw::hamiltonian: {
        const SecondOrderRhs rhs = hamiltonian_family_rhs(g, shape, lambda, p, v);
        return concat(rhs.pdot, rhs.vdot);
      }
      case ControlLaw::mismatched:
        return concat(v, mismatched_control(g, shape, mu, p, v));
      case ControlLaw::estimator1: {
        const Vec mu_hat = segment(x, 2 * static_cast<std::size_t>(nm), g.edge_count());
        const EstimatorRhs rhs = estimator1_rhs(g, shape, mu, p, v, mu_hat);
        return concat(concat(v, rhs.u), rhs.mu_hat_dot);
      }
      case ControlLaw::estimator2: {
        const Vec mu_hat = segment(x, 2 * static_cast<std::size_t>(nm), g.edge_count());
        const EstimatorRhs rhs = estimator2_rhs(g, shape, mu, kappa, p, v, mu_hat);
        return concat(concat(v, rhs.u), rhs.mu_hat_dot);
      }
      case ControlLaw::motion:
        return concat(v, motion_control(g, shape, motion, p, v));
    }
    throw InvalidInput("Controller: unknown law");
  }
};

// Stack initial conditions in the layout Controller::derivative expects.
inline Vec pack_state(const Controller& ctl, const FormationGraph& g, int m, const Vec& p0,
                      const Vec& v0, const Vec& mu_hat0 = {}) {
  detail::check_state_pair(g, m, p0, v0, "pack_state");
  Vec x = concat(p0, v0);
  if (ctl.tracks_estimate()) {
    if (mu_hat0.empty()) {
      x.resize(x.size() + static_cast<std::size_t>(g.edge_count()), 0.0);
    } else {
      detail::check_edge_vector(g, mu_hat0, "pack_state");
      x = concat(x, mu_hat0);
    }
  } else if (!mu_hat0.empty()) {
    throw InvalidInput("pack_state: law does not track estimates");
  }
  return x;
}

}  // namespace rsl
