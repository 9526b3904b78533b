#pragma once
// motion.hpp -- designing steady collective motions from per-edge biases.
//
// A constant bias pattern on the measured squared-distance errors does not
// merely distort the shape: chosen carefully, it makes the whole formation
// translate and/or rotate as a rigid body at constant body-frame velocity.
// This header solves the design problem in the body frame of the target
// shape: characterize which bias pairs (mu on the tails, mu_tilde on the
// heads) produce pure translations or pure rotations, assemble the resulting
// controller weights, and check the spectral condition the estimating
// variant needs.
//
// Everything is driven by the transfer matrix T, the linear map from stacked
// bias pairs to the steady velocity field they induce on the agents.

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "rsl/control.hpp"
#include "rsl/graph.hpp"
#include "rsl/linalg.hpp"
#include "rsl/mat.hpp"

namespace rsl {

namespace detail {

inline void require_zstar(const ShapeSpec& shape, const char* who) {
  if (!shape.has_zstar())
    throw PreconditionError(std::string(who) + ": shape does not carry desired relative positions");
}

// (B^T kron I_m) as an explicit matrix; small sizes only.
inline Mat incidence_t_bar(const FormationGraph& g, int m) {
  return kron_identity(g.incidence().t(), m);
}

}  // namespace detail

// Map from stacked bias pairs (mu; mu_tilde) to the steady velocity field
// they induce at the target shape:
//   T = [ (S1 kron I_m) D_z* , -(S2 kron I_m) D_z* ],   nm x 2|E|.
// Column k pushes the tail agent of edge k along z*_k; column |E|+k pushes
// the head agent along z*_k.
inline Mat transfer_matrix(const FormationGraph& g, const ShapeSpec& shape) {
  detail::require_zstar(shape, "transfer_matrix");
  const Mat d = stacked_diag(shape.zstar, shape.m);
  const Mat t1 = kron_identity(g.tail_part(), shape.m) * d;
  const Mat t2 = kron_identity(g.head_part(), shape.m) * d;
  return hcat(t1, -1.0 * t2);
}

// Bias pairs that drive a steady pure translation: the velocity field must
// have zero spread across every edge, i.e. lie in Ker (B^T kron I_m) after
// the transfer.  Vectors that produce no motion at all (Ker T) are projected
// out so the basis only contains patterns that actually move the formation.
inline Subspace translational_basis(const FormationGraph& g, const ShapeSpec& shape,
                                    double tol = 1e-9) {
  const Mat t = transfer_matrix(g, shape);
  const Subspace ker_t = null_space(t, tol);
  const Subspace candidates = null_space(detail::incidence_t_bar(g, shape.m) * t, tol);
  if (candidates.dim() == 0) return Subspace{Mat(t.cols(), 0)};
  Mat resid = candidates.basis;
  for (int j = 0; j < resid.cols(); ++j) {
    const Vec col = resid.col(j);
    const Vec proj = project_onto(ker_t, col);
    for (int i = 0; i < resid.rows(); ++i) resid(i, j) = col[i] - proj[i];
  }
  return column_space(resid, tol);
}

// Bias pairs that drive a steady rigid rotation (or any distance-preserving
// steady motion that is not a translation): the induced velocity field must
// keep every |z_k| constant, i.e. lie in Ker D_z*^T (B^T kron I_m) T, with
// the translational directions projected out.
inline Subspace rotational_basis(const FormationGraph& g, const ShapeSpec& shape,
                                 double tol = 1e-9) {
  const Mat t = transfer_matrix(g, shape);
  const Mat dt = stacked_diag(shape.zstar, shape.m).t();
  const Subspace candidates = null_space(dt * detail::incidence_t_bar(g, shape.m) * t, tol);
  if (candidates.dim() == 0) return Subspace{Mat(t.cols(), 0)};
  const Subspace u = translational_basis(g, shape, tol);
  Mat resid = candidates.basis;
  for (int j = 0; j < resid.cols(); ++j) {
    const Vec col = resid.col(j);
    const Vec proj = project_onto(u, col);
    for (int i = 0; i < resid.rows(); ++i) resid(i, j) = col[i] - proj[i];
  }
  return column_space(resid, tol);
}

// Controller weights realizing the bias pair (mu, mu_tilde):
//   a_v(tail(k), k) = mu_k,  a_v(head(k), k) = mu_tilde_k,
//   a_a = a_v B^T a_v,  a = c1 a_v + a_a.
// a_v steers each agent along its incident edges to build the velocity
// field; a_a is the acceleration that field induces on itself, fed forward
// so the loop can hold it.
inline MotionParams assemble_motion(const FormationGraph& g, const Vec& mu, const Vec& mu_tilde,
                                    double c1, double c2) {
  if (static_cast<int>(mu.size()) != g.edge_count() ||
      static_cast<int>(mu_tilde.size()) != g.edge_count())
    throw InvalidInput("assemble_motion: bias vectors have wrong length");
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw InvalidInput("assemble_motion: gains must be positive");
  MotionParams mp;
  mp.c1 = c1;
  mp.c2 = c2;
  mp.a_v = Mat(g.n(), g.edge_count());
  for (int k = 0; k < g.edge_count(); ++k) {
    mp.a_v(g.tail(k), k) = mu[k];
    mp.a_v(g.head(k), k) = mu_tilde[k];
  }
  mp.a_a = mp.a_v * g.incidence().t() * mp.a_v;
  mp.a = mp.a_a + mp.c1 * mp.a_v;
  return mp;
}

// The velocity field the weights hold at the target shape, v*_i = sum_k
// a_v(i,k) z*_k.  Useful both for reporting and for the velocity-error form
// of the motion law.
inline Vec steady_velocity(const ShapeSpec& shape, const MotionParams& mp) {
  detail::require_zstar(shape, "steady_velocity");
  return edge_weighted_sum(mp.a_v, shape.m, shape.zstar);
}

// Agent positions consistent with the desired relative positions, centroid
// at the origin: the minimum-norm solution of (B^T kron I_m) p = z*.
inline Vec body_positions(const FormationGraph& g, const ShapeSpec& shape) {
  detail::require_zstar(shape, "body_positions");
  return least_squares(detail::incidence_t_bar(g, shape.m), shape.zstar);
}

struct AssumptionReport {
  bool hurwitz = false;
  double max_real = 0.0;
  std::vector<std::complex<double>> spectrum;
};

// Spectral condition for the measurement-driven estimator: the shape/speed
// block of the closed loop linearized at the target shape,
//   F = [ -I_nm            -(S2 kron I_m) D_z* ]
//       [ 2 D_z*^T (B^T kron I_m)      0       ],
// must be Hurwitz.  This fails structurally whenever some agent heads more
// than m edges: the head columns of that agent are m-vectors, so three of
// them in the plane (say) are dependent and F gains a kernel no matter what
// the shape looks like.
inline AssumptionReport check_assumption1(const FormationGraph& g, const ShapeSpec& shape,
                                          double tol = 1e-8) {
  detail::require_zstar(shape, "check_assumption1");
  const int nm = g.n() * shape.m;
  const int ec = g.edge_count();
  const Mat d = stacked_diag(shape.zstar, shape.m);
  Mat f(nm + ec, nm + ec);
  f.set_block(0, 0, -1.0 * Mat::identity(nm));
  f.set_block(0, nm, -1.0 * (kron_identity(g.head_part(), shape.m) * d));
  f.set_block(nm, 0, 2.0 * (d.t() * detail::incidence_t_bar(g, shape.m)));
  AssumptionReport rep;
  rep.spectrum = eigenvalues(f);
  rep.max_real = rep.spectrum.front().real();
  for (const auto& ev : rep.spectrum) rep.max_real = std::max(rep.max_real, ev.real());
  rep.hurwitz = rep.max_real < -tol;
  return rep;
}

struct MotionFit {
  Vec mu;        // tail biases
  Vec mu_tilde;  // head biases
  double residual = 0.0;  // relative velocity-field mismatch
};

// Reverse design: given a target body-frame centroid velocity and angular
// velocity (a scalar in the plane, a 3-vector in space), find the bias pair
// whose steady field best matches v_i = v_c + omega x p_i over the
// centroid-centred body positions.  Least squares over the translational and
// rotational basis coefficients.
inline MotionFit fit_motion_params(const FormationGraph& g, const ShapeSpec& shape, const Vec& v_c,
                                   const Vec& omega, double tol = 1e-9) {
  detail::require_zstar(shape, "fit_motion_params");
  const int m = shape.m;
  if (static_cast<int>(v_c.size()) != m)
    throw InvalidInput("fit_motion_params: v_c has wrong length");
  if (static_cast<int>(omega.size()) != (m == 2 ? 1 : 3))
    throw InvalidInput("fit_motion_params: omega has wrong length");
  const Vec bp = body_positions(g, shape);
  Vec field(static_cast<std::size_t>(g.n()) * m);
  for (int i = 0; i < g.n(); ++i) {
    const Vec q = segment(bp, static_cast<std::size_t>(i) * m, m);
    if (m == 2) {
      field[i * 2 + 0] = v_c[0] - omega[0] * q[1];
      field[i * 2 + 1] = v_c[1] + omega[0] * q[0];
    } else {
      field[i * 3 + 0] = v_c[0] + omega[1] * q[2] - omega[2] * q[1];
      field[i * 3 + 1] = v_c[1] + omega[2] * q[0] - omega[0] * q[2];
      field[i * 3 + 2] = v_c[2] + omega[0] * q[1] - omega[1] * q[0];
    }
  }
  const Subspace u = translational_basis(g, shape, tol);
  const Subspace w = rotational_basis(g, shape, tol);
  if (u.dim() + w.dim() == 0)
    throw PreconditionError("fit_motion_params: shape admits no steady motions");
  const Mat basis = hcat(u.basis, w.basis);
  const Mat map = transfer_matrix(g, shape) * basis;
  const Vec coef = least_squares(map, field, tol);
  const Vec pair = basis * coef;
  MotionFit fit;
  fit.mu = segment(pair, 0, g.edge_count());
  fit.mu_tilde = segment(pair, g.edge_count(), g.edge_count());
  const double fn = norm(field);
  fit.residual = fn > 0.0 ? norm(map * coef - field) / fn : 0.0;
  return fit;
}

// Relative distance from x to the span of the given basis columns (joined
// with any `modulo` directions that should not count against membership).
inline double membership_residual(const Subspace& sub, const Vec& x,
                                  const Subspace& modulo = Subspace{}) {
  Mat basis = sub.basis;
  if (modulo.dim() > 0) basis = hcat(basis, modulo.basis);
  const double xn = norm(x);
  if (xn == 0.0) return 0.0;
  if (basis.cols() == 0) return 1.0;
  const Vec coef = least_squares(basis, x);
  return norm(basis * coef - x) / xn;
}

}  // namespace rsl
