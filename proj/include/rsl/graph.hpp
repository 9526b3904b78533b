#pragma once
// graph.hpp -- formation graphs, desired shapes, and rigidity tests.
//
// Conventions used throughout the library:
//   * vertices are 0-based; an edge k is an ordered pair (tail, head);
//   * the incidence matrix B (n x |E|) has b_ik = +1 when i is the tail of
//     edge k and -1 when i is the head;
//   * S1 keeps only the +1 entries of B, S2 := B - S1 keeps the -1s;
//   * z = (B^T ⊗ I_m) p stacks the relative positions z_k = p_tail - p_head;
//   * the rigidity matrix is R(z) = D_z^T (B^T ⊗ I_m), one row per edge.

#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "rsl/linalg.hpp"
#include "rsl/mat.hpp"

namespace rsl {

struct Edge {
  int tail = 0;
  int head = 0;
};

class FormationGraph {
 public:
  FormationGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 2) throw InvalidInput("FormationGraph: need at least two agents");
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const Edge& e = edges_[k];
      if (e.tail < 0 || e.tail >= n_ || e.head < 0 || e.head >= n_)
        throw InvalidInput("FormationGraph: edge " + std::to_string(k + 1) + " references a vertex out of range");
      if (e.tail == e.head)
        throw InvalidInput("FormationGraph: edge " + std::to_string(k + 1) + " is a self-loop");
      for (std::size_t j = 0; j < k; ++j) {
        const Edge& f = edges_[j];
        if ((f.tail == e.tail && f.head == e.head) || (f.tail == e.head && f.head == e.tail))
          throw InvalidInput("FormationGraph: edges " + std::to_string(j + 1) + " and " +
                             std::to_string(k + 1) + " connect the same pair");
      }
    }
    const int ec = edge_count();
    b_ = Mat(n_, ec);
    s1_ = Mat(n_, ec);
    for (int k = 0; k < ec; ++k) {
      b_(edges_[k].tail, k) = 1.0;
      b_(edges_[k].head, k) = -1.0;
      s1_(edges_[k].tail, k) = 1.0;
    }
    s2_ = b_ - s1_;
  }

  int n() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  int tail(int k) const { return edges_[k].tail; }
  int head(int k) const { return edges_[k].head; }

  const Mat& incidence() const { return b_; }  // B
  const Mat& tail_part() const { return s1_; } // S1: +1 entries of B
  const Mat& head_part() const { return s2_; } // S2 = B - S1

 private:
  int n_;
  std::vector<Edge> edges_;
  Mat b_, s1_, s2_;
};

// Desired shape: ambient dimension, target inter-agent distances, and (when
// known) the desired relative positions z*.  Operations that only need
// distances work without z*; the rigidity and motion-design machinery
// requires it.
struct ShapeSpec {
  int m = 0;   // ambient dimension, 2 or 3
  Vec zstar;   // stacked desired relative positions (may be empty)
  Vec dist;    // desired distance per edge

  bool has_zstar() const { return !zstar.empty(); }

  static ShapeSpec from_positions(const FormationGraph& g, int m, const Vec& pstar);
  static ShapeSpec from_zstar(const FormationGraph& g, int m, Vec zstar);
  static ShapeSpec from_distances(const FormationGraph& g, int m, Vec dist);
};

namespace detail {
inline void check_dim(int m) {
  if (m != 2 && m != 3) throw InvalidInput("ambient dimension must be 2 or 3");
}
}  // namespace detail

// z = (B^T ⊗ I_m) p: stacked relative positions, z_k = p_tail - p_head.
inline Vec relative_positions(const FormationGraph& g, int m, const Vec& p) {
  detail::check_dim(m);
  if (static_cast<int>(p.size()) != g.n() * m)
    throw InvalidInput("relative_positions: p has wrong length");
  Vec z(static_cast<std::size_t>(g.edge_count()) * m);
  for (int k = 0; k < g.edge_count(); ++k)
    for (int d = 0; d < m; ++d)
      z[static_cast<std::size_t>(k) * m + d] =
          p[static_cast<std::size_t>(g.tail(k)) * m + d] - p[static_cast<std::size_t>(g.head(k)) * m + d];
  return z;
}

inline ShapeSpec ShapeSpec::from_zstar(const FormationGraph& g, int m, Vec zstar) {
  detail::check_dim(m);
  if (static_cast<int>(zstar.size()) != g.edge_count() * m)
    throw InvalidInput("ShapeSpec: z* has wrong length");
  if (!all_finite(zstar)) throw InvalidInput("ShapeSpec: z* has non-finite entries");
  ShapeSpec s;
  s.m = m;
  s.dist.resize(g.edge_count());
  for (int k = 0; k < g.edge_count(); ++k) {
    s.dist[k] = norm(segment(zstar, static_cast<std::size_t>(k) * m, m));
    if (s.dist[k] <= 0.0) throw InvalidInput("ShapeSpec: edge " + std::to_string(k + 1) + " has zero length");
  }
  s.zstar = std::move(zstar);
  return s;
}

inline ShapeSpec ShapeSpec::from_positions(const FormationGraph& g, int m, const Vec& pstar) {
  return from_zstar(g, m, relative_positions(g, m, pstar));
}

inline ShapeSpec ShapeSpec::from_distances(const FormationGraph& g, int m, Vec dist) {
  detail::check_dim(m);
  if (static_cast<int>(dist.size()) != g.edge_count())
    throw InvalidInput("ShapeSpec: distance list has wrong length");
  for (double d : dist)
    if (!(d > 0.0)) throw InvalidInput("ShapeSpec: distances must be positive");
  ShapeSpec s;
  s.m = m;
  s.dist = std::move(dist);
  return s;
}

// Squared-distance errors e_k = |z_k|^2 - d_k^2 for the positions p.
inline Vec distance_errors(const FormationGraph& g, const ShapeSpec& shape, const Vec& p) {
  const Vec z = relative_positions(g, shape.m, p);
  Vec e(g.edge_count());
  for (int k = 0; k < g.edge_count(); ++k)
    e[k] = norm_sq(segment(z, static_cast<std::size_t>(k) * shape.m, shape.m)) - shape.dist[k] * shape.dist[k];
  return e;
}

// Rigidity matrix R(z) = D_z^T (B^T ⊗ I_m), |E| x nm.  Row k carries z_k^T in
// the tail(k) block of columns and -z_k^T in the head(k) block.
inline Mat rigidity_matrix(const FormationGraph& g, int m, const Vec& z) {
  detail::check_dim(m);
  if (static_cast<int>(z.size()) != g.edge_count() * m)
    throw InvalidInput("rigidity_matrix: z has wrong length");
  Mat r(g.edge_count(), g.n() * m);
  for (int k = 0; k < g.edge_count(); ++k)
    for (int d = 0; d < m; ++d) {
      const double zd = z[static_cast<std::size_t>(k) * m + d];
      r(k, g.tail(k) * m + d) = zd;
      r(k, g.head(k) * m + d) = -zd;
    }
  return r;
}

// R(z) R(z)^T: the |E| x |E| stiffness-like product that governs the local
// error dynamics.  Positive definite exactly when R(z) has full row rank.
inline Mat q_matrix(const FormationGraph& g, int m, const Vec& z) {
  const Mat r = rigidity_matrix(g, m, z);
  return r * r.t();
}

struct RigidityReport {
  bool ok = false;
  int rank = 0;           // rank of R(z*)
  int required_rank = 0;  // 2n-3 in the plane, 3n-6 in space
  std::string reason;     // empty when ok
};

// Infinitesimal minimal rigidity of the desired framework: the edge count
// and the rank of R(z*) must both equal 2n-3 (m=2) or 3n-6 (m=3).
inline RigidityReport is_inf_min_rigid(const FormationGraph& g, const ShapeSpec& shape,
                                       double tol = 1e-7) {
  if (!shape.has_zstar())
    throw PreconditionError("is_inf_min_rigid: shape does not carry desired relative positions");
  RigidityReport rep;
  rep.required_rank = shape.m == 2 ? 2 * g.n() - 3 : 3 * g.n() - 6;
  rep.rank = rank(rigidity_matrix(g, shape.m, shape.zstar), tol);
  if (g.edge_count() != rep.required_rank) {
    rep.reason = "not minimally rigid (|E|=" + std::to_string(g.edge_count()) + ", need " +
                 std::to_string(rep.required_rank) + ")";
    return rep;
  }
  if (rep.rank != rep.required_rank) {
    rep.reason = "rigidity matrix rank " + std::to_string(rep.rank) + ", need " +
                 std::to_string(rep.required_rank);
    return rep;
  }
  rep.ok = true;
  return rep;
}

}  // namespace rsl
