#pragma once
// fixtures.hpp -- the handful of concrete formations the tests exercise over
// and over: an equilateral triangle, a regular tetrahedron at a chosen side
// length, the six-agent hexagon, and a five-agent "star" whose two interior
// agents measure every edge.  Kept in one place so every test binary agrees
// on vertex order, edge order and orientation.

#include <cmath>

#include "rsl/graph.hpp"
#include "rsl/rng.hpp"

namespace fix {

// Equilateral triangle with unit sides.  Edge k's tail is the agent that
// measures that edge: agent 2 measures towards 1 and 3, agent 3 towards 1.
inline rsl::FormationGraph triangle_graph() {
  return rsl::FormationGraph(3, {{1, 0}, {1, 2}, {2, 0}});
}

inline rsl::Vec triangle_positions() {
  return {0.0, 0.0, 1.0, 0.0, 0.5, std::sqrt(3.0) / 2.0};
}

// Same triangle wired as a directed cycle 1->2->3->1; used where edge
// orientation changes the closed loop's properties.
inline rsl::FormationGraph triangle_cycle_graph() {
  return rsl::FormationGraph(3, {{0, 1}, {1, 2}, {2, 0}});
}

// Regular tetrahedron with the given side length: agents 1-3 on a circle of
// radius side/sqrt(3) in the z = 0 plane, agent 4 above their centroid.
inline rsl::Vec tetra_positions(double side) {
  const double apex = side * std::sqrt(2.0 / 3.0);
  const double ring = side / std::sqrt(3.0);
  rsl::Vec p(12, 0.0);
  for (int i = 0; i < 3; ++i) {
    const double th = 2.0 * M_PI * i / 3.0;
    p[i * 3 + 0] = ring * std::cos(th);
    p[i * 3 + 1] = ring * std::sin(th);
  }
  p[11] = apex;
  return p;
}

// Tetrahedron wiring used by the estimator runs: the triangle above plus
// agent 4 measured from every base agent.
inline rsl::FormationGraph tetra_graph() {
  return rsl::FormationGraph(4, {{1, 0}, {1, 2}, {2, 0}, {0, 3}, {2, 3}, {1, 3}});
}

// Tetrahedron wiring used by the steady-motion runs; the first base edge
// runs 1->2 so the base cycle is consistently oriented.
inline rsl::FormationGraph tetra_motion_graph() {
  return rsl::FormationGraph(4, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {2, 3}, {1, 3}});
}

// Six agents on a hexagon of side 50 with a nine-edge minimally rigid
// triangulation.  Agent 5 is the head of three edges, which matters for the
// estimator-gain stability check.
inline rsl::FormationGraph hexagon_graph() {
  return rsl::FormationGraph(6, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {2, 4}, {1, 4}, {3, 4}, {3, 5}, {4, 5}});
}

inline rsl::Vec hexagon_positions() {
  const double s3 = std::sqrt(3.0);
  return {-50.0, 0.0,        -25.0, -25.0 * s3, -25.0, 25.0 * s3,
          25.0,  25.0 * s3,  25.0,  -25.0 * s3, 50.0,  0.0};
}

// Five agents, seven edges (= 2n - 3): the unit triangle plus two outriders,
// all seven edges measured by agents 2 and 3.  The one edge joining the two
// measuring agents is the interesting one -- their estimators interact over
// it, so its distance error is only bounded, not driven to zero.
inline rsl::FormationGraph star_graph() {
  return rsl::FormationGraph(5, {{1, 0}, {1, 2}, {2, 0}, {1, 3}, {2, 3}, {1, 4}, {2, 4}});
}

inline rsl::Vec star_positions() {
  const double s3 = std::sqrt(3.0);
  return {0.0, 0.0, 1.0, 0.0, 0.5, s3 / 2.0, 1.5, s3 / 2.0, 1.1, -0.8};
}

// Dense random matrix with entries uniform in [-1, 1).
inline rsl::Mat random_matrix(rsl::SplitMix64& rng, int rows, int cols) {
  rsl::Mat a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  return a;
}

inline rsl::Vec random_vector(rsl::SplitMix64& rng, int n, double lo = -1.0, double hi = 1.0) {
  rsl::Vec x(n);
  for (double& v : x) v = rng.uniform(lo, hi);
  return x;
}

}  // namespace fix
