#pragma once
// oracles.hpp -- slow, independent reference implementations used only by
// the test suite.  Nothing here shares algorithmic code with the library:
// rank comes from Gaussian elimination with full pivoting, eigenvalues from
// the characteristic polynomial (Faddeev-LeVerrier) and Durand-Kerner root
// finding, least squares from the normal equations.  All of it runs in long
// double / complex<long double>.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rsl/mat.hpp"

namespace oracle {

using LMat = std::vector<std::vector<long double>>;
using CL = std::complex<long double>;

inline LMat to_lmat(const rsl::Mat& a) {
  LMat m(a.rows(), std::vector<long double>(a.cols()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m[i][j] = a(i, j);
  return m;
}

// Numerical rank by Gaussian elimination with full pivoting: eliminate until
// the largest remaining entry falls below rel_tol times the largest entry of
// the original matrix.
inline int ge_rank(const rsl::Mat& a, double rel_tol = 1e-9) {
  LMat m = to_lmat(a);
  const int rows = a.rows(), cols = a.cols();
  long double scale = 0.0L;
  for (const auto& row : m)
    for (long double x : row) scale = std::max(scale, x < 0 ? -x : x);
  if (scale == 0.0L) return 0;
  int r = 0;
  std::vector<int> row_used(rows, 0), col_used(cols, 0);
  while (true) {
    int pi = -1, pj = -1;
    long double best = 0.0L;
    for (int i = 0; i < rows; ++i) {
      if (row_used[i]) continue;
      for (int j = 0; j < cols; ++j) {
        if (col_used[j]) continue;
        const long double v = m[i][j] < 0 ? -m[i][j] : m[i][j];
        if (v > best) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    }
    if (pi < 0 || best <= (long double)rel_tol * scale) break;
    ++r;
    row_used[pi] = 1;
    col_used[pj] = 1;
    for (int i = 0; i < rows; ++i) {
      if (row_used[i] || m[i][pj] == 0.0L) continue;
      const long double f = m[i][pj] / m[pi][pj];
      for (int j = 0; j < cols; ++j)
        if (!col_used[j]) m[i][j] -= f * m[pi][j];
      m[i][pj] = 0.0L;
    }
  }
  return r;
}

// Coefficients of the characteristic polynomial x^n + c[0] x^{n-1} + ... +
// c[n-1], by the Faddeev-LeVerrier recurrence in long double.
inline std::vector<long double> charpoly(const LMat& a) {
  const int n = static_cast<int>(a.size());
  LMat mk(n, std::vector<long double>(n, 0.0L));
  for (int i = 0; i < n; ++i) mk[i][i] = 1.0L;  // M1 = I
  std::vector<long double> c(n);
  for (int k = 1; k <= n; ++k) {
    // AM = A * Mk
    LMat am(n, std::vector<long double>(n, 0.0L));
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        const long double x = a[i][l];
        if (x == 0.0L) continue;
        for (int j = 0; j < n; ++j) am[i][j] += x * mk[l][j];
      }
    long double tr = 0.0L;
    for (int i = 0; i < n; ++i) tr += am[i][i];
    c[k - 1] = -tr / k;
    if (k < n) {
      mk = am;
      for (int i = 0; i < n; ++i) mk[i][i] += c[k - 1];
    }
  }
  return c;
}

inline CL poly_eval(const std::vector<long double>& c, CL x) {
  CL acc(1.0L, 0.0L);
  for (long double ck : c) acc = acc * x + CL(ck, 0.0L);
  return acc;
}

// All roots of the monic polynomial by Durand-Kerner iteration.
inline std::vector<CL> durand_kerner(const std::vector<long double>& c, int max_iter = 2000) {
  const int n = static_cast<int>(c.size());
  if (n == 0) return {};
  long double radius = 0.0L;
  for (long double ck : c) radius = std::max(radius, ck < 0 ? -ck : ck);
  radius = 1.0L + radius;  // Cauchy bound on the root magnitudes
  std::vector<CL> r(n);
  for (int j = 0; j < n; ++j) {
    const long double ang = 2.0L * 3.14159265358979323846L * j / n + 0.35L;
    r[j] = CL(0.6L * radius * std::cos((double)ang), 0.6L * radius * std::sin((double)ang));
  }
  for (int iter = 0; iter < max_iter; ++iter) {
    long double worst = 0.0L;
    for (int j = 0; j < n; ++j) {
      CL denom(1.0L, 0.0L);
      for (int i = 0; i < n; ++i)
        if (i != j) denom *= (r[j] - r[i]);
      if (denom == CL(0.0L, 0.0L)) {
        r[j] += CL(1e-10L * radius, 1e-10L * radius);
        continue;
      }
      const CL delta = poly_eval(c, r[j]) / denom;
      r[j] -= delta;
      worst = std::max(worst, std::abs(delta));
    }
    if (worst < 1e-18L * radius) break;
  }
  return r;
}

// Eigenvalues via the characteristic polynomial.  The matrix is rescaled to
// unit max entry first so the polynomial coefficients stay tame.
inline std::vector<std::complex<double>> charpoly_eigenvalues(const rsl::Mat& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("charpoly_eigenvalues: not square");
  const int n = a.rows();
  if (n == 0) return {};
  double s = a.max_abs();
  if (s == 0.0) return std::vector<std::complex<double>>(n, 0.0);
  LMat m = to_lmat(a);
  for (auto& row : m)
    for (auto& x : row) x /= s;
  const auto roots = durand_kerner(charpoly(m));
  std::vector<std::complex<double>> out;
  out.reserve(n);
  for (const CL& r : roots)
    out.emplace_back(static_cast<double>(r.real() * s), static_cast<double>(r.imag() * s));
  return out;
}

// Largest |p(root)| over all returned roots, on the unit-scaled polynomial;
// a cheap self-check that Durand-Kerner actually converged.
inline double charpoly_residual(const rsl::Mat& a) {
  const int n = a.rows();
  double s = a.max_abs();
  if (n == 0 || s == 0.0) return 0.0;
  LMat m = to_lmat(a);
  for (auto& row : m)
    for (auto& x : row) x /= s;
  const auto c = charpoly(m);
  const auto roots = durand_kerner(c);
  long double worst = 0.0L;
  for (const CL& r : roots) worst = std::max(worst, std::abs(poly_eval(c, r)));
  return static_cast<double>(worst);
}

// Least squares via the normal equations, long double Gaussian elimination
// with partial pivoting.  Only for comfortably full-rank systems.
inline rsl::Vec lsq_normal_equations(const rsl::Mat& a, const rsl::Vec& b) {
  const int rows = a.rows(), cols = a.cols();
  if (static_cast<int>(b.size()) != rows) throw std::invalid_argument("lsq oracle: size mismatch");
  LMat g(cols, std::vector<long double>(cols + 1, 0.0L));  // [A^T A | A^T b]
  for (int i = 0; i < cols; ++i) {
    for (int j = 0; j < cols; ++j) {
      long double s = 0.0L;
      for (int k = 0; k < rows; ++k) s += (long double)a(k, i) * a(k, j);
      g[i][j] = s;
    }
    long double s = 0.0L;
    for (int k = 0; k < rows; ++k) s += (long double)a(k, i) * b[k];
    g[i][cols] = s;
  }
  for (int p = 0; p < cols; ++p) {
    int piv = p;
    for (int i = p + 1; i < cols; ++i)
      if (std::abs((double)g[i][p]) > std::abs((double)g[piv][p])) piv = i;
    std::swap(g[p], g[piv]);
    if (g[p][p] == 0.0L) throw std::runtime_error("lsq oracle: singular normal equations");
    for (int i = 0; i < cols; ++i) {
      if (i == p) continue;
      const long double f = g[i][p] / g[p][p];
      for (int j = p; j <= cols; ++j) g[i][j] -= f * g[p][j];
    }
  }
  rsl::Vec x(cols);
  for (int i = 0; i < cols; ++i) x[i] = static_cast<double>(g[i][cols] / g[i][i]);
  return x;
}

}  // namespace oracle
