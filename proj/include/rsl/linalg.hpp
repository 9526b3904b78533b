#pragma once
// linalg.hpp -- numerical kernels: SVD, rank / null space / least squares,
// orthogonal projections, and eigenvalues of small real matrices.
//
// Design notes.  Matrices here are tiny (a few dozen rows), so accuracy and
// simplicity win over speed:
//   * the SVD is a one-sided Jacobi: it orthogonalises the columns of A by
//     plane rotations, which gives the right singular vectors directly and
//     computes small singular values to high relative accuracy;
//   * general (non-symmetric) eigenvalues use the classic balance ->
//     elimination Hessenberg -> Francis double-shift QR pipeline;
//   * symmetric matrices get a cyclic Jacobi of their own.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "rsl/mat.hpp"

namespace rsl {

// ---- singular value decomposition ---------------------------------------

struct Svd {
  Vec sigma;  // singular values, descending
  Mat u;      // rows(A) x cols(A); column j is left vector for sigma[j] (zero column when sigma[j] = 0)
  Mat v;      // cols(A) x cols(A), orthogonal
};

// One-sided Jacobi SVD.  Rotates column pairs of a working copy of A until
// all pairs are numerically orthogonal; the accumulated rotations form V and
// the column norms of the rotated copy are the singular values.
inline Svd svd(const Mat& a, int max_sweeps = 60) {
  if (!a.all_finite()) throw InvalidInput("svd: non-finite entries");
  const int r = a.rows(), c = a.cols();
  Mat w = a;
  Mat v = Mat::identity(c);
  // Skip threshold: an r-term dot product of two orthogonal columns carries
  // rounding noise of order sqrt(r)*eps*|col_p||col_q|, so the tolerance must
  // scale with the column length or noise re-fires rotations indefinitely
  // when singular values repeat.
  const double eps = 4.0 * std::sqrt(static_cast<double>(std::max(r, 1))) *
                     std::numeric_limits<double>::epsilon();
  // Columns whose norm has fallen to rounding dust relative to the whole
  // matrix are numerical zeros.  Rotating one against a live column leaves it
  // an epsilon-scale copy of that column, so the pair stays fully correlated
  // and re-fires forever while the dust norm merely underflows; the sweep can
  // only settle on singular inputs if dust columns are excluded from the
  // pivot tests and flushed to exact zero.
  double fro2 = 0.0;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) fro2 += a(i, j) * a(i, j);
  const double dust2 = fro2 * std::numeric_limits<double>::epsilon() *
                       std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int j = 0; j < c; ++j) {
      double nj2 = 0.0;
      for (int i = 0; i < r; ++i) nj2 += w(i, j) * w(i, j);
      if (nj2 <= dust2)
        for (int i = 0; i < r; ++i) w(i, j) = 0.0;
    }
    bool rotated = false;
    for (int p = 0; p < c - 1; ++p) {
      for (int q = p + 1; q < c; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int i = 0; i < r; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (alpha <= dust2 || beta <= dust2) continue;
        if (gamma == 0.0 || std::fabs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (int i = 0; i < r; ++i) {
          const double wp = w(i, p), wq = w(i, q);
          w(i, p) = cs * wp - sn * wq;
          w(i, q) = sn * wp + cs * wq;
        }
        for (int i = 0; i < c; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = cs * vp - sn * vq;
          v(i, q) = sn * vp + cs * vq;
        }
      }
    }
    if (!rotated) break;
    if (sweep == max_sweeps - 1) throw ConvergenceError("svd: Jacobi sweeps did not converge");
  }
  // Column norms are the singular values; sort them descending.
  std::vector<int> order(c);
  std::iota(order.begin(), order.end(), 0);
  Vec sig(c);
  for (int j = 0; j < c; ++j) sig[j] = norm(w.col(j));
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return sig[i] > sig[j]; });
  Svd out;
  out.sigma.resize(c);
  out.u = Mat(r, c);
  out.v = Mat(c, c);
  for (int j = 0; j < c; ++j) {
    const int src = order[j];
    out.sigma[j] = sig[src];
    for (int i = 0; i < c; ++i) out.v(i, j) = v(i, src);
    if (sig[src] > 0.0)
      for (int i = 0; i < r; ++i) out.u(i, j) = w(i, src) / sig[src];
  }
  return out;
}

// ---- rank, null space, projections --------------------------------------

// Numerical rank: singular values above rel_tol times the largest.
inline int rank(const Mat& a, double rel_tol = 1e-9) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  const Svd s = svd(a);
  const double cut = rel_tol * s.sigma[0];
  int r = 0;
  for (double x : s.sigma)
    if (x > cut && x > 0.0) ++r;
  return r;
}

// A linear subspace carried as an orthonormal basis (one column per
// dimension; zero columns never appear).
struct Subspace {
  Mat basis;
  int dim() const { return basis.cols(); }
  int ambient_dim() const { return basis.rows(); }
};

// Orthogonal projection of x onto the subspace.
inline Vec project_onto(const Subspace& s, const Vec& x) {
  if (static_cast<int>(x.size()) != s.basis.rows())
    throw InvalidInput("project_onto: dimension mismatch");
  return s.basis * (s.basis.t() * x);
}

// Orthonormal basis of {x : |Ax| <= rel_tol |A| |x|}: the right singular
// vectors whose singular values fall at or below the cut.  A zero (or empty)
// matrix yields the whole space.
inline Subspace null_space(const Mat& a, double rel_tol = 1e-9) {
  const int c = a.cols();
  if (c == 0) return Subspace{Mat(0, 0)};
  if (a.rows() == 0) return Subspace{Mat::identity(c)};
  const Svd s = svd(a);
  const double cut = rel_tol * s.sigma[0];
  Subspace out;
  int nullity = 0;
  for (double x : s.sigma)
    if (!(x > cut) || x == 0.0) ++nullity;
  out.basis = Mat(c, nullity);
  for (int j = 0; j < nullity; ++j)
    for (int i = 0; i < c; ++i) out.basis(i, j) = s.v(i, c - nullity + j);
  return out;
}

// Orthonormal basis of the column span of A (left singular vectors above the
// cut).  Used to re-orthonormalise collections of spanning vectors.
inline Subspace column_space(const Mat& a, double rel_tol = 1e-9) {
  if (a.cols() == 0 || a.rows() == 0) return Subspace{Mat(a.rows(), 0)};
  const Svd s = svd(a);
  const double cut = rel_tol * (s.sigma.empty() ? 0.0 : s.sigma[0]);
  int r = 0;
  for (double x : s.sigma)
    if (x > cut && x > 0.0) ++r;
  Subspace out;
  out.basis = Mat(a.rows(), r);
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < a.rows(); ++i) out.basis(i, j) = s.u(i, j);
  return out;
}

// Minimum-norm least-squares solution of A x ~= b for tall (or square)
// systems, via the SVD pseudo-inverse.
inline Vec least_squares(const Mat& a, const Vec& b, double rel_tol = 1e-9) {
  if (a.rows() < a.cols()) throw InvalidInput("least_squares: fewer rows than columns");
  if (static_cast<int>(b.size()) != a.rows()) throw InvalidInput("least_squares: rhs has wrong length");
  if (!a.all_finite() || !all_finite(b)) throw InvalidInput("least_squares: non-finite entries");
  const Svd s = svd(a);
  const double cut = rel_tol * (s.sigma.empty() ? 0.0 : s.sigma[0]);
  Vec x(a.cols(), 0.0);
  for (int j = 0; j < a.cols(); ++j) {
    if (!(s.sigma[j] > cut) || s.sigma[j] == 0.0) continue;
    const double coef = dot(s.u.col(j), b) / s.sigma[j];
    axpy(coef, s.v.col(j), x);
  }
  return x;
}

// ---- eigenvalues ---------------------------------------------------------

namespace detail {

// Balance a matrix by diagonal similarity with powers of two so row and
// column norms match; improves the accuracy of the QR iteration.
inline void balance(Mat& a) {
  const int n = a.rows();
  const double radix = 2.0, sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) {
          c += std::fabs(a(j, i));
          r += std::fabs(a(i, j));
        }
      if (c != 0.0 && r != 0.0) {
        double g = r / radix, f = 1.0;
        const double s = c + r;
        while (c < g) {
          f *= radix;
          c *= sqrdx;
        }
        g = r * radix;
        while (c > g) {
          f /= radix;
          c /= sqrdx;
        }
        if ((c + r) / f < 0.95 * s) {
          done = false;
          g = 1.0 / f;
          for (int j = 0; j < n; ++j) a(i, j) *= g;
          for (int j = 0; j < n; ++j) a(j, i) *= f;
        }
      }
    }
  }
}

// Reduce to upper Hessenberg form by Gaussian elimination with partial
// pivoting (similarity transform).  Entries below the first subdiagonal are
// zeroed afterwards.
inline void hessenberg(Mat& a) {
  const int n = a.rows();
  for (int m = 1; m < n - 1; ++m) {
    double x = 0.0;
    int piv = m;
    for (int j = m; j < n; ++j)
      if (std::fabs(a(j, m - 1)) > std::fabs(x)) {
        x = a(j, m - 1);
        piv = j;
      }
    if (piv != m) {
      for (int j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
      for (int j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
    }
    if (x != 0.0) {
      for (int i = m + 1; i < n; ++i) {
        double y = a(i, m - 1);
        if (y != 0.0) {
          y /= x;
          a(i, m - 1) = y;
          for (int j = m; j < n; ++j) a(i, j) -= y * a(m, j);
          for (int j = 0; j < n; ++j) a(j, m) += y * a(j, i);
        }
      }
    }
  }
  for (int i = 2; i < n; ++i)
    for (int j = 0; j < i - 1; ++j) a(i, j) = 0.0;
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
inline std::vector<std::complex<double>> hqr(Mat& a) {
  const int n = a.rows();
  std::vector<std::complex<double>> eig(n);
  const double EPS = std::numeric_limits<double>::epsilon();
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(a(i, j));
  if (anorm == 0.0) return eig;  // zero matrix
  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l;
    do {
      for (l = nn; l >= 1; --l) {
        double s = std::fabs(a(l - 1, l - 1)) + std::fabs(a(l, l));
        if (s == 0.0) s = anorm;
        double tol = EPS * s;
        // Multiple equal complex pairs can pin a subdiagonal entry at the
        // round-off floor of the sweep, EPS*anorm, which the entry-relative
        // test above never reaches.  Once shifts have had a fair chance,
        // fall back to Wilkinson's norm-relative test: zeroing such an entry
        // is a perturbation no larger than the rounding already committed.
        if (its > 12) tol = std::max(tol, EPS * anorm);
        if (std::fabs(a(l, l - 1)) <= tol) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {  // one eigenvalue isolated
        eig[nn--] = std::complex<double>(x + t, 0.0);
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {  // a 2x2 block isolated
          double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::fabs(q));
          x += t;
          if (q >= 0.0) {
            z = p + (p >= 0.0 ? z : -z);
            eig[nn - 1] = eig[nn] = std::complex<double>(x + z, 0.0);
            if (z != 0.0) eig[nn] = std::complex<double>(x - w / z, 0.0);
          } else {
            eig[nn] = std::complex<double>(x + p, -z);
            eig[nn - 1] = std::conj(eig[nn]);
          }
          nn -= 2;
        } else {  // no convergence yet: do a double QR step
          if (its == 60) throw ConvergenceError("eigenvalues: QR iteration stalled");
          if (its > 0 && its % 10 == 0) {  // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            const double s = std::fabs(a(nn, nn - 1)) + std::fabs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m;
          double p = 0.0, q = 0.0, r = 0.0;
          for (m = nn - 2; m >= l; --m) {
            const double z = a(m, m);
            const double rr = x - z;
            const double ss = y - z;
            p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - rr - ss;
            r = a(m + 2, m + 1);
            const double s = std::fabs(p) + std::fabs(q) + std::fabs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::fabs(a(m, m - 1)) * (std::fabs(q) + std::fabs(r));
            const double v = std::fabs(p) * (std::fabs(a(m - 1, m - 1)) + std::fabs(z) + std::fabs(a(m + 1, m + 1)));
            if (u <= EPS * v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = a(k + 2, k - 1);
              x = std::fabs(p) + std::fabs(q) + std::fabs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            double s = std::sqrt(p * p + q * q + r * r);
            if (p < 0.0) s = -s;
            if (s != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              y = q / s;
              const double z = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {  // row modification
                double pp = a(k, j) + q * a(k + 1, j);
                if (k != nn - 1) {
                  pp += r * a(k + 2, j);
                  a(k + 2, j) -= pp * z;
                }
                a(k + 1, j) -= pp * y;
                a(k, j) -= pp * x;
              }
              const int mmin = nn < k + 3 ? nn : k + 3;
              for (int i = l; i <= mmin; ++i) {  // column modification
                double pp = x * a(i, k) + y * a(i, k + 1);
                if (k != nn - 1) {
                  pp += z * a(i, k + 2);
                  a(i, k + 2) -= pp * r;
                }
                a(i, k + 1) -= pp * q;
                a(i, k) -= pp;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }
  return eig;
}

}  // namespace detail

// Eigenvalues of a general real square matrix, as complex numbers sorted by
// (real, imaginary) part.
inline std::vector<std::complex<double>> eigenvalues(const Mat& a) {
  if (a.rows() != a.cols()) throw InvalidInput("eigenvalues: matrix not square");
  if (!a.all_finite()) throw InvalidInput("eigenvalues: non-finite entries");
  const int n = a.rows();
  if (n == 0) return {};
  if (n == 1) return {std::complex<double>(a(0, 0), 0.0)};
  Mat work = a;
  detail::balance(work);
  detail::hessenberg(work);
  auto eig = detail::hqr(work);
  std::sort(eig.begin(), eig.end(), [](const std::complex<double>& x, const std::complex<double>& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return eig;
}

// Largest real part over the spectrum.
inline double spectral_abscissa(const Mat& a) {
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& ev : eigenvalues(a)) mx = std::max(mx, ev.real());
  return mx;
}

// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric
// matrix, by cyclic Jacobi rotations.
struct SymEig {
  Vec values;  // ascending
  Mat vectors; // column j pairs with values[j]
};

inline SymEig eigen_sym(const Mat& a, int max_sweeps = 64) {
  if (a.rows() != a.cols()) throw InvalidInput("eigen_sym: matrix not square");
  const int n = a.rows();
  double asym = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) asym = std::max(asym, std::fabs(a(i, j) - a(j, i)));
  if (asym > 1e-12 * (1.0 + a.max_abs())) throw InvalidInput("eigen_sym: matrix not symmetric");
  Mat w = a;
  Mat v = Mat::identity(n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += w(i, j) * w(i, j);
    if (std::sqrt(off) <= 1e-15 * (1.0 + w.max_abs())) break;
    if (sweep == max_sweeps - 1) throw ConvergenceError("eigen_sym: Jacobi sweeps did not converge");
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (w(p, q) == 0.0) continue;
        const double theta = (w(q, q) - w(p, p)) / (2.0 * w(p, q));
        const double tt = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(tt * tt + 1.0);
        const double sn = tt * cs;
        for (int i = 0; i < n; ++i) {  // W <- J^T W J, applied as rows then columns
          const double wip = w(i, p), wiq = w(i, q);
          w(i, p) = cs * wip - sn * wiq;
          w(i, q) = sn * wip + cs * wiq;
        }
        for (int j = 0; j < n; ++j) {
          const double wpj = w(p, j), wqj = w(q, j);
          w(p, j) = cs * wpj - sn * wqj;
          w(q, j) = sn * wpj + cs * wqj;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = cs * vip - sn * viq;
          v(i, q) = sn * vip + cs * viq;
        }
      }
    }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return w(i, i) < w(j, j); });
  SymEig out;
  out.values.resize(n);
  out.vectors = Mat(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = w(order[j], order[j]);
    for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

}  // namespace rsl
