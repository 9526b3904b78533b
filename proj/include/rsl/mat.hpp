#pragma once
// mat.hpp -- small dense matrices and vector helpers (double, row-major).
//
// Everything here is runtime-sized but intended for the small problems this
// library deals with: incidence matrices, rigidity matrices, closed-loop
// Jacobians of a few dozen rows.  No blocking, no expression templates.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "rsl/errors.hpp"

namespace rsl {

using Vec = std::vector<double>;

// ---- vector helpers ---------------------------------------------------

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InvalidInput("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm_sq(a)); }

inline Vec operator+(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InvalidInput("vec add: size mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InvalidInput("vec sub: size mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec operator*(double s, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

// y += s * x
inline void axpy(double s, const Vec& x, Vec& y) {
  if (x.size() != y.size()) throw InvalidInput("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

// Contiguous sub-vector [at, at+len).
inline Vec segment(const Vec& v, std::size_t at, std::size_t len) {
  if (at + len > v.size()) throw InvalidInput("segment: out of range");
  return Vec(v.begin() + at, v.begin() + at + len);
}

inline void set_segment(Vec& v, std::size_t at, const Vec& part) {
  if (at + part.size() > v.size()) throw InvalidInput("set_segment: out of range");
  for (std::size_t i = 0; i < part.size(); ++i) v[at + i] = part[i];
}

inline Vec concat(const Vec& a, const Vec& b) {
  Vec r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

inline bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// ---- matrices ----------------------------------------------------------

class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw InvalidInput("Mat: negative dimension");
  }

  // Row-wise construction: Mat{{1,2},{3,4}}.
  Mat(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    data_.reserve(static_cast<std::size_t>(rows_) * cols_);
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != cols_)
        throw InvalidInput("Mat: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Mat identity(int n) {
    Mat I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  const Vec& data() const { return data_; }

  Mat t() const {
    Mat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  Mat operator*(const Mat& o) const {
    if (cols_ != o.rows_) throw InvalidInput("mat mul: size mismatch");
    Mat r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const double a = (*this)(i, k);
        if (a == 0.0) continue;
        for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }

  Vec operator*(const Vec& x) const {
    if (static_cast<int>(x.size()) != cols_) throw InvalidInput("mat-vec: size mismatch");
    Vec r(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
      r[i] = s;
    }
    return r;
  }

  Mat operator+(const Mat& o) const {
    check_same_shape(o, "mat add");
    Mat r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
    return r;
  }

  Mat operator-(const Mat& o) const {
    check_same_shape(o, "mat sub");
    Mat r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
    return r;
  }

  friend Mat operator*(double s, const Mat& m) {
    Mat r = m;
    for (double& x : r.data_) x *= s;
    return r;
  }

  // Copy `part` into this matrix with its top-left corner at (i0, j0).
  void set_block(int i0, int j0, const Mat& part) {
    if (i0 + part.rows_ > rows_ || j0 + part.cols_ > cols_)
      throw InvalidInput("set_block: out of range");
    for (int i = 0; i < part.rows_; ++i)
      for (int j = 0; j < part.cols_; ++j) (*this)(i0 + i, j0 + j) = part(i, j);
  }

  Mat block(int i0, int j0, int r, int c) const {
    if (i0 + r > rows_ || j0 + c > cols_) throw InvalidInput("block: out of range");
    Mat out(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) out(i, j) = (*this)(i0 + i, j0 + j);
    return out;
  }

  Vec col(int j) const {
    Vec r(rows_);
    for (int i = 0; i < rows_; ++i) r[i] = (*this)(i, j);
    return r;
  }

  Vec row(int i) const {
    Vec r(cols_);
    for (int j = 0; j < cols_; ++j) r[j] = (*this)(i, j);
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::fabs(x));
    return m;
  }

  bool all_finite() const { return rsl::all_finite(data_); }

 private:
  void check_same_shape(const Mat& o, const char* what) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidInput(std::string(what) + ": size mismatch");
  }

  int rows_ = 0, cols_ = 0;
  Vec data_;
};

// A ⊗ I_m: every scalar entry a_ij becomes the block a_ij * I_m.  This is how
// an n x |E| weight matrix acts on stacked m-dimensional edge/agent vectors.
inline Mat kron_identity(const Mat& a, int m) {
  Mat r(a.rows() * m, a.cols() * m);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const double x = a(i, j);
      if (x == 0.0) continue;
      for (int d = 0; d < m; ++d) r(i * m + d, j * m + d) = x;
    }
  return r;
}

// Block-diagonal stacking of the m-vectors packed in z: column k holds the
// k-th m-vector in rows [k*m, (k+1)*m).  For z holding |E| edge vectors this
// is the |E|m x |E| matrix usually written D_z.
inline Mat stacked_diag(const Vec& z, int m) {
  if (m <= 0 || z.size() % static_cast<std::size_t>(m) != 0)
    throw InvalidInput("stacked_diag: length not a multiple of m");
  const int cnt = static_cast<int>(z.size()) / m;
  Mat r(cnt * m, cnt);
  for (int k = 0; k < cnt; ++k)
    for (int d = 0; d < m; ++d) r(k * m + d, k) = z[static_cast<std::size_t>(k) * m + d];
  return r;
}

inline Mat hcat(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw InvalidInput("hcat: row mismatch");
  Mat r(a.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(0, a.cols(), b);
  return r;
}

inline Mat vcat(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) throw InvalidInput("vcat: column mismatch");
  Mat r(a.rows() + b.rows(), a.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), 0, b);
  return r;
}

}  // namespace rsl
