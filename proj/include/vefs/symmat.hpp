#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "vefs/errors.hpp"

namespace vefs {

/// Dense square matrix of fixed small dimension (velocity gradients,
/// eigenvector frames, intermediate products).  Row-major storage.
template <int N>
struct Mat {
  static constexpr int dim = N;
  std::array<double, N * N> e{};

  double& operator()(int i, int j) { return e[i * N + j]; }
  double operator()(int i, int j) const { return e[i * N + j]; }

  static Mat identity() {
    Mat m;
    for (int i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  Mat transposed() const {
    Mat t;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  double frob_norm() const {
    double s = 0.0;
    for (double v : e) s += v * v;
    return std::sqrt(s);
  }

  Mat& operator+=(const Mat& o) {
    for (int k = 0; k < N * N; ++k) e[k] += o.e[k];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    for (int k = 0; k < N * N; ++k) e[k] -= o.e[k];
    return *this;
  }
  Mat& operator*=(double a) {
    for (double& v : e) v *= a;
    return *this;
  }

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(double a, Mat m) { return m *= a; }

  friend Mat operator*(const Mat& a, const Mat& b) {
    Mat r;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        double s = 0.0;
        for (int k = 0; k < N; ++k) s += a(i, k) * b(k, j);
        r(i, j) = s;
      }
    return r;
  }
};

/// Symmetric matrix with packed upper-triangle storage, so symmetry is
/// structural: (i,j) and (j,i) alias the same entry.
/// Packing order for N=2: xx, xy, yy; for N=3: xx, xy, xz, yy, yz, zz.
template <int N>
struct SymMat {
  static constexpr int dim = N;
  static constexpr int packed_size = N * (N + 1) / 2;
  std::array<double, packed_size> e{};

  static constexpr int index(int i, int j) {
    if (i > j) {
      int t = i;
      i = j;
      j = t;
    }
    return i * N - i * (i - 1) / 2 + (j - i);
  }

  double& operator()(int i, int j) { return e[index(i, j)]; }
  double operator()(int i, int j) const { return e[index(i, j)]; }

  static SymMat identity() {
    SymMat m;
    for (int i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  static SymMat diagonal(const std::array<double, N>& d) {
    SymMat m;
    for (int i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  Mat<N> full() const {
    Mat<N> m;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  /// Symmetric part (a + a^T)/2 of a general matrix, packed.
  static SymMat symmetric_part(const Mat<N>& a) {
    SymMat m;
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) m(i, j) = 0.5 * (a(i, j) + a(j, i));
    return m;
  }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  /// Squared Frobenius norm, off-diagonal entries counted twice.
  double frob_norm2() const {
    double s = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        double v = (*this)(i, j);
        s += v * v;
      }
    return s;
  }

  double frob_norm() const { return std::sqrt(frob_norm2()); }

  SymMat& operator+=(const SymMat& o) {
    for (int k = 0; k < packed_size; ++k) e[k] += o.e[k];
    return *this;
  }
  SymMat& operator-=(const SymMat& o) {
    for (int k = 0; k < packed_size; ++k) e[k] -= o.e[k];
    return *this;
  }
  SymMat& operator*=(double a) {
    for (double& v : e) v *= a;
    return *this;
  }

  friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
  friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
  friend SymMat operator*(double a, SymMat m) { return m *= a; }
};

/// Antisymmetric matrix with strict-upper-triangle storage; reconstruction
/// satisfies a^T = -a exactly.  Packing for N=2: (0,1); for N=3: (0,1),
/// (0,2), (1,2).
template <int N>
struct AntiMat {
  static constexpr int dim = N;
  static constexpr int packed_size = N * (N - 1) / 2;
  std::array<double, packed_size> e{};

  static constexpr int upper_index(int i, int j) {
    // valid for i < j only
    return i * N - i * (i + 1) / 2 + (j - i - 1);
  }

  double operator()(int i, int j) const {
    if (i == j) return 0.0;
    if (i < j) return e[upper_index(i, j)];
    return -e[upper_index(j, i)];
  }

  double& upper(int i, int j) { return e[upper_index(i, j)]; }
  double upper(int i, int j) const { return e[upper_index(i, j)]; }

  Mat<N> full() const {
    Mat<N> m;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  double frob_norm() const {
    double s = 0.0;
    for (double v : e) s += v * v;
    return std::sqrt(2.0 * s);
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : e) m = std::max(m, std::abs(v));
    return m;
  }
};

template <int N>
Mat<N> operator*(const SymMat<N>& a, const Mat<N>& b) {
  return a.full() * b;
}
template <int N>
Mat<N> operator*(const Mat<N>& a, const SymMat<N>& b) {
  return a * b.full();
}
template <int N>
Mat<N> operator*(const AntiMat<N>& a, const SymMat<N>& b) {
  return a.full() * b.full();
}
template <int N>
Mat<N> operator*(const SymMat<N>& a, const SymMat<N>& b) {
  return a.full() * b.full();
}

/// Eigendecomposition m = p^T diag(values) p of a symmetric matrix.
/// Row i of p is the unit eigenvector for values[i]; values ascend.
template <int N>
struct EigSym {
  std::array<double, N> values;
  Mat<N> vectors;
};

namespace detail {

/// Flip each eigenvector row so its largest-magnitude component is positive.
template <int N>
inline void canonicalize_rows(Mat<N>& p) {
  for (int i = 0; i < N; ++i) {
    int jmax = 0;
    for (int j = 1; j < N; ++j)
      if (std::abs(p(i, j)) > std::abs(p(i, jmax))) jmax = j;
    if (p(i, jmax) < 0.0)
      for (int j = 0; j < N; ++j) p(i, j) = -p(i, j);
  }
}

}  // namespace detail

inline EigSym<2> eig_sym(const SymMat<2>& m) {
  const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
  const double mean = 0.5 * (a + c);
  const double disc = std::hypot(0.5 * (a - c), b);
  const double lo = mean - disc;
  const double hi = mean + disc;

  // Eigenvector for the upper eigenvalue from whichever residual column is
  // better conditioned; the partner is its exact perpendicular.
  const double ux = b, uy = hi - a;
  const double wx = hi - c, wy = b;
  double vx, vy;
  if (ux * ux + uy * uy >= wx * wx + wy * wy) {
    vx = ux;
    vy = uy;
  } else {
    vx = wx;
    vy = wy;
  }
  double norm = std::hypot(vx, vy);
  if (norm == 0.0) {  // already a multiple of the identity
    vx = 0.0;
    vy = 1.0;
    norm = 1.0;
  }
  vx /= norm;
  vy /= norm;

  EigSym<2> out;
  out.values = {lo, hi};
  out.vectors(0, 0) = -vy;  // perpendicular row pairs with the low eigenvalue
  out.vectors(0, 1) = vx;
  out.vectors(1, 0) = vx;
  out.vectors(1, 1) = vy;
  detail::canonicalize_rows(out.vectors);
  return out;
}

/// Cyclic Jacobi iteration; off-diagonal tolerance 1e-14 relative, at most
/// 50 sweeps (quadratic convergence reaches it in a handful).
inline EigSym<3> eig_sym(const SymMat<3>& m) {
  double a[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = m(i, j);
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};  // m = v diag v^T

  const double scale = std::max(m.frob_norm(), 1e-300);
  const double tol = 1e-14 * scale;

  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = std::sqrt(2.0 * (a[0][1] * a[0][1] + a[0][2] * a[0][2] +
                                  a[1][2] * a[1][2]));
    if (off <= tol) break;
    static constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (auto [p, q] : pairs) {
      const double apq = a[p][q];
      if (std::abs(apq) <= 1e-300) continue;
      const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
      const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                       (std::abs(theta) + std::sqrt(theta * theta + 1.0));
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      const double s = t * c;

      for (int k = 0; k < 3; ++k) {
        const double akp = a[k][p], akq = a[k][q];
        a[k][p] = c * akp - s * akq;
        a[k][q] = s * akp + c * akq;
      }
      for (int k = 0; k < 3; ++k) {
        const double apk = a[p][k], aqk = a[q][k];
        a[p][k] = c * apk - s * aqk;
        a[q][k] = s * apk + c * aqk;
      }
      a[p][q] = 0.0;
      a[q][p] = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double vkp = v[k][p], vkq = v[k][q];
        v[k][p] = c * vkp - s * vkq;
        v[k][q] = s * vkp + c * vkq;
      }
    }
  }

  int order[3] = {0, 1, 2};
  for (int i = 0; i < 2; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (a[order[j]][order[j]] < a[order[i]][order[i]]) std::swap(order[i], order[j]);

  EigSym<3> out;
  for (int i = 0; i < 3; ++i) {
    out.values[i] = a[order[i]][order[i]];
    for (int j = 0; j < 3; ++j) out.vectors(i, j) = v[j][order[i]];
  }
  detail::canonicalize_rows(out.vectors);
  return out;
}

template <int N>
double min_eigenvalue(const SymMat<N>& m) {
  return eig_sym(m).values[0];
}

template <int N>
bool is_spd(const SymMat<N>& m) {
  return min_eigenvalue(m) > 0.0;
}

/// Unique symmetric positive definite square root.
/// Throws NotPositiveDefinite when the minimum eigenvalue is <= 0.
template <int N>
SymMat<N> sqrt_sym(const SymMat<N>& c) {
  const EigSym<N> eg = eig_sym(c);
  if (eg.values[0] <= 0.0) throw NotPositiveDefinite(eg.values[0]);
  std::array<double, N> r;
  for (int i = 0; i < N; ++i) r[i] = std::sqrt(eg.values[i]);
  SymMat<N> b;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      double s = 0.0;
      for (int k = 0; k < N; ++k) s += r[k] * eg.vectors(k, i) * eg.vectors(k, j);
      b(i, j) = s;
    }
  return b;
}

/// Inverse of a symmetric matrix by adjugate over determinant.
/// Throws NotPositiveDefinite when det <= 1e-14 (SPD inputs keep det > 0).
inline SymMat<2> inverse_spd(const SymMat<2>& m) {
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1);
  if (det <= 1e-14) throw NotPositiveDefinite(det);
  SymMat<2> inv;
  inv(0, 0) = m(1, 1) / det;
  inv(0, 1) = -m(0, 1) / det;
  inv(1, 1) = m(0, 0) / det;
  return inv;
}

inline SymMat<3> inverse_spd(const SymMat<3>& m) {
  const double a = m(0, 0), b = m(0, 1), c = m(0, 2);
  const double d = m(1, 1), f = m(1, 2), g = m(2, 2);
  const double co00 = d * g - f * f;
  const double co01 = c * f - b * g;
  const double co02 = b * f - c * d;
  const double det = a * co00 + b * co01 + c * co02;
  if (det <= 1e-14) throw NotPositiveDefinite(det);
  SymMat<3> inv;
  inv(0, 0) = co00 / det;
  inv(0, 1) = co01 / det;
  inv(0, 2) = co02 / det;
  inv(1, 1) = (a * g - c * c) / det;
  inv(1, 2) = (b * c - a * f) / det;
  inv(2, 2) = (a * d - b * b) / det;
  return inv;
}

}  // namespace vefs
