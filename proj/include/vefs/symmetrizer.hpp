#pragma once

#include <cmath>

#include "vefs/errors.hpp"
#include "vefs/symmat.hpp"

namespace vefs {

/// Degeneracy thresholds for the symmetrizer solves; quantities are
/// nondimensional and O(1) for healthy SPD states, so hitting these signals
/// upstream loss of positivity, which callers must report.
inline constexpr double kTraceEps = 1e-14;
inline constexpr double kDetEps = 1e-14;

namespace detail {

/// Right-hand side of the symmetrizer system for index pair (i,j), i < j:
/// the (j,i) - (i,j) asymmetry of b*g that the rotation a must cancel.
template <int N>
inline double symmetrizer_rhs(const SymMat<N>& b, const Mat<N>& g, int i, int j) {
  double w = 0.0;
  for (int k = 0; k < N; ++k) w += b(k, j) * g(k, i) - b(k, i) * g(k, j);
  return w;
}

}  // namespace detail

/// Antisymmetric a making r = b*g + a*b symmetric, closed form in 2D.
/// Throws DegenerateTrace when tr b has collapsed.
inline AntiMat<2> solve_antisym(const SymMat<2>& b, const Mat<2>& g) {
  const double tr = b(0, 0) + b(1, 1);
  if (tr <= kTraceEps) throw DegenerateTrace(tr);
  AntiMat<2> a;
  a.upper(0, 1) = ((b(0, 1) * g(0, 0) - b(0, 0) * g(0, 1)) +
                   (b(1, 1) * g(1, 0) - b(1, 0) * g(1, 1))) /
                  tr;
  return a;
}

/// 3D symmetrizer by the explicit adjugate of (tr b)I - b; the unique
/// solution of the 3x3 system solved generically by solve_antisym_linsolve.
/// Throws DegenerateSystem when det((tr b)I - b) has collapsed (its
/// eigenvalues are the pair sums of b's, positive for SPD b).
inline AntiMat<3> solve_antisym(const SymMat<3>& b, const Mat<3>& g) {
  const double t1 = b(1, 1) + b(2, 2);
  const double t2 = b(0, 0) + b(2, 2);
  const double t3 = b(0, 0) + b(1, 1);
  const double b1 = b(1, 2);
  const double b2 = b(0, 2);
  const double b3 = b(0, 1);

  const double det = t1 * (t2 * t3 - b1 * b1) - b2 * (b2 * t2 + b1 * b3) -
                     b3 * (b2 * b1 + b3 * t3);
  if (det <= kDetEps) throw DegenerateSystem(det);

  const double w1 = detail::symmetrizer_rhs(b, g, 0, 1);
  const double w2 = detail::symmetrizer_rhs(b, g, 0, 2);
  const double w3 = detail::symmetrizer_rhs(b, g, 1, 2);

  AntiMat<3> a;
  a.upper(0, 1) = ((t1 * t2 - b3 * b3) * w1 - (b1 * t1 + b3 * b2) * w2 +
                   (b2 * t2 + b1 * b3) * w3) /
                  det;
  a.upper(0, 2) = (-(b1 * t1 + b3 * b2) * w1 + (t1 * t3 - b2 * b2) * w2 -
                   (b2 * b1 + b3 * t3) * w3) /
                  det;
  a.upper(1, 2) = ((b2 * t2 + b1 * b3) * w1 - (b2 * b1 + b3 * t3) * w2 +
                   (t2 * t3 - b1 * b1) * w3) /
                  det;
  return a;
}

/// Same 3x3 system solved by Gaussian elimination with partial pivoting;
/// the independent cross-check for the closed form above.
inline AntiMat<3> solve_antisym_linsolve(const SymMat<3>& b, const Mat<3>& g) {
  // coefficient matrix over unknowns (a12, a13, a23)
  double m[3][4] = {
      {b(0, 0) + b(1, 1), b(1, 2), -b(2, 0), detail::symmetrizer_rhs(b, g, 0, 1)},
      {b(1, 2), b(0, 0) + b(2, 2), b(0, 1), detail::symmetrizer_rhs(b, g, 0, 2)},
      {-b(0, 2), b(0, 1), b(1, 1) + b(2, 2), detail::symmetrizer_rhs(b, g, 1, 2)}};

  double scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(m[i][j]));

  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) <= 1e-14 * scale) throw SingularSystem(m[piv][col]);
    if (piv != col)
      for (int j = col; j < 4; ++j) std::swap(m[piv][j], m[col][j]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int j = col; j < 4; ++j) m[r][j] -= f * m[col][j];
    }
  }

  double x[3];
  for (int i = 2; i >= 0; --i) {
    double s = m[i][3];
    for (int j = i + 1; j < 3; ++j) s -= m[i][j] * x[j];
    x[i] = s / m[i][i];
  }

  AntiMat<3> a;
  a.upper(0, 1) = x[0];
  a.upper(0, 2) = x[1];
  a.upper(1, 2) = x[2];
  return a;
}

/// ||r - r^T||_F / max(||b|| ||g||, eps) with r = b*g + a*b: the ground
/// truth for whether a given a symmetrizes the square-root evolution.
template <int N>
double symmetry_residual(const SymMat<N>& b, const Mat<N>& g, const AntiMat<N>& a) {
  const Mat<N> r = b.full() * g + a.full() * b.full();
  const Mat<N> defect = r - r.transposed();
  const double scale = std::max(b.frob_norm() * g.frob_norm(), 1e-300);
  return defect.frob_norm() / scale;
}

}  // namespace vefs
