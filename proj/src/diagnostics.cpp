#include "vefs/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "vefs/spectral.hpp"

namespace vefs {

namespace {

constexpr double kArea = 4.0 * std::numbers::pi * std::numbers::pi;

/// Spectral restriction of a tensor field onto the coarse grid (identity
/// when the grids already match).
TensorFieldR restrict_tensor(const TensorFieldR& fine, Grid2 coarse) {
  if (fine.grid() == coarse) return fine;
  TensorFieldR out(coarse);
  for (int k = 0; k < 3; ++k)
    out.comp(k) = inverse_transform(restrict_to(forward_transform(fine.comp(k)), coarse));
  return out;
}

}  // namespace

EnergyPair energy(const VectorFieldR& u, const TensorFieldR& c, const ModelParams& p) {
  if (!(u.grid() == c.grid())) throw SizeMismatch("energy fields on different grids");
  const std::size_t count = u.x.size();
  double sum_u2 = 0.0;
  double sum_tr = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double ux = u.x.data()[k], uy = u.y.data()[k];
    sum_u2 += ux * ux + uy * uy;
    sum_tr += c.xx.data()[k] + c.yy.data()[k];
  }
  const double inv_count = 1.0 / static_cast<double>(count);
  EnergyPair e;
  e.kinetic = 0.5 * kArea * sum_u2 * inv_count;
  e.elastic = 0.5 * p.s * kArea * sum_tr * inv_count;
  return e;
}

TensorFieldR s_tensor(const TensorFieldR& c, double l2) {
  TensorFieldR out(c.grid());
  const int n = c.grid().n;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double tr = c.xx(ix, iy) + c.yy(ix, iy);
      if (1.0 - tr / l2 <= 0.0) throw CutoffExceeded(tr, l2, ix, iy);
      const double pf = 1.0 / (1.0 - tr / l2);
      out.xx(ix, iy) = pf * c.xx(ix, iy);
      out.xy(ix, iy) = pf * c.xy(ix, iy);
      out.yy(ix, iy) = pf * c.yy(ix, iy);
    }
  return out;
}

L1Error l1_rel_error(const TensorFieldR& coarse, const TensorFieldR& exact) {
  const int n = coarse.grid().n;
  const int n_ref = exact.grid().n;
  if (n_ref % n != 0) throw SizeMismatch("coarse grid size must divide the reference's");
  const TensorFieldR ref = restrict_tensor(exact, coarse.grid());

  double num = 0.0, den = 0.0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t count = ref.comp(k).size();
    for (std::size_t m = 0; m < count; ++m) {
      num += std::abs(coarse.comp(k).data()[m] - ref.comp(k).data()[m]);
      den += std::abs(ref.comp(k).data()[m]);
    }
  }
  if (den == 0.0) return {num, false};
  return {num / den, true};
}

std::vector<ProfilePoint> pointwise_error_profile(const TensorFieldR& coarse,
                                                  const TensorFieldR& exact,
                                                  int component) {
  const Grid2 grid = coarse.grid();
  if (exact.grid().n % grid.n != 0)
    throw SizeMismatch("coarse grid size must divide the reference's");
  const TensorFieldR ref = restrict_tensor(exact, grid);

  const int ix0 = grid.n / 2;  // x = 0 column
  std::vector<ProfilePoint> out;
  out.reserve(grid.n);
  for (int iy = 0; iy < grid.n; ++iy) {
    ProfilePoint p;
    p.y = grid.y(iy);
    const double a = coarse.comp(component)(ix0, iy);
    const double b = ref.comp(component)(ix0, iy);
    p.abs_err = std::abs(a - b);
    p.rel_err = p.abs_err / std::max(std::abs(b), 1e-300);
    out.push_back(p);
  }
  return out;
}

double improvement(double err_c, double err_b2) {
  if (err_c == 0.0) throw DegenerateDenominator();
  return std::abs(err_c - err_b2) / std::abs(err_c);
}

SpdScan spd_monitor(const TensorFieldR& q, TensorMeaning meaning) {
  SpdScan scan;
  scan.min_eig = std::numeric_limits<double>::infinity();
  scan.max_tr = -std::numeric_limits<double>::infinity();
  const int n = q.grid().n;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double xx = q.xx(ix, iy), xy = q.xy(ix, iy), yy = q.yy(ix, iy);
      const double mean = 0.5 * (xx + yy);
      const double disc = std::sqrt(0.25 * (xx - yy) * (xx - yy) + xy * xy);
      double min_eig, trace;
      if (meaning == TensorMeaning::conformation) {
        min_eig = mean - disc;
        trace = xx + yy;
      } else {
        const double lo = mean - disc, hi = mean + disc;
        min_eig = std::min(lo * lo, hi * hi);
        trace = xx * xx + 2.0 * xy * xy + yy * yy;
      }
      if (min_eig < scan.min_eig) {
        scan.min_eig = min_eig;
        scan.argmin_ix = ix;
        scan.argmin_iy = iy;
      }
      scan.max_tr = std::max(scan.max_tr, trace);
    }
  return scan;
}

}  // namespace vefs
