#include "vefs/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace vefs {

double filter_rho(double theta) { return std::exp(-36.0 * std::pow(theta, 36.0)); }

double filter_factor(int signed_k, int n) {
  return filter_rho(2.0 * std::abs(signed_k) / static_cast<double>(n));
}

namespace {

// Per-axis filter factors, cached per grid size.
const std::vector<double>& axis_filter(int n) {
  static std::map<int, std::vector<double>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double>& f = cache[n];
  f.resize(n);
  Grid2 g(n);
  for (int m = 0; m < n; ++m) f[m] = filter_factor(g.wavenumber(m), n);
  return f;
}

}  // namespace

void smooth_filter_inplace(SpecField& f) {
  const int n = f.n();
  const int nkx = f.nkx();
  const std::vector<double>& rho = axis_filter(n);
  cplx* v = f.data();
  for (int my = 0; my < n; ++my) {
    const double ry = rho[my];
    for (int kx = 0; kx < nkx; ++kx) v[static_cast<std::size_t>(my) * nkx + kx] *= ry * rho[kx];
  }
}

SpecField smooth_filter(SpecField f) {
  smooth_filter_inplace(f);
  return f;
}

SpecField deriv(const SpecField& f, Axis axis) {
  const int n = f.n();
  const int nkx = f.nkx();
  const Grid2& g = f.grid();
  SpecField out(g);
  for (int my = 0; my < n; ++my) {
    const int ky = g.wavenumber(my);
    for (int kx = 0; kx < nkx; ++kx) {
      int k = axis == Axis::x ? kx : ky;
      if (std::abs(k) == n / 2) k = 0;  // Nyquist derivative pinned to zero
      const cplx z = f(kx, my);
      out(kx, my) = cplx(-k * z.imag(), k * z.real());
    }
  }
  return out;
}

VectorFieldS stokes_solve(const VectorFieldS& rhs) {
  const Grid2& g = rhs.grid();
  const int n = g.n;
  const int nkx = g.nkx();
  VectorFieldS u(g);
  for (int my = 0; my < n; ++my) {
    const double ky = g.wavenumber(my);
    for (int m = 0; m < nkx; ++m) {
      const double kx = m;
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) {
        u.x(m, my) = 0.0;
        u.y(m, my) = 0.0;
        continue;
      }
      const cplx rx = rhs.x(m, my);
      const cplx ry = rhs.y(m, my);
      const cplx k_dot_r = kx * rx + ky * ry;
      u.x(m, my) = (rx - kx * k_dot_r / k2) / k2;
      u.y(m, my) = (ry - ky * k_dot_r / k2) / k2;
    }
  }
  return u;
}

double spectral_divergence_max(const VectorFieldS& u) {
  const Grid2& g = u.grid();
  double m = 0.0;
  for (int my = 0; my < g.n; ++my) {
    const double ky = g.wavenumber(my);
    for (int kx = 0; kx < g.nkx(); ++kx)
      m = std::max(m, std::abs(static_cast<double>(kx) * u.x(kx, my) + ky * u.y(kx, my)));
  }
  return m;
}

double spectral_max_abs(const VectorFieldS& u) {
  double m = 0.0;
  for (std::size_t k = 0; k < u.x.size(); ++k)
    m = std::max({m, std::abs(u.x.data()[k]), std::abs(u.y.data()[k])});
  return m;
}

RealField advect_phys(const VectorFieldR& u_phys, const SpecField& f) {
  if (!(u_phys.grid() == f.grid())) throw SizeMismatch("advect operands on different grids");
  const SpecField f_filtered = smooth_filter(f);
  const RealField dfdx = inverse_transform(deriv(f_filtered, Axis::x));
  const RealField dfdy = inverse_transform(deriv(f_filtered, Axis::y));
  RealField out(f.grid());
  const std::size_t count = out.size();
  for (std::size_t k = 0; k < count; ++k)
    out.data()[k] = u_phys.x.data()[k] * dfdx.data()[k] + u_phys.y.data()[k] * dfdy.data()[k];
  return out;
}

SpecField advect(const SpecField& f, const VectorFieldS& u) {
  if (!(u.grid() == f.grid())) throw SizeMismatch("advect operands on different grids");
  VectorFieldR u_phys;
  u_phys.x = inverse_transform(smooth_filter(u.x));
  u_phys.y = inverse_transform(smooth_filter(u.y));
  return forward_transform(advect_phys(u_phys, f));
}

SpecField restrict_to(const SpecField& fine, Grid2 coarse) {
  const int nf = fine.n();
  const int nc = coarse.n;
  if (nc > nf || nf % nc != 0)
    throw SizeMismatch("restriction requires the coarse size to divide the fine size");
  if (nc == nf) return fine;

  const int half = nc / 2;
  SpecField out(coarse);
  for (int myc = 0; myc < nc; ++myc) {
    const int kyc = coarse.wavenumber(myc);
    for (int kxc = 0; kxc <= half; ++kxc) {
      const bool nyq_x = kxc == half;
      const bool nyq_y = std::abs(kyc) == half;
      const auto fine_row = [&](int ky) { return ky >= 0 ? ky : nf + ky; };
      cplx v;
      if (!nyq_x && !nyq_y) {
        v = fine(kxc, fine_row(kyc));
      } else if (nyq_x && !nyq_y) {
        // the implicit -half x-column of the full spectrum is the conjugate
        // of the +half column at the mirrored y-mode
        v = fine(half, fine_row(kyc)) + std::conj(fine(half, fine_row(-kyc)));
      } else if (!nyq_x && nyq_y) {
        v = fine(kxc, fine_row(half)) + fine(kxc, fine_row(-half));
      } else {
        v = fine(half, fine_row(half)) + fine(half, fine_row(-half));
        v += std::conj(v);
      }
      out(kxc, myc) = v;
    }
  }
  return out;
}

}  // namespace vefs
