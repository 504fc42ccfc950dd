#pragma once

#include <complex>
#include <cstdlib>
#include <new>
#include <vector>

#include "vefs/grid.hpp"

namespace vefs {

/// 64-byte-aligned allocator so every field buffer has identical alignment;
/// FFTW plans are created once per grid size and executed on any of them.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t alignment = 64;

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t count) {
    const std::size_t bytes = (count * sizeof(T) + alignment - 1) / alignment * alignment;
    void* p = std::aligned_alloc(alignment, bytes);
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { std::free(p); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const {
    return true;
  }
};

template <class T>
using aligned_vector = std::vector<T, AlignedAllocator<T>>;

using cplx = std::complex<double>;

/// Real scalar field sampled on the grid; index (ix, iy) -> iy*n + ix.
class RealField {
 public:
  RealField() = default;
  explicit RealField(Grid2 grid, double fill = 0.0)
      : grid_(grid), v_(grid.phys_size(), fill) {}

  const Grid2& grid() const { return grid_; }
  int n() const { return grid_.n; }

  double& operator()(int ix, int iy) { return v_[static_cast<std::size_t>(iy) * grid_.n + ix]; }
  double operator()(int ix, int iy) const {
    return v_[static_cast<std::size_t>(iy) * grid_.n + ix];
  }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::size_t size() const { return v_.size(); }

  double mean() const {
    double s = 0.0;
    for (double x : v_) s += x;
    return s / static_cast<double>(v_.size());
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  Grid2 grid_;
  aligned_vector<double> v_;
};

/// Spectral (half-complex) scalar field: kx in [0, n/2], ky index in [0, n)
/// wrapping to signed wavenumbers; index (kx, my) -> my*(n/2+1) + kx.
/// Conjugate symmetry of a real field is implicit in the storage.
class SpecField {
 public:
  SpecField() = default;
  explicit SpecField(Grid2 grid, cplx fill = {})
      : grid_(grid), v_(grid.spec_size(), fill) {}

  const Grid2& grid() const { return grid_; }
  int n() const { return grid_.n; }
  int nkx() const { return grid_.nkx(); }

  cplx& operator()(int kx, int my) {
    return v_[static_cast<std::size_t>(my) * grid_.nkx() + kx];
  }
  cplx operator()(int kx, int my) const {
    return v_[static_cast<std::size_t>(my) * grid_.nkx() + kx];
  }

  cplx* data() { return v_.data(); }
  const cplx* data() const { return v_.data(); }
  std::size_t size() const { return v_.size(); }

  SpecField& operator+=(const SpecField& o) {
    if (!(grid_ == o.grid_)) throw SizeMismatch("spectral field addition");
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
    return *this;
  }

  SpecField& operator*=(double a) {
    for (cplx& z : v_) z *= a;
    return *this;
  }

 private:
  Grid2 grid_;
  aligned_vector<cplx> v_;
};

struct VectorFieldR {
  RealField x, y;
  explicit VectorFieldR(Grid2 g) : x(g), y(g) {}
  VectorFieldR() = default;
  const Grid2& grid() const { return x.grid(); }
};

struct VectorFieldS {
  SpecField x, y;
  explicit VectorFieldS(Grid2 g) : x(g), y(g) {}
  VectorFieldS() = default;
  const Grid2& grid() const { return x.grid(); }
};

/// Symmetric 2x2 tensor field: three stored components (symmetry is
/// structural, exactly as for the pointwise SymMat type).
struct TensorFieldR {
  RealField xx, xy, yy;
  explicit TensorFieldR(Grid2 g) : xx(g), xy(g), yy(g) {}
  TensorFieldR() = default;
  const Grid2& grid() const { return xx.grid(); }
  RealField& comp(int k) { return k == 0 ? xx : (k == 1 ? xy : yy); }
  const RealField& comp(int k) const { return k == 0 ? xx : (k == 1 ? xy : yy); }
};

struct TensorFieldS {
  SpecField xx, xy, yy;
  explicit TensorFieldS(Grid2 g) : xx(g), xy(g), yy(g) {}
  TensorFieldS() = default;
  const Grid2& grid() const { return xx.grid(); }
  SpecField& comp(int k) { return k == 0 ? xx : (k == 1 ? xy : yy); }
  const SpecField& comp(int k) const { return k == 0 ? xx : (k == 1 ? xy : yy); }
};

/// Forward transform, normalized by 1/N^2 so the zero mode is the mean.
SpecField forward_transform(const RealField& f);

/// Unnormalized inverse; exact round trip with forward_transform.
RealField inverse_transform(const SpecField& f);

}  // namespace vefs
