#include <fftw3.h>

#include <map>
#include <mutex>

#include "vefs/field.hpp"

namespace vefs {

namespace {

// One r2c/c2r plan pair per grid size, planned once on scratch buffers that
// share the allocator (and therefore the alignment) of every field buffer.
// FFTW_ESTIMATE keeps planning deterministic across processes, which the
// byte-reproducibility guarantees depend on.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  aligned_vector<double> phys_scratch;
  aligned_vector<cplx> spec_scratch;
};

PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  PlanPair& p = cache[n];
  const Grid2 grid(n);
  p.phys_scratch.resize(grid.phys_size());
  p.spec_scratch.resize(grid.spec_size());
  p.fwd = fftw_plan_dft_r2c_2d(n, n, p.phys_scratch.data(),
                               reinterpret_cast<fftw_complex*>(p.spec_scratch.data()),
                               FFTW_ESTIMATE);
  p.bwd = fftw_plan_dft_c2r_2d(n, n,
                               reinterpret_cast<fftw_complex*>(p.spec_scratch.data()),
                               p.phys_scratch.data(), FFTW_ESTIMATE);
  return p;
}

}  // namespace

SpecField forward_transform(const RealField& f) {
  const int n = f.n();
  if (n == 0) throw SizeMismatch("forward transform of an empty field");
  PlanPair& plans = plans_for(n);

  SpecField out(f.grid());
  // out-of-place r2c preserves its input; the const_cast is only for the API
  fftw_execute_dft_r2c(plans.fwd, const_cast<double*>(f.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double norm = 1.0 / (static_cast<double>(n) * n);
  for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] *= norm;
  return out;
}

RealField inverse_transform(const SpecField& f) {
  const int n = f.n();
  if (n == 0) throw SizeMismatch("inverse transform of an empty field");
  PlanPair& plans = plans_for(n);

  // multidimensional c2r destroys its input, so run it on a copy
  aligned_vector<cplx> tmp(f.data(), f.data() + f.size());
  RealField out(f.grid());
  fftw_execute_dft_c2r(plans.bwd, reinterpret_cast<fftw_complex*>(tmp.data()),
                       out.data());
  return out;
}

}  // namespace vefs
