#include "vefs/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "vefs/symmetrizer.hpp"

namespace vefs {

namespace {

template <int N>
SymmetrizerSweep sweep_impl(int samples, std::uint64_t seed) {
  CounterRng rng(seed);
  SymmetrizerSweep out;
  out.dim = N;
  out.samples = samples;
  for (int k = 0; k < samples; ++k) {
    const SymMat<N> b = random_spd<N>(rng, 0.1);
    const Mat<N> g = random_traceless<N>(rng);

    const AntiMat<N> a = solve_antisym(b, g);
    out.max_residual_closed = std::max(out.max_residual_closed, symmetry_residual(b, g, a));

    if constexpr (N == 3) {
      const AntiMat<N> a_lin = solve_antisym_linsolve(b, g);
      out.max_residual_linsolve =
          std::max(out.max_residual_linsolve, symmetry_residual(b, g, a_lin));
      double diff = 0.0, scale = 0.0;
      for (int m = 0; m < AntiMat<N>::packed_size; ++m) {
        diff = std::max(diff, std::abs(a.e[m] - a_lin.e[m]));
        scale = std::max({scale, std::abs(a.e[m]), std::abs(a_lin.e[m])});
      }
      out.max_rel_disagreement =
          std::max(out.max_rel_disagreement, diff / std::max(scale, 1e-15));
    }
  }
  return out;
}

template <int N>
EquivalenceSweep equivalence_impl(ModelKind model, int instances, std::uint64_t seed,
                                  double dt, double t_end) {
  CounterRng rng(seed);
  EquivalenceSweep out;
  out.dim = N;
  out.model = model;
  out.instances = instances;
  for (int k = 0; k < instances; ++k) {
    const SymMat<N> c0 = random_spd<N>(rng, 1.0);
    Mat<N> g = random_traceless<N>(rng);
    // ||g|| in (0, 1]
    const double target = rng.uniform(0.3, 1.0);
    g *= target / std::max(g.frob_norm(), 1e-12);

    ModelParams p;
    p.kind = model;
    p.wi = rng.uniform(1.0, 5.0);
    p.l2 = 100.0;

    const OracleResult<N> r = pointwise_oracle(c0, g, p, t_end, dt);
    out.max_gap = std::max(out.max_gap, r.max_gap);
    if (r.first_spd_loss >= 0.0) ++out.spd_losses;
    if (model == ModelKind::fene_p)
      out.max_trace_ratio = std::max(out.max_trace_ratio, r.max_trace / p.l2);
  }
  return out;
}

}  // namespace

SymmetrizerSweep symmetrizer_sweep(int dim, int samples, std::uint64_t seed) {
  if (dim == 2) return sweep_impl<2>(samples, seed);
  if (dim == 3) return sweep_impl<3>(samples, seed);
  throw ConfigError("symmetrizer sweep dimension must be 2 or 3");
}

EquivalenceSweep equivalence_sweep(int dim, ModelKind model, int instances,
                                   std::uint64_t seed, double dt, double t_end) {
  if (dim == 2) return equivalence_impl<2>(model, instances, seed, dt, t_end);
  if (dim == 3) return equivalence_impl<3>(model, instances, seed, dt, t_end);
  throw ConfigError("equivalence sweep dimension must be 2 or 3");
}

}  // namespace vefs
