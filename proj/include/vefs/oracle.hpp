#pragma once

#include <cstdint>
#include <string>

#include "vefs/constitutive.hpp"
#include "vefs/rng.hpp"

namespace vefs {

/// Randomized SPD matrix m^T m + shift*I with entries of m uniform in [-1,1].
template <int N>
SymMat<N> random_spd(CounterRng& rng, double shift) {
  Mat<N> m;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  const Mat<N> mtm = m.transposed() * m;
  SymMat<N> out = SymMat<N>::symmetric_part(mtm);
  for (int i = 0; i < N; ++i) out(i, i) += shift;
  return out;
}

/// Random traceless velocity gradient with entries uniform in [-1,1].
template <int N>
Mat<N> random_traceless(CounterRng& rng) {
  Mat<N> g;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) g(i, j) = rng.uniform(-1.0, 1.0);
  const double shift = g.trace() / N;
  for (int i = 0; i < N; ++i) g(i, i) -= shift;
  return g;
}

/// Randomized sweep over SPD b and traceless g checking that the closed-form
/// symmetrizer agrees with the pivoted linear solve (3D) and that the
/// resulting r = b*g + a*b is symmetric.
struct SymmetrizerSweep {
  int dim = 0;
  int samples = 0;
  double max_rel_disagreement = 0.0;  ///< closed form vs linear solve (3D only)
  double max_residual_closed = 0.0;   ///< symmetry residual, closed-form path
  double max_residual_linsolve = 0.0; ///< symmetry residual, linear-solve path
};

SymmetrizerSweep symmetrizer_sweep(int dim, int samples, std::uint64_t seed);

/// Randomized frozen-gradient equivalence sweep: both formulations
/// integrated per instance; reports the worst endpoint gap.
struct EquivalenceSweep {
  int dim = 0;
  ModelKind model = ModelKind::oldroyd_b;
  int instances = 0;
  double max_gap = 0.0;
  int spd_losses = 0;
  double max_trace_ratio = 0.0;  ///< max tr c / l2 along the way (FENE-P)
};

EquivalenceSweep equivalence_sweep(int dim, ModelKind model, int instances,
                                   std::uint64_t seed, double dt = 1e-4,
                                   double t_end = 1.0);

}  // namespace vefs
