#pragma once

#include <array>
#include <cmath>
#include <string>

#include "vefs/errors.hpp"
#include "vefs/symmat.hpp"
#include "vefs/symmetrizer.hpp"

namespace vefs {

enum class ModelKind { oldroyd_b, fene_p };

inline const char* to_string(ModelKind k) {
  return k == ModelKind::oldroyd_b ? "oldroyd_b" : "fene_p";
}

/// Constitutive parameters.  Wi is the Weissenberg number, s the polymer
/// coupling constant, l2 the FENE-P extensibility cutoff (unused for
/// Oldroyd-B).
struct ModelParams {
  ModelKind kind = ModelKind::oldroyd_b;
  double wi = 1.0;
  double s = 0.5;
  double l2 = 100.0;

  void validate(int dim) const {
    if (wi <= 0.0) throw ConfigError("Wi must be > 0, got " + std::to_string(wi));
    if (s < 0.0) throw ConfigError("s must be >= 0, got " + std::to_string(s));
    if (kind == ModelKind::fene_p && l2 <= static_cast<double>(dim))
      throw ConfigError("FENE-P l2 must exceed the dimension, got " + std::to_string(l2));
  }
};

/// Oldroyd-B relaxation (I - c)/Wi.
template <int N>
SymMat<N> relax_oldroyd_b(const SymMat<N>& c, const ModelParams& p) {
  SymMat<N> r = SymMat<N>::identity() - c;
  r *= 1.0 / p.wi;
  return r;
}

/// FENE-P relaxation (I - c/(1 - tr c/l2))/Wi.
/// Throws CutoffExceeded when tr c has reached the cutoff.
template <int N>
SymMat<N> relax_fene_p(const SymMat<N>& c, const ModelParams& p) {
  const double tr = c.trace();
  const double denom = 1.0 - tr / p.l2;
  if (denom <= 0.0) throw CutoffExceeded(tr, p.l2);
  SymMat<N> r = SymMat<N>::identity() - (1.0 / denom) * c;
  r *= 1.0 / p.wi;
  return r;
}

template <int N>
SymMat<N> relax(const SymMat<N>& c, const ModelParams& p) {
  return p.kind == ModelKind::oldroyd_b ? relax_oldroyd_b(c, p) : relax_fene_p(c, p);
}

/// Peterlin factor 1/(1 - tr c/l2); throws CutoffExceeded at the cutoff.
inline double peterlin_factor(double trace_c, double l2) {
  const double denom = 1.0 - trace_c / l2;
  if (denom <= 0.0) throw CutoffExceeded(trace_c, l2);
  return 1.0 / denom;
}

/// Non-advective right-hand side of the conformation evolution:
/// c*g + g^T*c + s(c).  Symmetric by construction.
template <int N>
SymMat<N> rhs_c(const SymMat<N>& c, const Mat<N>& g, const ModelParams& p) {
  const Mat<N> cg = c.full() * g;
  SymMat<N> out = relax(c, p);
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) out(i, j) += cg(i, j) + cg(j, i);
  return out;
}

/// Non-advective right-hand side of the symmetric square-root evolution:
/// b*g + a*b + (1/2Wi)(b^{-1} - b) for Oldroyd-B, with the Peterlin-scaled
/// b replacing the plain -b for FENE-P (||b||^2 = tr c is the same cutoff
/// argument as the c-form).  a is the symmetrizer for (b, g).
template <int N>
SymMat<N> rhs_b(const SymMat<N>& b, const Mat<N>& g, const ModelParams& p) {
  const AntiMat<N> a = solve_antisym(b, g);
  const Mat<N> r = b.full() * g + a.full() * b.full();
  const SymMat<N> binv = inverse_spd(b);

  const double half_inv_wi = 0.5 / p.wi;
  double stretch_coeff = 1.0;
  if (p.kind == ModelKind::fene_p) stretch_coeff = peterlin_factor(b.frob_norm2(), p.l2);

  SymMat<N> out;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j)
      out(i, j) = 0.5 * (r(i, j) + r(j, i)) +
                  half_inv_wi * (binv(i, j) - stretch_coeff * b(i, j));
  return out;
}

/// Result of the frozen-gradient two-formulation integration.
template <int N>
struct OracleResult {
  SymMat<N> c_direct;          ///< direct conformation path at t_end
  SymMat<N> c_from_b;          ///< b path squared at t_end
  double max_gap = 0.0;        ///< max-norm gap between the two at t_end
  double first_spd_loss = -1.0;  ///< first time either path lost SPD; -1 if never
  double max_trace = 0.0;      ///< largest tr c seen along the direct path
};

namespace detail {

template <int N, class Rhs>
SymMat<N> rk4_step(const SymMat<N>& y, double dt, const Rhs& f) {
  const SymMat<N> k1 = f(y);
  const SymMat<N> k2 = f(y + (0.5 * dt) * k1);
  const SymMat<N> k3 = f(y + (0.5 * dt) * k2);
  const SymMat<N> k4 = f(y + dt * k3);
  SymMat<N> out = y;
  out += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return out;
}

}  // namespace detail

/// Integrates the direct conformation equation from c0 and the square-root
/// equation from sqrt(c0) under a frozen velocity gradient with classical
/// 4th-order steps, and reports both endpoints.  A one-step integrator is
/// used on purpose: multistep startup error would contaminate the
/// formulation-equivalence measurement.
template <int N>
OracleResult<N> pointwise_oracle(const SymMat<N>& c0, const Mat<N>& g,
                                 const ModelParams& p, double t_end, double dt) {
  if (dt <= 0.0) throw ConfigError("oracle dt must be positive");

  const auto fc = [&](const SymMat<N>& c) { return rhs_c(c, g, p); };
  const auto fb = [&](const SymMat<N>& b) { return rhs_b(b, g, p); };

  OracleResult<N> out;
  SymMat<N> c = c0;
  SymMat<N> b = sqrt_sym(c0);
  out.max_trace = c.trace();

  const int steps = t_end <= 0.0 ? 0 : static_cast<int>(std::ceil(t_end / dt - 1e-9));
  const double h = steps > 0 ? t_end / steps : 0.0;

  for (int n = 0; n < steps; ++n) {
    c = detail::rk4_step(c, h, fc);
    b = detail::rk4_step(b, h, fb);
    out.max_trace = std::max(out.max_trace, c.trace());
    if (out.first_spd_loss < 0.0 &&
        (min_eigenvalue(c) <= 0.0 || min_eigenvalue(b) <= 0.0))
      out.first_spd_loss = (n + 1) * h;
  }

  out.c_direct = c;
  const Mat<N> bb = b.full() * b.full();
  out.c_from_b = SymMat<N>::symmetric_part(bb);
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j)
      out.max_gap = std::max(out.max_gap, std::abs(out.c_direct(i, j) - out.c_from_b(i, j)));
  return out;
}

}  // namespace vefs
