#include <doctest.h>

#include <cmath>

#include "vefs/constitutive.hpp"
#include "vefs/oracle.hpp"

using namespace vefs;

namespace {

ModelParams oldroyd(double wi) {
  ModelParams p;
  p.kind = ModelKind::oldroyd_b;
  p.wi = wi;
  return p;
}

ModelParams fene(double wi, double l2) {
  ModelParams p;
  p.kind = ModelKind::fene_p;
  p.wi = wi;
  p.l2 = l2;
  return p;
}

}  // namespace

TEST_CASE("relax_oldroyd_b direct values") {
  const SymMat<2> id = SymMat<2>::identity();
  const SymMat<2> at_eq = relax_oldroyd_b(id, oldroyd(1.0));
  for (double v : at_eq.e) CHECK(v == 0.0);

  SymMat<2> c;
  c(0, 0) = 3.0;
  c(1, 1) = 1.0;
  const SymMat<2> r = relax_oldroyd_b(c, oldroyd(2.0));
  CHECK(r(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(r(1, 1) == doctest::Approx(0.0));
  CHECK(r(0, 1) == 0.0);

  SymMat<2> half;
  half(0, 0) = 0.5;
  half(1, 1) = 0.5;
  const SymMat<2> r2 = relax_oldroyd_b(half, oldroyd(1.0));
  CHECK(r2(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r2(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("relax_oldroyd_b is linear") {
  // dyadic values: exact in floating point
  SymMat<2> c1;
  c1(0, 0) = 3.0;
  c1(1, 1) = 1.0;
  SymMat<2> c2;
  c2(0, 0) = 0.5;
  c2(1, 1) = 2.0;
  const double alpha = 0.5;
  const ModelParams p = oldroyd(2.0);
  const SymMat<2> mixed = relax_oldroyd_b(alpha * c1 + (1.0 - alpha) * c2, p);
  const SymMat<2> combo = alpha * relax_oldroyd_b(c1, p) +
                          (1.0 - alpha) * relax_oldroyd_b(c2, p);
  for (int k = 0; k < 3; ++k) CHECK(mixed.e[k] == combo.e[k]);

  CounterRng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const SymMat<2> a = random_spd<2>(rng, 0.2);
    const SymMat<2> b = random_spd<2>(rng, 0.2);
    const double t = rng.uniform01();
    const SymMat<2> lhs = relax_oldroyd_b(t * a + (1.0 - t) * b, p);
    const SymMat<2> rhs =
        t * relax_oldroyd_b(a, p) + (1.0 - t) * relax_oldroyd_b(b, p);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(lhs.e[k] - rhs.e[k]) <= 1e-15);
  }
}

TEST_CASE("relax_fene_p direct values") {
  const SymMat<2> id = SymMat<2>::identity();
  const SymMat<2> r = relax_fene_p(id, fene(1.0, 100.0));
  const double expected = 1.0 - 1.0 / 0.98;  // = -1/49
  CHECK(r(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(r(1, 1) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(r(0, 0) == doctest::Approx(-0.0204081632653061).epsilon(1e-10));

  // l2 -> infinity approaches Oldroyd-B
  const SymMat<2> near_ob = relax_fene_p(id, fene(1.0, 1e12));
  const SymMat<2> ob = relax_oldroyd_b(id, oldroyd(1.0));
  for (int k = 0; k < 3; ++k) CHECK(std::abs(near_ob.e[k] - ob.e[k]) <= 1e-10);
}

TEST_CASE("relax_fene_p cutoff guard") {
  SymMat<2> c;
  c(0, 0) = 60.0;
  c(1, 1) = 40.0;  // tr c = 100 = l2 exactly
  CHECK_THROWS_AS(relax_fene_p(c, fene(1.0, 100.0)), CutoffExceeded);
}

TEST_CASE("rhs_c fixed point and linear response") {
  const SymMat<2> id = SymMat<2>::identity();
  Mat<2> zero_g;
  const SymMat<2> at_eq = rhs_c(id, zero_g, oldroyd(1.0));
  for (double v : at_eq.e) CHECK(v == 0.0);

  Mat<2> sym_g;
  sym_g(0, 0) = 0.4;
  sym_g(0, 1) = -0.1;
  sym_g(1, 0) = -0.1;
  sym_g(1, 1) = -0.4;
  const SymMat<2> r = rhs_c(id, sym_g, oldroyd(1.0));
  CHECK(r(0, 0) == doctest::Approx(2.0 * sym_g(0, 0)).epsilon(1e-15));
  CHECK(r(0, 1) == doctest::Approx(2.0 * sym_g(0, 1)).epsilon(1e-15));
  CHECK(r(1, 1) == doctest::Approx(2.0 * sym_g(1, 1)).epsilon(1e-15));
}

TEST_CASE("rhs_c matches central difference of the flow map") {
  CounterRng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const SymMat<2> c0 = random_spd<2>(rng, 1.0);
    const Mat<2> g = random_traceless<2>(rng);
    const ModelParams p = trial % 2 ? fene(1.5, 100.0) : oldroyd(1.5);

    const double h = 1e-5;
    const auto fwd = pointwise_oracle(c0, g, p, h, h).c_direct;
    // backward step: integrate with negated rhs == reverse time
    const auto f = [&](const SymMat<2>& c) { return rhs_c(c, g, p); };
    const SymMat<2> k1 = f(c0);
    const SymMat<2> k2 = f(c0 + (-0.5 * h) * k1);
    const SymMat<2> k3 = f(c0 + (-0.5 * h) * k2);
    const SymMat<2> k4 = f(c0 + (-h) * k3);
    SymMat<2> bwd = c0;
    bwd += (-h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const SymMat<2> rhs = rhs_c(c0, g, p);
    for (int k = 0; k < 3; ++k) {
      const double fd = (fwd.e[k] - bwd.e[k]) / (2.0 * h);
      CHECK(std::abs(fd - rhs.e[k]) <= 1e-8);
    }
  }
}

TEST_CASE("rhs_b fixed point and FENE-P value at identity") {
  const SymMat<2> id = SymMat<2>::identity();
  Mat<2> zero_g;
  const SymMat<2> ob = rhs_b(id, zero_g, oldroyd(1.0));
  for (double v : ob.e) CHECK(v == 0.0);

  const SymMat<2> fp = rhs_b(id, zero_g, fene(1.0, 100.0));
  const double expected = 0.5 * (1.0 - 1.0 / 0.98);
  CHECK(fp(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(fp(0, 0) == doctest::Approx(-0.0102040816326531).epsilon(1e-10));
  CHECK(fp(1, 1) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(fp(0, 1) == 0.0);
}

TEST_CASE("rhs_b stays symmetric under the full-matrix residual") {
  CounterRng rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const SymMat<3> b = random_spd<3>(rng, 0.2);
    const Mat<3> g = random_traceless<3>(rng);
    const AntiMat<3> a = solve_antisym(b, g);
    CHECK(symmetry_residual(b, g, a) <= 1e-12);
    const SymMat<3> r = rhs_b(b, g, oldroyd(2.0));
    for (double v : r.e) CHECK(std::isfinite(v));
  }
}

TEST_CASE("pointwise oracle: pure relaxation has the scalar solution") {
  SymMat<2> c0;
  c0(0, 0) = 2.0;
  c0(1, 1) = 2.0;
  Mat<2> g;
  const OracleResult<2> r = pointwise_oracle(c0, g, oldroyd(1.0), 1.0, 1e-3);
  const double expected = 1.0 + std::exp(-1.0);
  CHECK(r.c_direct(0, 0) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(r.c_from_b(0, 0) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(r.max_gap <= 1e-10);
  CHECK(r.first_spd_loss < 0.0);
}

TEST_CASE("pointwise oracle: t_end = 0 returns the input") {
  CounterRng rng(34);
  const SymMat<2> c0 = random_spd<2>(rng, 1.0);
  const Mat<2> g = random_traceless<2>(rng);
  const OracleResult<2> r = pointwise_oracle(c0, g, oldroyd(1.0), 0.0, 1e-3);
  for (int k = 0; k < 3; ++k) {
    CHECK(r.c_direct.e[k] == c0.e[k]);
    CHECK(r.c_from_b.e[k] == doctest::Approx(c0.e[k]).epsilon(1e-13));
  }
}

TEST_CASE("pointwise oracle: random equivalence both models and dims") {
  const EquivalenceSweep ob2 = equivalence_sweep(2, ModelKind::oldroyd_b, 20, 41);
  CHECK(ob2.max_gap <= 1e-8);
  CHECK(ob2.spd_losses == 0);

  const EquivalenceSweep fp2 = equivalence_sweep(2, ModelKind::fene_p, 20, 42);
  CHECK(fp2.max_gap <= 1e-8);
  CHECK(fp2.spd_losses == 0);
  CHECK(fp2.max_trace_ratio < 1.0);  // FENE-P boundedness along the way

  const EquivalenceSweep ob3 = equivalence_sweep(3, ModelKind::oldroyd_b, 10, 43);
  CHECK(ob3.max_gap <= 1e-8);
  const EquivalenceSweep fp3 = equivalence_sweep(3, ModelKind::fene_p, 10, 44);
  CHECK(fp3.max_gap <= 1e-8);
}

TEST_CASE("formulation gap converges at 4th order in the oracle step") {
  CounterRng rng(35);
  const SymMat<2> c0 = random_spd<2>(rng, 1.0);
  Mat<2> g = random_traceless<2>(rng);
  g *= 1.0 / g.frob_norm();
  const ModelParams p = oldroyd(1.5);

  const double dt0 = 2e-2;
  const double e0 = pointwise_oracle(c0, g, p, 1.0, dt0).max_gap;
  const double e1 = pointwise_oracle(c0, g, p, 1.0, dt0 / 2).max_gap;
  const double e2 = pointwise_oracle(c0, g, p, 1.0, dt0 / 4).max_gap;
  const double order01 = std::log2(e0 / e1);
  const double order12 = std::log2(e1 / e2);
  CHECK(order01 >= 3.5);
  CHECK(order12 >= 3.5);
}

TEST_CASE("FENE-P pointwise boundedness under relaxation") {
  CounterRng rng(36);
  for (int trial = 0; trial < 10; ++trial) {
    SymMat<2> c0 = random_spd<2>(rng, 1.0);
    c0 *= 90.0 / c0.trace();  // start close to the l2 = 100 cutoff
    Mat<2> g;
    const OracleResult<2> r = pointwise_oracle(c0, g, fene(1.0, 100.0), 2.0, 1e-3);
    CHECK(r.max_trace < 100.0);
    CHECK(r.first_spd_loss < 0.0);
  }
}
