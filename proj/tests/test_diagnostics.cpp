#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vefs/diagnostics.hpp"
#include "vefs/rng.hpp"
#include "vefs/spectral.hpp"

using namespace vefs;

namespace {

constexpr double kArea = 4.0 * std::numbers::pi * std::numbers::pi;

TensorFieldR identity_tensor(Grid2 g) {
  TensorFieldR c(g);
  for (std::size_t k = 0; k < c.xx.size(); ++k) {
    c.xx.data()[k] = 1.0;
    c.yy.data()[k] = 1.0;
  }
  return c;
}

}  // namespace

TEST_CASE("energy of rest state and of the four-roll flow") {
  const Grid2 g(64);
  ModelParams p;
  p.s = 0.5;

  const EnergyPair rest = energy(VectorFieldR(g), identity_tensor(g), p);
  CHECK(rest.kinetic == 0.0);
  CHECK(rest.elastic == doctest::Approx(0.5 * p.s * 2.0 * kArea).epsilon(1e-13));

  VectorFieldR u(g);
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      u.x(ix, iy) = -std::sin(g.x(ix)) * std::cos(g.y(iy));
      u.y(ix, iy) = std::cos(g.x(ix)) * std::sin(g.y(iy));
    }
  const EnergyPair moving = energy(u, identity_tensor(g), p);
  CHECK(moving.kinetic == doctest::Approx(std::numbers::pi * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("elastic energy agrees between b and c representations") {
  const Grid2 g(32);
  CounterRng rng(61);
  TensorFieldR b(g);
  for (std::size_t k = 0; k < b.xx.size(); ++k) {
    b.xx.data()[k] = 1.0 + 0.3 * rng.uniform01();
    b.xy.data()[k] = 0.2 * (rng.uniform01() - 0.5);
    b.yy.data()[k] = 1.0 + 0.3 * rng.uniform01();
  }
  TensorFieldR c(g);
  double sum_b2 = 0.0;
  for (std::size_t k = 0; k < b.xx.size(); ++k) {
    const double bxx = b.xx.data()[k], bxy = b.xy.data()[k], byy = b.yy.data()[k];
    c.xx.data()[k] = bxx * bxx + bxy * bxy;
    c.xy.data()[k] = bxy * (bxx + byy);
    c.yy.data()[k] = bxy * bxy + byy * byy;
    sum_b2 += bxx * bxx + 2.0 * bxy * bxy + byy * byy;
  }
  ModelParams p;
  const EnergyPair e = energy(VectorFieldR(g), c, p);
  const double elastic_from_b =
      0.5 * p.s * kArea * sum_b2 / static_cast<double>(b.xx.size());
  CHECK(e.elastic == doctest::Approx(elastic_from_b).epsilon(1e-12));
}

TEST_CASE("s_tensor values, limit, and cutoff reporting") {
  const Grid2 g(16);
  const TensorFieldR c = identity_tensor(g);
  const TensorFieldR s = s_tensor(c, 100.0);
  CHECK(s.xx(3, 4) == doctest::Approx(1.0 / 0.98).epsilon(1e-14));
  CHECK(s.xy(3, 4) == 0.0);

  const TensorFieldR near = s_tensor(c, 1e12);
  CHECK(std::abs(near.xx(0, 0) - 1.0) <= 1e-10);

  TensorFieldR hot = identity_tensor(g);
  hot.xx(5, 7) = 120.0;  // tr c > l2 at one point
  try {
    s_tensor(hot, 100.0);
    CHECK(false);
  } catch (const CutoffExceeded& e) {
    CHECK(e.ix == 5);
    CHECK(e.iy == 7);
  }
}

TEST_CASE("s_tensor norm grows with the Peterlin factor") {
  const Grid2 g(8);
  TensorFieldR lo = identity_tensor(g);
  TensorFieldR hi = identity_tensor(g);
  for (std::size_t k = 0; k < hi.xx.size(); ++k) {
    hi.xx.data()[k] = 20.0;  // same direction, larger trace
    hi.yy.data()[k] = 20.0;
  }
  const TensorFieldR s_lo = s_tensor(lo, 100.0);
  const TensorFieldR s_hi = s_tensor(hi, 100.0);
  CHECK(s_hi.xx(0, 0) / hi.xx(0, 0) > s_lo.xx(0, 0) / lo.xx(0, 0));
}

TEST_CASE("l1_rel_error: self-comparison, zero reference, constant offset") {
  const Grid2 fine(64), coarse(32);
  CounterRng rng(62);
  TensorFieldR ref(fine);
  for (int k = 0; k < 3; ++k)
    for (std::size_t m = 0; m < ref.comp(k).size(); ++m)
      ref.comp(k).data()[m] = rng.uniform(0.5, 2.0);

  // restriction of the reference compared against itself
  TensorFieldR restricted(coarse);
  for (int k = 0; k < 3; ++k)
    restricted.comp(k) =
        inverse_transform(restrict_to(forward_transform(ref.comp(k)), coarse));
  const L1Error self = l1_rel_error(restricted, ref);
  CHECK(self.relative);
  CHECK(self.value <= 1e-13);

  const L1Error zero_ref = l1_rel_error(restricted, TensorFieldR(fine));
  CHECK(!zero_ref.relative);
  CHECK(zero_ref.value > 0.0);

  // known offset: coarse = restrict(ref) + delta on the diagonal
  const double delta = 0.25;
  TensorFieldR offset = restricted;
  for (std::size_t m = 0; m < offset.xx.size(); ++m) {
    offset.xx.data()[m] += delta;
    offset.yy.data()[m] += delta;
  }
  double sum_abs = 0.0;
  for (int k = 0; k < 3; ++k)
    for (std::size_t m = 0; m < restricted.comp(k).size(); ++m)
      sum_abs += std::abs(restricted.comp(k).data()[m]);
  const double expected = 2.0 * delta * static_cast<double>(offset.xx.size()) / sum_abs;
  const L1Error off = l1_rel_error(offset, ref);
  CHECK(off.value == doctest::Approx(expected).epsilon(1e-10));

  CHECK_THROWS_AS(l1_rel_error(TensorFieldR(Grid2(48)), ref), SizeMismatch);
}

TEST_CASE("pointwise_error_profile") {
  const Grid2 g(32);
  CounterRng rng(63);
  TensorFieldR a(g);
  for (int k = 0; k < 3; ++k)
    for (std::size_t m = 0; m < a.comp(k).size(); ++m)
      a.comp(k).data()[m] = rng.uniform(1.0, 2.0);

  const auto self = pointwise_error_profile(a, a, 0);
  CHECK(self.size() == 32);
  for (const ProfilePoint& p : self) {
    CHECK(p.abs_err == 0.0);
    CHECK(p.rel_err == 0.0);
  }

  TensorFieldR shifted = a;
  for (std::size_t m = 0; m < shifted.xx.size(); ++m) shifted.xx.data()[m] += 0.5;
  const auto prof = pointwise_error_profile(shifted, a, 0);
  for (const ProfilePoint& p : prof) CHECK(p.abs_err == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("improvement metric") {
  CHECK(improvement(0.1, 0.035) == doctest::Approx(0.65).epsilon(1e-12));
  CHECK(improvement(0.2, 0.2) == 0.0);
  CHECK(improvement(0.2, 0.0) == 1.0);
  CHECK_THROWS_AS(improvement(0.0, 0.1), DegenerateDenominator);
}

TEST_CASE("spd_monitor") {
  const Grid2 g(16);
  const SpdScan id_scan = spd_monitor(identity_tensor(g), TensorMeaning::conformation);
  CHECK(id_scan.min_eig == doctest::Approx(1.0));
  CHECK(id_scan.max_tr == doctest::Approx(2.0));

  // any stored b gives a nonnegative conformation min eigenvalue
  CounterRng rng(64);
  TensorFieldR b(g);
  for (int k = 0; k < 3; ++k)
    for (std::size_t m = 0; m < b.comp(k).size(); ++m)
      b.comp(k).data()[m] = rng.uniform(-2.0, 2.0);
  CHECK(spd_monitor(b, TensorMeaning::square_root).min_eig >= 0.0);

  TensorFieldR bad = identity_tensor(g);
  bad.xx(9, 2) = -3.0;
  const SpdScan scan = spd_monitor(bad, TensorMeaning::conformation);
  CHECK(scan.min_eig < 0.0);
  CHECK(scan.argmin_ix == 9);
  CHECK(scan.argmin_iy == 2);
}
