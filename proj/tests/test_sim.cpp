#include <doctest.h>

#include <cmath>

#include "vefs/diagnostics.hpp"
#include "vefs/sim.hpp"

using namespace vefs;

namespace {

SimConfig base_config(int n, double wi, double t_end, Formulation form) {
  SimConfig cfg;
  cfg.n = n;
  cfg.model.kind = ModelKind::oldroyd_b;
  cfg.model.wi = wi;
  cfg.model.s = 0.5;
  cfg.formulation = form;
  cfg.t_end = t_end;
  return cfg;
}

double tensor_max_diff(const TensorFieldR& a, const TensorFieldR& b) {
  double m = 0.0;
  for (int k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < a.comp(k).size(); ++i)
      m = std::max(m, std::abs(a.comp(k).data()[i] - b.comp(k).data()[i]));
  return m;
}

double tensor_l1_diff(const TensorFieldR& a, const TensorFieldR& b) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < a.comp(k).size(); ++i)
      s += std::abs(a.comp(k).data()[i] - b.comp(k).data()[i]);
  return s / static_cast<double>(a.comp(0).size());
}

}  // namespace

TEST_CASE("forcing field values, divergence, curl") {
  const Grid2 g(64);
  const VectorFieldR f = Simulation::forcing_field(g);

  // value at (0,0): grid index of x=0 is n/2
  CHECK(std::abs(f.x(g.n / 2, g.n / 2)) <= 1e-13);
  CHECK(std::abs(f.y(g.n / 2, g.n / 2)) <= 1e-13);
  // value at (pi/2, 0): x index n/2 + n/4
  CHECK(f.x(3 * g.n / 4, g.n / 2) == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(std::abs(f.y(3 * g.n / 4, g.n / 2)) <= 1e-13);

  VectorFieldS fs(g);
  fs.x = forward_transform(f.x);
  fs.y = forward_transform(f.y);
  CHECK(spectral_divergence_max(fs) <= 1e-13);

  // curl f = -4 sin x sin y for this force
  SpecField curl = deriv(fs.y, Axis::x);
  const SpecField dyfx = deriv(fs.x, Axis::y);
  for (std::size_t k = 0; k < curl.size(); ++k) curl.data()[k] -= dyfx.data()[k];
  const RealField curl_phys = inverse_transform(curl);
  double err = 0.0;
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix)
      err = std::max(err, std::abs(curl_phys(ix, iy) +
                                   4.0 * std::sin(g.x(ix)) * std::sin(g.y(iy))));
  CHECK(err <= 1e-12);
}

TEST_CASE("initial state: isotropic and degenerate perturbation") {
  SimConfig cfg = base_config(32, 1.0, 1.0, Formulation::direct_c);
  Simulation sim(cfg);
  const TensorFieldR c = sim.conformation_phys();
  for (int iy = 0; iy < 32; ++iy)
    for (int ix = 0; ix < 32; ++ix) {
      CHECK(c.xx(ix, iy) + c.yy(ix, iy) == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(std::abs(c.xy(ix, iy)) <= 1e-13);
    }

  SimConfig pert = cfg;
  pert.ic = InitialCondition::perturbed;
  pert.epsilon = 0.0;
  Simulation sim_pert(pert);
  CHECK(tensor_max_diff(sim_pert.conformation_phys(), c) <= 1e-13);
}

TEST_CASE("initial state: perturbation keeps SPD, both formulations share c") {
  SimConfig cfg_b = base_config(32, 1.0, 1.0, Formulation::sqrt_b);
  cfg_b.ic = InitialCondition::perturbed;
  cfg_b.epsilon = 0.01;
  Simulation sim_b(cfg_b);
  const SpdScan scan = spd_monitor(sim_b.tensor_phys(), TensorMeaning::square_root);
  CHECK(scan.min_eig >= (1.0 - 0.013) * (1.0 - 0.013));

  SimConfig cfg_c = cfg_b;
  cfg_c.formulation = Formulation::direct_c;
  Simulation sim_c(cfg_c);
  CHECK(tensor_max_diff(sim_b.conformation_phys(), sim_c.conformation_phys()) <= 1e-12);
}

TEST_CASE("initial state: oversized perturbation is rejected") {
  SimConfig cfg = base_config(32, 1.0, 1.0, Formulation::sqrt_b);
  cfg.ic = InitialCondition::perturbed;
  cfg.epsilon = 1.0;  // eps * ||E|| > 1 somewhere
  CHECK_THROWS_AS(Simulation{cfg}, PerturbationTooLarge);
}

TEST_CASE("first step: tensor stays near identity, flow is driven immediately") {
  SimConfig cfg = base_config(64, 1.0, 1.0, Formulation::direct_c);
  cfg.dt = 1e-3;
  Simulation sim(cfg);

  // force acts from step zero: u = f/2 at the isotropic state
  const VectorFieldR u0 = sim.velocity_phys();
  const VectorFieldR f = Simulation::forcing_field(sim.grid());
  double verr = 0.0;
  for (std::size_t k = 0; k < u0.x.size(); ++k) {
    verr = std::max(verr, std::abs(u0.x.data()[k] - 0.5 * f.x.data()[k]));
    verr = std::max(verr, std::abs(u0.y.data()[k] - 0.5 * f.y.data()[k]));
  }
  CHECK(verr <= 1e-12);

  CHECK(sim.step());
  const TensorFieldR c1 = sim.tensor_phys();
  double dev = 0.0;
  for (int iy = 0; iy < 64; ++iy)
    for (int ix = 0; ix < 64; ++ix)
      dev = std::max({dev, std::abs(c1.xx(ix, iy) - 1.0), std::abs(c1.xy(ix, iy)),
                      std::abs(c1.yy(ix, iy) - 1.0)});
  CHECK(dev <= 5.0 * cfg.dt);  // within O(dt) of the identity
  CHECK(dev > 0.0);
  CHECK(spectral_max_abs(sim.velocity_spec()) > 1e-3);
}

TEST_CASE("decoupled polymer (s = 0) leaves the exact Stokes flow invariant") {
  SimConfig cfg = base_config(32, 2.0, 0.05, Formulation::sqrt_b);
  cfg.model.s = 0.0;
  cfg.dt = 1e-3;
  Simulation sim(cfg);
  const VectorFieldR f = Simulation::forcing_field(sim.grid());
  for (int n = 0; n < 50; ++n) CHECK(sim.step());
  const VectorFieldR u = sim.velocity_phys();
  double verr = 0.0;
  for (std::size_t k = 0; k < u.x.size(); ++k) {
    verr = std::max(verr, std::abs(u.x.data()[k] - 0.5 * f.x.data()[k]));
    verr = std::max(verr, std::abs(u.y.data()[k] - 0.5 * f.y.data()[k]));
  }
  CHECK(verr <= 1e-12);
}

TEST_CASE("divergence-free velocity and SqrtB positivity along a run") {
  SimConfig cfg = base_config(32, 5.0, 0.5, Formulation::sqrt_b);
  Simulation sim(cfg);
  for (int n = 0; n < 20; ++n) {
    CHECK(sim.step());
    CHECK(spectral_divergence_max(sim.velocity_spec()) <=
          1e-12 * std::max(spectral_max_abs(sim.velocity_spec()), 1e-30));
  }
  const SpdScan scan = spd_monitor(sim.tensor_phys(), TensorMeaning::square_root);
  CHECK(scan.min_eig >= 0.0);
}

TEST_CASE("four-roll symmetries of the vorticity at early times") {
  SimConfig cfg = base_config(64, 5.0, 1.0, Formulation::sqrt_b);
  Simulation sim(cfg);
  const RunReport report = sim.run();
  CHECK(report.completed());

  SpecField curl = deriv(sim.velocity_spec().y, Axis::x);
  const SpecField dyux = deriv(sim.velocity_spec().x, Axis::y);
  for (std::size_t k = 0; k < curl.size(); ++k) curl.data()[k] -= dyux.data()[k];
  const RealField w = inverse_transform(curl);

  const int n = 64;
  double err = 0.0, scale = w.max_abs();
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int mx = (n - ix) % n;  // x -> -x
      const int my = (n - iy) % n;
      err = std::max(err, std::abs(w(ix, iy) + w(mx, iy)));
      err = std::max(err, std::abs(w(ix, iy) + w(ix, my)));
    }
  CHECK(err <= 1e-8 * std::max(scale, 1.0));
}

TEST_CASE("four-roll vorticity pattern and stress ridge along x = 0") {
  SimConfig cfg = base_config(64, 5.0, 2.0, Formulation::sqrt_b);
  Simulation sim(cfg);
  REQUIRE(sim.run().completed());

  // vorticity keeps one sign per quadrant (four rolls)
  SpecField curl = deriv(sim.velocity_spec().y, Axis::x);
  const SpecField dyux = deriv(sim.velocity_spec().x, Axis::y);
  for (std::size_t k = 0; k < curl.size(); ++k) curl.data()[k] -= dyux.data()[k];
  const RealField w = inverse_transform(curl);
  // w ~ -2 sin x sin y: negative in the (-,-) and (+,+) quadrants
  const int q = 16;  // quadrant centers (+-pi/2, +-pi/2)
  CHECK(w(q, q) < 0.0);  // (-pi/2, -pi/2)
  CHECK(w(3 * q, q) > 0.0);
  CHECK(w(q, 3 * q) > 0.0);
  CHECK(w(3 * q, 3 * q) < 0.0);

  // polymer stress grows and concentrates along the outgoing manifold x = 0
  const TensorFieldR c = sim.conformation_phys();
  double global_max = 0.0, column_max = 0.0;
  for (int iy = 0; iy < 64; ++iy)
    for (int ix = 0; ix < 64; ++ix) {
      const double tr = c.xx(ix, iy) + c.yy(ix, iy);
      global_max = std::max(global_max, tr);
      if (ix == 32) column_max = std::max(column_max, tr);
    }
  CHECK(global_max > 2.2);
  CHECK(column_max >= 0.999 * global_max);
}

TEST_CASE("AB2 convergence: both formulations, order ~2, formulations agree") {
  // quick version of the PDE-level consistency check (acceptance runs the
  // full criterion at N = 64, t = 1)
  const int n = 32;
  const double t_end = 0.5;
  const double dts[3] = {4e-3, 2e-3, 1e-3};

  TensorFieldR c_sol[3], b_sol[3];
  for (int lev = 0; lev < 3; ++lev) {
    SimConfig cc = base_config(n, 1.0, t_end, Formulation::direct_c);
    cc.dt = dts[lev];
    Simulation sc(cc);
    CHECK(sc.run().completed());
    c_sol[lev] = sc.conformation_phys();

    SimConfig cb = base_config(n, 1.0, t_end, Formulation::sqrt_b);
    cb.dt = dts[lev];
    Simulation sb(cb);
    CHECK(sb.run().completed());
    b_sol[lev] = sb.conformation_phys();
  }

  const double e0 = tensor_l1_diff(c_sol[0], c_sol[2]);
  const double e1 = tensor_l1_diff(c_sol[1], c_sol[2]);
  const double order_c = std::log2(e0 / e1) - 1.0;  // Richardson vs finest level
  CHECK(order_c > 1.0);

  // formulation gap decreases at roughly second order
  const double g0 = tensor_l1_diff(c_sol[0], b_sol[0]);
  const double g1 = tensor_l1_diff(c_sol[1], b_sol[1]);
  const double g2 = tensor_l1_diff(c_sol[2], b_sol[2]);
  CHECK(g1 < g0);
  CHECK(g2 < g1);
}

TEST_CASE("runs are deterministic") {
  SimConfig cfg = base_config(32, 3.0, 0.2, Formulation::sqrt_b);
  cfg.ic = InitialCondition::perturbed;
  Simulation a(cfg), b(cfg);
  for (int k = 0; k < 10; ++k) {
    CHECK(a.step());
    CHECK(b.step());
  }
  const TensorFieldR qa = a.tensor_phys();
  const TensorFieldR qb = b.tensor_phys();
  CHECK(tensor_max_diff(qa, qb) == 0.0);
}

TEST_CASE("report carries series and t_end = 0 returns the initial state") {
  SimConfig cfg = base_config(32, 1.0, 0.0, Formulation::direct_c);
  Simulation sim(cfg);
  const RunReport report = sim.run();
  CHECK(report.completed());
  CHECK(report.steps == 0);
  CHECK(report.t_final == 0.0);
  CHECK(report.series.size() == 1);
  CHECK(report.series[0].max_tr_c == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(report.series[0].min_eig_c == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("config validation") {
  SimConfig cfg = base_config(33, 1.0, 1.0, Formulation::direct_c);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = base_config(32, -1.0, 1.0, Formulation::direct_c);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = base_config(32, 1.0, 1.0, Formulation::direct_c);
  cfg.snapshot_interval = 2.0;  // > t_end
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.snapshot_interval = 0.5;
  CHECK_NOTHROW(cfg.validate());
}
