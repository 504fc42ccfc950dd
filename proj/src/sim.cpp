#include "vefs/sim.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace vefs {

namespace {

constexpr double kTraceBlowUpLimit = 1e12;

inline SymMat<2> tensor_at(const TensorFieldR& f, int ix, int iy) {
  SymMat<2> m;
  m(0, 0) = f.xx(ix, iy);
  m(0, 1) = f.xy(ix, iy);
  m(1, 1) = f.yy(ix, iy);
  return m;
}

inline Mat<2> grad_at(const GradFieldsR& g, int ix, int iy) {
  Mat<2> m;
  m(0, 0) = g.dx_ux(ix, iy);
  m(0, 1) = g.dx_uy(ix, iy);
  m(1, 0) = g.dy_ux(ix, iy);
  m(1, 1) = g.dy_uy(ix, iy);
  return m;
}

// eigenvalue bounds of the 2x2 conformation tensor at one point
inline void conformation_eigs(Formulation form, double xx, double xy, double yy,
                              double& min_eig, double& trace) {
  const double mean = 0.5 * (xx + yy);
  const double disc = std::sqrt(0.25 * (xx - yy) * (xx - yy) + xy * xy);
  const double lo = mean - disc;
  if (form == Formulation::direct_c) {
    min_eig = lo;
    trace = xx + yy;
  } else {
    // q = b: eigenvalues of c = b*b are the squares of b's
    const double hi = mean + disc;
    min_eig = std::min(lo * lo, hi * hi);
    trace = xx * xx + 2.0 * xy * xy + yy * yy;
  }
}

// Parseval weight: kx = 0 and kx = n/2 columns appear once in the
// half-complex storage, every other column stands for a conjugate pair
inline double mode_weight(int kx, int n) { return (kx == 0 || kx == n / 2) ? 1.0 : 2.0; }

double spectral_mean_square(const SpecField& f) {
  const int n = f.n();
  double s = 0.0;
  for (int my = 0; my < n; ++my)
    for (int kx = 0; kx < f.nkx(); ++kx) s += mode_weight(kx, n) * std::norm(f(kx, my));
  return s;
}

}  // namespace

void SimConfig::validate() const {
  Grid2 check(n);  // even, positive
  model.validate(2);
  if (t_end < 0.0) throw ConfigError("t_end must be >= 0");
  if (dt < 0.0) throw ConfigError("dt must be >= 0 (0 selects the default)");
  if (epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
  if (diagnostic_interval <= 0.0) throw ConfigError("diagnostic_interval must be > 0");
  if (snapshot_interval < 0.0) throw ConfigError("snapshot_interval must be >= 0");
  if (t_end > 0.0) {
    if (resolved_dt() > t_end) throw ConfigError("dt must not exceed t_end");
    if (snapshot_interval > 0.0 &&
        (snapshot_interval <= resolved_dt() || snapshot_interval > t_end))
      throw ConfigError("snapshot_interval must satisfy dt < interval <= t_end");
  }
}

VectorFieldR Simulation::forcing_field(Grid2 grid) {
  VectorFieldR f(grid);
  for (int iy = 0; iy < grid.n; ++iy) {
    const double y = grid.y(iy);
    for (int ix = 0; ix < grid.n; ++ix) {
      const double x = grid.x(ix);
      f.x(ix, iy) = -2.0 * std::sin(x) * std::cos(y);
      f.y(ix, iy) = 2.0 * std::cos(x) * std::sin(y);
    }
  }
  return f;
}

Simulation::Simulation(const SimConfig& cfg) : cfg_(cfg), grid_(cfg.n) {
  cfg_.validate();

  steps_total_ = cfg_.t_end > 0.0
                     ? static_cast<long>(std::ceil(cfg_.t_end / cfg_.resolved_dt() - 1e-9))
                     : 0;
  dt_eff_ = steps_total_ > 0 ? cfg_.t_end / steps_total_ : cfg_.resolved_dt();

  // initial tensor field: b0 = I + eps sin x sin y E, c0 = b0^2, so both
  // formulations start from the identical conformation field
  TensorFieldR q0(grid_);
  double min_eig_b0 = 1.0;
  for (int iy = 0; iy < grid_.n; ++iy) {
    const double sy = std::sin(grid_.y(iy));
    for (int ix = 0; ix < grid_.n; ++ix) {
      SymMat<2> b = SymMat<2>::identity();
      if (cfg_.ic == InitialCondition::perturbed) {
        const double amp = cfg_.epsilon * std::sin(grid_.x(ix)) * sy;
        b(0, 0) += amp;
        b(0, 1) += 0.5 * amp;
        b(1, 1) -= amp;
      }
      min_eig_b0 = std::min(min_eig_b0, min_eigenvalue(b));
      if (cfg_.formulation == Formulation::sqrt_b) {
        q0.xx(ix, iy) = b(0, 0);
        q0.xy(ix, iy) = b(0, 1);
        q0.yy(ix, iy) = b(1, 1);
      } else {
        const Mat<2> c = b * b;
        q0.xx(ix, iy) = c(0, 0);
        q0.xy(ix, iy) = c(0, 1);
        q0.yy(ix, iy) = c(1, 1);
      }
    }
  }
  if (min_eig_b0 <= 0.0) throw PerturbationTooLarge(min_eig_b0);

  q_spec_ = TensorFieldS(grid_);
  for (int k = 0; k < 3; ++k) q_spec_.comp(k) = forward_transform(q0.comp(k));
  prev_rhs_ = TensorFieldS(grid_);

  const VectorFieldR f = forcing_field(grid_);
  force_spec_ = VectorFieldS(grid_);
  force_spec_.x = forward_transform(f.x);
  force_spec_.y = forward_transform(f.y);

  rebuild_tensor_caches();
  scan_tensor_caches();
  if (!update_velocity())
    throw ConfigError("initial state is outside the model's admissible range");
}

void Simulation::rebuild_tensor_caches() {
  q_phys_ = TensorFieldR(grid_);
  for (int k = 0; k < 3; ++k)
    q_phys_.comp(k) = inverse_transform(smooth_filter(q_spec_.comp(k)));
}

void Simulation::scan_tensor_caches() {
  scan_min_eig_ = std::numeric_limits<double>::infinity();
  scan_max_tr_ = -std::numeric_limits<double>::infinity();
  scan_finite_ = true;
  scan_nonfinite_ix_ = scan_nonfinite_iy_ = -1;
  for (int iy = 0; iy < grid_.n; ++iy)
    for (int ix = 0; ix < grid_.n; ++ix) {
      const double xx = q_phys_.xx(ix, iy);
      const double xy = q_phys_.xy(ix, iy);
      const double yy = q_phys_.yy(ix, iy);
      if (!std::isfinite(xx) || !std::isfinite(xy) || !std::isfinite(yy)) {
        if (scan_finite_) {
          scan_finite_ = false;
          scan_nonfinite_ix_ = ix;
          scan_nonfinite_iy_ = iy;
        }
        continue;
      }
      double min_eig, trace;
      conformation_eigs(cfg_.formulation, xx, xy, yy, min_eig, trace);
      if (min_eig < scan_min_eig_) {
        scan_min_eig_ = min_eig;
        scan_argmin_ix_ = ix;
        scan_argmin_iy_ = iy;
      }
      if (trace > scan_max_tr_) {
        scan_max_tr_ = trace;
        scan_argmax_ix_ = ix;
        scan_argmax_iy_ = iy;
      }
    }
}

bool Simulation::update_velocity() {
  // polymer stress tau = -s * s(c), formed pointwise from the filtered
  // conformation field, then filtered again before its divergence is taken
  TensorFieldR tau(grid_);
  const double s_over_wi = cfg_.model.s / cfg_.model.wi;
  int ix = 0, iy = 0;
  try {
    for (iy = 0; iy < grid_.n; ++iy)
      for (ix = 0; ix < grid_.n; ++ix) {
        double cxx = q_phys_.xx(ix, iy);
        double cxy = q_phys_.xy(ix, iy);
        double cyy = q_phys_.yy(ix, iy);
        if (cfg_.formulation == Formulation::sqrt_b) {
          const double bxx = cxx, bxy = cxy, byy = cyy;
          cxx = bxx * bxx + bxy * bxy;
          cxy = bxy * (bxx + byy);
          cyy = bxy * bxy + byy * byy;
        }
        // tau = -s (I - P c)/Wi = (s/Wi)(P c - I), P the Peterlin factor
        double pf = 1.0;
        if (cfg_.model.kind == ModelKind::fene_p)
          pf = peterlin_factor(cxx + cyy, cfg_.model.l2);
        tau.xx(ix, iy) = s_over_wi * (pf * cxx - 1.0);
        tau.xy(ix, iy) = s_over_wi * (pf * cxy);
        tau.yy(ix, iy) = s_over_wi * (pf * cyy - 1.0);
      }
  } catch (const Error& e) {
    blow_up_ = BlowUpEvent{time(), e.what(), ix, iy};
    return false;
  }

  TensorFieldS tau_spec(grid_);
  for (int k = 0; k < 3; ++k) {
    tau_spec.comp(k) = forward_transform(tau.comp(k));
    smooth_filter_inplace(tau_spec.comp(k));
  }

  VectorFieldS rhs(grid_);
  rhs.x = deriv(tau_spec.xx, Axis::x);
  rhs.x += deriv(tau_spec.xy, Axis::y);
  rhs.y = deriv(tau_spec.xy, Axis::x);
  rhs.y += deriv(tau_spec.yy, Axis::y);
  rhs.x += force_spec_.x;
  rhs.y += force_spec_.y;

  u_spec_ = stokes_solve(rhs);
  rebuild_velocity_caches();
  return true;
}

void Simulation::rebuild_velocity_caches() {
  const SpecField ux_f = smooth_filter(u_spec_.x);
  const SpecField uy_f = smooth_filter(u_spec_.y);
  u_phys_ = VectorFieldR(grid_);
  u_phys_.x = inverse_transform(ux_f);
  u_phys_.y = inverse_transform(uy_f);
  grad_phys_ = GradFieldsR(grid_);
  grad_phys_.dx_ux = inverse_transform(deriv(ux_f, Axis::x));
  grad_phys_.dy_ux = inverse_transform(deriv(ux_f, Axis::y));
  grad_phys_.dx_uy = inverse_transform(deriv(uy_f, Axis::x));
  grad_phys_.dy_uy = inverse_transform(deriv(uy_f, Axis::y));
}

bool Simulation::evaluate_rhs(TensorFieldR& out) {
  // R = -(u . grad q) + pointwise constitutive right-hand side
  TensorFieldR adv(grid_);
  for (int k = 0; k < 3; ++k) adv.comp(k) = advect_phys(u_phys_, q_spec_.comp(k));

  int ix = 0, iy = 0;
  try {
    for (iy = 0; iy < grid_.n; ++iy)
      for (ix = 0; ix < grid_.n; ++ix) {
        const SymMat<2> q = tensor_at(q_phys_, ix, iy);
        const Mat<2> g = grad_at(grad_phys_, ix, iy);
        const SymMat<2> r = cfg_.formulation == Formulation::direct_c
                                ? rhs_c(q, g, cfg_.model)
                                : rhs_b(q, g, cfg_.model);
        out.xx(ix, iy) = r(0, 0) - adv.xx(ix, iy);
        out.xy(ix, iy) = r(0, 1) - adv.xy(ix, iy);
        out.yy(ix, iy) = r(1, 1) - adv.yy(ix, iy);
      }
  } catch (const Error& e) {
    blow_up_ = BlowUpEvent{time(), e.what(), ix, iy};
    return false;
  }
  return true;
}

bool Simulation::step() {
  if (blow_up_) return false;

  TensorFieldR rhs_phys(grid_);
  if (!evaluate_rhs(rhs_phys)) return false;

  TensorFieldS rhs_spec(grid_);
  for (int k = 0; k < 3; ++k) rhs_spec.comp(k) = forward_transform(rhs_phys.comp(k));

  for (int k = 0; k < 3; ++k) {
    cplx* q = q_spec_.comp(k).data();
    const cplx* r = rhs_spec.comp(k).data();
    const cplx* p = prev_rhs_.comp(k).data();
    const std::size_t count = q_spec_.comp(k).size();
    if (have_prev_rhs_) {
      for (std::size_t m = 0; m < count; ++m)
        q[m] += dt_eff_ * (1.5 * r[m] - 0.5 * p[m]);
    } else {
      for (std::size_t m = 0; m < count; ++m) q[m] += dt_eff_ * r[m];
    }
    // the evolved spectrum itself is smoothed every step; without this the
    // top of the spectrum accumulates unfelt content (the filtered
    // evaluations never see it) and quasi-steady ridge modes grow without
    // bound on long horizons
    smooth_filter_inplace(q_spec_.comp(k));
  }
  prev_rhs_ = std::move(rhs_spec);
  have_prev_rhs_ = true;
  ++step_;

  rebuild_tensor_caches();
  scan_tensor_caches();

  if (!scan_finite_) {
    blow_up_ = BlowUpEvent{time(), "non_finite", scan_nonfinite_ix_, scan_nonfinite_iy_};
    return false;
  }
  if (cfg_.formulation == Formulation::direct_c && scan_min_eig_ < 0.0 &&
      !first_spd_loss_)
    first_spd_loss_ = SpdLossEvent{time(), scan_argmin_ix_, scan_argmin_iy_, scan_min_eig_};
  if (cfg_.model.kind == ModelKind::oldroyd_b && scan_max_tr_ > kTraceBlowUpLimit) {
    blow_up_ = BlowUpEvent{time(), "trace_overflow", scan_argmax_ix_, scan_argmax_iy_};
    return false;
  }

  return update_velocity();
}

DiagSample Simulation::sample() const {
  DiagSample d;
  d.t = time();
  const double area = 4.0 * std::numbers::pi * std::numbers::pi;
  d.kinetic =
      0.5 * area * (spectral_mean_square(u_spec_.x) + spectral_mean_square(u_spec_.y));
  if (cfg_.formulation == Formulation::direct_c) {
    d.elastic = 0.5 * cfg_.model.s * area *
                (q_spec_.xx(0, 0).real() + q_spec_.yy(0, 0).real());
  } else {
    d.elastic = 0.5 * cfg_.model.s * area *
                (spectral_mean_square(q_spec_.xx) + 2.0 * spectral_mean_square(q_spec_.xy) +
                 spectral_mean_square(q_spec_.yy));
  }
  d.max_tr_c = scan_max_tr_;
  d.min_eig_c = scan_min_eig_;
  return d;
}

RunReport Simulation::run(const SnapshotHook& on_snapshot, const DiagHook& on_diag) {
  RunReport report;

  const auto emit_diag = [&] {
    const DiagSample d = sample();
    report.series.push_back(d);
    if (on_diag) on_diag(*this, d);
  };

  if (on_snapshot) on_snapshot(*this);
  emit_diag();

  double next_diag = cfg_.diagnostic_interval;
  double next_snap =
      cfg_.snapshot_interval > 0.0 ? cfg_.snapshot_interval : std::numeric_limits<double>::infinity();

  while (step_ < steps_total_ && !blow_up_) {
    if (!step()) break;
    const double t = time();
    const double half = 0.5 * dt_eff_;
    if (t >= next_diag - half) {
      emit_diag();
      next_diag = (std::floor(t / cfg_.diagnostic_interval + 0.5) + 1.0) *
                  cfg_.diagnostic_interval;
    }
    if (t >= next_snap - half) {
      if (on_snapshot) on_snapshot(*this);
      next_snap = (std::floor(t / cfg_.snapshot_interval + 0.5) + 1.0) *
                  cfg_.snapshot_interval;
    }
  }

  if (!blow_up_) {
    if (report.series.empty() || report.series.back().t < time() - 0.5 * dt_eff_)
      emit_diag();
    if (on_snapshot && steps_total_ > 0) on_snapshot(*this);
  }

  report.blow_up = blow_up_;
  report.first_spd_loss = first_spd_loss_;
  report.t_final = time();
  report.steps = step_;
  return report;
}

TensorFieldR Simulation::tensor_phys() const {
  TensorFieldR out(grid_);
  for (int k = 0; k < 3; ++k) out.comp(k) = inverse_transform(q_spec_.comp(k));
  return out;
}

VectorFieldR Simulation::velocity_phys() const {
  VectorFieldR out(grid_);
  out.x = inverse_transform(u_spec_.x);
  out.y = inverse_transform(u_spec_.y);
  return out;
}

TensorFieldR Simulation::conformation_phys() const {
  TensorFieldR q = tensor_phys();
  if (cfg_.formulation == Formulation::direct_c) return q;
  TensorFieldR c(grid_);
  for (int iy = 0; iy < grid_.n; ++iy)
    for (int ix = 0; ix < grid_.n; ++ix) {
      const double bxx = q.xx(ix, iy), bxy = q.xy(ix, iy), byy = q.yy(ix, iy);
      c.xx(ix, iy) = bxx * bxx + bxy * bxy;
      c.xy(ix, iy) = bxy * (bxx + byy);
      c.yy(ix, iy) = bxy * bxy + byy * byy;
    }
  return c;
}

}  // namespace vefs
