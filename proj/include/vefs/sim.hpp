#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vefs/constitutive.hpp"
#include "vefs/field.hpp"
#include "vefs/spectral.hpp"

namespace vefs {

enum class Formulation { direct_c, sqrt_b };
enum class InitialCondition { isotropic, perturbed };

inline const char* to_string(Formulation f) {
  return f == Formulation::direct_c ? "direct_c" : "sqrt_b";
}
inline const char* to_string(InitialCondition ic) {
  return ic == InitialCondition::isotropic ? "isotropic" : "perturbed";
}

/// Full description of one simulation run.
struct SimConfig {
  int n = 256;
  ModelParams model;
  Formulation formulation = Formulation::sqrt_b;
  double dt = 0.0;  ///< 0 selects the default 1e-3 * (256/n)
  double t_end = 10.0;
  InitialCondition ic = InitialCondition::isotropic;
  double epsilon = 0.01;  ///< perturbation amplitude
  double snapshot_interval = 0.0;  ///< 0: only initial and final snapshots
  double diagnostic_interval = 0.1;
  std::uint64_t seed = 0;

  double resolved_dt() const { return dt > 0.0 ? dt : 0.256 / n; }
  void validate() const;
};

struct DiagSample {
  double t = 0.0;
  double kinetic = 0.0;
  double elastic = 0.0;
  double max_tr_c = 0.0;
  double min_eig_c = 0.0;
};

struct BlowUpEvent {
  double t = 0.0;
  std::string reason;
  int ix = -1;
  int iy = -1;
};

struct SpdLossEvent {
  double t = 0.0;
  int ix = -1;
  int iy = -1;
  double min_eig = 0.0;
};

struct RunReport {
  std::vector<DiagSample> series;
  std::optional<BlowUpEvent> blow_up;
  std::optional<SpdLossEvent> first_spd_loss;
  double t_final = 0.0;
  long steps = 0;
  bool completed() const { return !blow_up.has_value(); }
};

/// Velocity gradient fields, component (i,j) = d u_j / d x_i.
struct GradFieldsR {
  RealField dx_ux, dx_uy, dy_ux, dy_uy;
  explicit GradFieldsR(Grid2 g) : dx_ux(g), dx_uy(g), dy_ux(g), dy_uy(g) {}
  GradFieldsR() = default;
};

/// Coupled Stokes--polymer integrator on the periodic grid.  The evolved
/// tensor q is the conformation c (direct_c) or its symmetric square root b
/// (sqrt_b), advanced by second-order Adams-Bashforth in spectral space with
/// one explicit Euler priming step; the Stokes velocity is recomputed
/// exactly after every update.  Nonlinear terms are evaluated in physical
/// space from smooth-filtered factors; no stress diffusion anywhere.
class Simulation {
 public:
  using SnapshotHook = std::function<void(const Simulation&)>;
  using DiagHook = std::function<void(const Simulation&, const DiagSample&)>;

  explicit Simulation(const SimConfig& cfg);

  const SimConfig& config() const { return cfg_; }
  const Grid2& grid() const { return grid_; }
  double dt() const { return dt_eff_; }
  long total_steps() const { return steps_total_; }
  double time() const { return step_ * dt_eff_; }
  long step_count() const { return step_; }

  const TensorFieldS& tensor_spec() const { return q_spec_; }
  const VectorFieldS& velocity_spec() const { return u_spec_; }

  /// Exact (unfiltered) physical-space views of the prognostic state.
  TensorFieldR tensor_phys() const;
  VectorFieldR velocity_phys() const;
  /// Conformation tensor: q itself for direct_c, q*q pointwise for sqrt_b.
  TensorFieldR conformation_phys() const;

  const std::optional<BlowUpEvent>& blow_up() const { return blow_up_; }
  const std::optional<SpdLossEvent>& first_spd_loss() const { return first_spd_loss_; }

  /// One time step; returns false when the run has halted on a blow-up
  /// (the event is recorded, the state stays at its last finite value).
  bool step();

  /// Steps to t_end or blow-up, emitting snapshots and diagnostics at the
  /// configured intervals.
  RunReport run(const SnapshotHook& on_snapshot = nullptr,
                const DiagHook& on_diag = nullptr);

  DiagSample sample() const;

  /// Steady four-roll-mill body force (-2 sin x cos y, 2 cos x sin y).
  static VectorFieldR forcing_field(Grid2 grid);

 private:
  void rebuild_tensor_caches();
  void scan_tensor_caches();
  bool update_velocity();
  void rebuild_velocity_caches();
  bool evaluate_rhs(TensorFieldR& out);

  SimConfig cfg_;
  Grid2 grid_;
  double dt_eff_ = 0.0;
  long steps_total_ = 0;
  long step_ = 0;

  TensorFieldS q_spec_;
  VectorFieldS u_spec_;
  TensorFieldS prev_rhs_;
  bool have_prev_rhs_ = false;
  VectorFieldS force_spec_;

  // filtered physical-space evaluation caches
  TensorFieldR q_phys_;
  VectorFieldR u_phys_;
  GradFieldsR grad_phys_;

  // state-health scan of the latest tensor caches
  double scan_min_eig_ = 0.0;
  double scan_max_tr_ = 0.0;
  int scan_argmin_ix_ = 0, scan_argmin_iy_ = 0;
  int scan_argmax_ix_ = 0, scan_argmax_iy_ = 0;
  bool scan_finite_ = true;
  int scan_nonfinite_ix_ = -1, scan_nonfinite_iy_ = -1;

  std::optional<BlowUpEvent> blow_up_;
  std::optional<SpdLossEvent> first_spd_loss_;
};

}  // namespace vefs
