#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vefs/runner.hpp"

namespace vefs {

enum class Study { accuracy, stability, fene_p };

/// One experiment sweep: which model, which Weissenberg numbers, which
/// resolutions, against which reference, evaluated at a fixed time or at the
/// scaled time t = T * Wi.
struct ExperimentSpec {
  Study study = Study::accuracy;
  ModelKind model = ModelKind::oldroyd_b;
  std::vector<double> wi_list;
  std::vector<int> n_list;
  int n_ref = 512;
  double t_end = 10.0;
  bool scaled_time = false;
  double scaled_T = 2.0;
  double s = 0.5;
  double l2 = 100.0;
  InitialCondition ic = InitialCondition::isotropic;
  double epsilon = 0.01;
  double horizon = 100.0;        ///< stability-run cap
  double survival_factor = 5.0;  ///< sqrt_b must reach survival_factor * t_blow(direct_c)
  double dt = 0.0;               ///< 0: per-run default, scaled with 1/N
  bool compare_s_tensor = false; ///< compare S(c) instead of c (FENE-P accuracy)
  std::uint64_t seed = 0;
  int parallelism = 0;           ///< 0: hardware concurrency

  void validate() const;

  // desk-scale presets (the paper-scale variants are one config away)
  static ExperimentSpec accuracy_desk();
  static ExperimentSpec improvement_desk();
  static ExperimentSpec stability_desk();
  static ExperimentSpec fenep_accuracy_desk();
  static ExperimentSpec fenep_stability_desk();

  static ExperimentSpec accuracy_full();
  static ExperimentSpec improvement_full();
  static ExperimentSpec stability_full();
  static ExperimentSpec fenep_accuracy_full();
  static ExperimentSpec fenep_stability_full();
};

/// One (Wi, N, formulation) accuracy row; `valid` is false when either the
/// row's run or its reference blew up.
struct ErrorRow {
  double wi = 0.0;
  int n = 0;
  Formulation formulation = Formulation::direct_c;
  double t = 0.0;
  double l1 = 0.0;
  bool relative = true;
  bool valid = true;
  std::string flag;
  std::string config_hash;
  std::uint64_t seed = 0;
  double dt = 0.0;
};

struct ImprovementRow {
  double wi = 0.0;
  int n = 0;
  double t = 0.0;
  double err_c = 0.0;
  double err_b2 = 0.0;
  double improvement = 0.0;
  bool valid = true;
};

struct AccuracyResult {
  std::vector<ErrorRow> rows;
  std::vector<ImprovementRow> improvements;
  const ErrorRow* find(double wi, int n, Formulation f) const;
  const ImprovementRow* find_improvement(double wi, int n) const;
};

/// Outcome of one stability run.
struct StabilityOutcome {
  double wi = 0.0;
  int n = 0;
  Formulation formulation = Formulation::direct_c;
  std::string status;
  double t_final = 0.0;
  std::optional<double> t_blow_up;
  std::string blow_up_reason;
  std::optional<double> t_first_spd_loss;
  double max_tr_seen = 0.0;
  double min_eig_seen = 0.0;
  std::string config_hash;
  std::uint64_t seed = 0;
  double dt = 0.0;
};

struct StabilityResult {
  std::vector<StabilityOutcome> outcomes;
  const StabilityOutcome* find(double wi, int n, Formulation f) const;
};

struct FenePResult {
  AccuracyResult accuracy;
  StabilityResult stability;
};

/// Runs both formulations at every (Wi, N) against the direct-c reference at
/// N_ref and tabulates L1 errors and the improvement metric.  Completed runs
/// are cached under workdir/runs keyed by config hash.
AccuracyResult run_accuracy(const ExperimentSpec& spec,
                            const std::filesystem::path& workdir);

/// Runs direct-c first (so its blow-up time, if any, sets the square-root
/// horizon max(survival_factor * t_blow, horizon)) and then sqrt_b, with the
/// identical perturbed initial data and no stress diffusion.
StabilityResult run_stability(const ExperimentSpec& spec,
                              const std::filesystem::path& workdir);

/// FENE-P study: S-tensor accuracy arm plus high-Wi stability arm.
FenePResult run_fenep(const ExperimentSpec& accuracy_spec,
                      const ExperimentSpec& stability_spec,
                      const std::filesystem::path& workdir);

void write_accuracy_csv(const AccuracyResult& r, const std::filesystem::path& file);
void write_improvement_csv(const AccuracyResult& r, const std::filesystem::path& file);
void write_event_log_csv(const StabilityResult& r, const std::filesystem::path& file);

/// Diagnostics series parsed back from a run directory's CSV.
std::vector<DiagSample> read_diagnostics_csv(const std::filesystem::path& run_dir);

}  // namespace vefs
