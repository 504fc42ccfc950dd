#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "vefs/runconfig.hpp"
#include "vefs/sim.hpp"
#include "vefs/snapshot.hpp"

namespace vefs {

/// Parsed contents of a run's summary file.
struct RunSummary {
  std::string status;  ///< "completed" or "blew_up"
  double t_final = 0.0;
  long steps = 0;
  double dt = 0.0;
  std::optional<BlowUpEvent> blow_up;
  std::optional<SpdLossEvent> first_spd_loss;
  std::string config_hash;
  bool completed() const { return status == "completed"; }
};

/// Executes the run into `dir` (created if needed), writing:
///   config.txt        canonical config echo
///   diagnostics.csv   t, kinetic, elastic, max_tr_c, min_eig_c
///   snap_XXXXXX.vefs  snapshots at the configured intervals
///   run_summary.json  machine-readable outcome
/// A blow-up is a recorded outcome, not a failure.  When `reuse_cached` is
/// set and the directory already holds a summary produced from the identical
/// canonical config, the run is skipped and the stored summary returned.
RunSummary run_to_dir(const RunConfig& cfg, const std::filesystem::path& dir,
                      bool reuse_cached = false);

RunSummary read_run_summary(const std::filesystem::path& dir);

/// Loads the final snapshot of a completed run (largest time on disk).
Snapshot load_final_snapshot(const std::filesystem::path& dir);

}  // namespace vefs
