#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vefs/field.hpp"
#include "vefs/sim.hpp"

namespace vefs {

/// On-disk snapshot: a short text header (magic "VEFS1", grid size, time,
/// model, formulation, field list) followed by one raw little-endian
/// row-major block of N*N doubles per listed field.
struct Snapshot {
  int n = 0;
  double time = 0.0;
  ModelKind model = ModelKind::oldroyd_b;
  Formulation formulation = Formulation::sqrt_b;
  double wi = 0.0;
  double s = 0.0;
  double l2 = 0.0;       ///< meaningful only when has_l2
  bool has_l2 = false;
  std::vector<std::string> field_names;
  std::vector<RealField> fields;

  Grid2 grid() const { return Grid2(n); }

  const RealField* field(const std::string& name) const;
  const RealField& require(const std::string& name) const;

  /// Velocity and conformation views assembled from the stored blocks.
  VectorFieldR velocity() const;
  TensorFieldR conformation() const;
};

/// Writes u, c (and b for the square-root formulation) of the current state.
void write_snapshot(const std::filesystem::path& file, const Simulation& sim);

Snapshot read_snapshot(const std::filesystem::path& file);

/// Snapshot files under `dir`, sorted by time.
std::vector<std::filesystem::path> list_snapshots(const std::filesystem::path& dir);

/// The snapshot in `dir` whose time matches `t` to within `tol`; throws
/// MissingSnapshot listing the nearest available times otherwise.
Snapshot load_snapshot_at(const std::filesystem::path& dir, double t, double tol = 1e-6);

}  // namespace vefs
