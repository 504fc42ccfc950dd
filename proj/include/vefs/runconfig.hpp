#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "vefs/sim.hpp"

namespace vefs {

/// A run configuration: the simulation setup plus the output location.
/// File format is flat `key = value` text; `#` starts a comment.  Unknown
/// keys are rejected.  Defaults: Oldroyd-B, sqrt_b, N = 256, Wi = 5,
/// s = 0.5, isotropic initial data.
struct RunConfig {
  SimConfig sim;
  std::string output_dir = "out";
};

RunConfig parse_run_config(std::istream& in);
RunConfig parse_run_config_text(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& file);

/// Applies one `key=value` override to an existing config.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

/// Canonical serialization: every key, fixed order, full precision.
/// parse(serialize(x)) == x and serialize(parse(serialize(x))) is a fixed
/// point.  output_dir is excluded from the physics hash below.
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a hash of the canonical serialization minus output_dir: identifies
/// the physics of a run independently of where its artifacts land.
std::uint64_t config_hash(const RunConfig& cfg);

std::string config_hash_hex(const RunConfig& cfg);

}  // namespace vefs
