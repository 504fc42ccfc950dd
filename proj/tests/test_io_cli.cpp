#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "vefs/runner.hpp"
#include "vefs/snapshot.hpp"

using namespace vefs;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "vefs_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

SimConfig small_sim() {
  SimConfig cfg;
  cfg.n = 32;
  cfg.model.wi = 2.0;
  cfg.t_end = 0.2;
  cfg.dt = 5e-3;
  cfg.formulation = Formulation::sqrt_b;
  cfg.diagnostic_interval = 0.05;
  return cfg;
}

}  // namespace

TEST_CASE("snapshot round trip is bit-exact") {
  const fs::path dir = temp_dir("snapshot_roundtrip");
  Simulation sim(small_sim());
  for (int k = 0; k < 5; ++k) REQUIRE(sim.step());

  const fs::path file = dir / "snap_000000.vefs";
  write_snapshot(file, sim);
  const Snapshot snap = read_snapshot(file);

  CHECK(snap.n == 32);
  CHECK(snap.time == sim.time());
  CHECK(snap.formulation == Formulation::sqrt_b);
  CHECK(snap.field_names.size() == 8);  // u, c, and b blocks

  const TensorFieldR c = sim.conformation_phys();
  const RealField& c_xx = snap.require("c_xx");
  CHECK(std::memcmp(c_xx.data(), c.xx.data(), c.xx.size() * sizeof(double)) == 0);
  const VectorFieldR u = sim.velocity_phys();
  CHECK(std::memcmp(snap.require("u_x").data(), u.x.data(),
                    u.x.size() * sizeof(double)) == 0);

  // write the same state again: identical bytes
  const fs::path file2 = dir / "snap_000001.vefs";
  write_snapshot(file2, sim);
  CHECK(file_bytes(file) == file_bytes(file2));
}

TEST_CASE("config parsing, defaults, and canonical round trip") {
  const std::string text =
      "# comment line\n"
      "model = fene_p\n"
      "N = 64\n"
      "Wi = 10\n"
      "l2 = 225\n"
      "t_end = 0.5\n"
      "ic = perturbed\n";
  const RunConfig cfg = parse_run_config_text(text);
  CHECK(cfg.sim.model.kind == ModelKind::fene_p);
  CHECK(cfg.sim.n == 64);
  CHECK(cfg.sim.model.wi == 10.0);
  CHECK(cfg.sim.model.l2 == 225.0);
  CHECK(cfg.sim.ic == InitialCondition::perturbed);
  // defaults
  CHECK(cfg.sim.model.s == 0.5);
  CHECK(cfg.sim.formulation == Formulation::sqrt_b);
  CHECK(cfg.sim.epsilon == 0.01);

  const std::string canonical = serialize_config(cfg);
  const RunConfig reparsed = parse_run_config_text(canonical);
  CHECK(serialize_config(reparsed) == canonical);
  CHECK(config_hash(reparsed) == config_hash(cfg));
}

TEST_CASE("config errors name the offender") {
  CHECK_THROWS_WITH_AS(parse_run_config_text("foo = 1\n"),
                       doctest::Contains("unknown key 'foo'"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("Wi = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("model = maxwell\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("just some text\n"), ConfigError);
}

TEST_CASE("output_dir does not change the physics hash") {
  RunConfig a;
  RunConfig b;
  b.output_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  b.sim.model.wi = 7.0;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("run_to_dir: artifacts, t_end = 0, reuse") {
  const fs::path dir = temp_dir("runner_minimal");
  RunConfig cfg;
  cfg.sim = small_sim();
  cfg.sim.t_end = 0.0;
  cfg.output_dir = (dir / "a").string();

  const RunSummary summary = run_to_dir(cfg, dir / "a");
  CHECK(summary.completed());
  CHECK(summary.steps == 0);
  CHECK(list_snapshots(dir / "a").size() == 1);  // initial snapshot only
  CHECK(fs::exists(dir / "a" / "diagnostics.csv"));
  CHECK(fs::exists(dir / "a" / "config.txt"));

  // cached reuse: summary readable without recompute
  const RunSummary again = run_to_dir(cfg, dir / "a", /*reuse_cached=*/true);
  CHECK(again.completed());
  CHECK(again.config_hash == summary.config_hash);
}

TEST_CASE("runs are byte-for-byte deterministic") {
  const fs::path dir = temp_dir("determinism");
  RunConfig cfg;
  cfg.sim = small_sim();
  cfg.sim.ic = InitialCondition::perturbed;
  cfg.sim.snapshot_interval = 0.1;

  run_to_dir(cfg, dir / "a");
  run_to_dir(cfg, dir / "b");

  const auto snaps_a = list_snapshots(dir / "a");
  const auto snaps_b = list_snapshots(dir / "b");
  REQUIRE(snaps_a.size() == snaps_b.size());
  for (std::size_t k = 0; k < snaps_a.size(); ++k)
    CHECK(file_bytes(snaps_a[k]) == file_bytes(snaps_b[k]));
  CHECK(file_bytes(dir / "a" / "diagnostics.csv") == file_bytes(dir / "b" / "diagnostics.csv"));
  CHECK(file_bytes(dir / "a" / "config.txt") == file_bytes(dir / "b" / "config.txt"));
}

TEST_CASE("load_snapshot_at reports available times") {
  const fs::path dir = temp_dir("missing_snapshot");
  RunConfig cfg;
  cfg.sim = small_sim();
  cfg.sim.snapshot_interval = 0.1;
  run_to_dir(cfg, dir / "a");

  CHECK_NOTHROW(load_snapshot_at(dir / "a", 0.2));
  CHECK_THROWS_AS(load_snapshot_at(dir / "a", 17.0), MissingSnapshot);
  try {
    load_snapshot_at(dir / "a", 17.0);
  } catch (const MissingSnapshot& e) {
    CHECK(std::string(e.what()).find("0.2") != std::string::npos);
  }
}
