#include "vefs/runner.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "vefs/snapshot.hpp"

namespace vefs {

namespace {

using nlohmann::json;

std::string snapshot_name(long index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snap_%06ld.vefs", index);
  return buf;
}

}  // namespace

RunSummary read_run_summary(const std::filesystem::path& dir) {
  std::ifstream in(dir / "run_summary.json");
  if (!in) throw IoError("no run summary in '" + dir.string() + "'");
  json j;
  in >> j;

  RunSummary s;
  s.status = j.at("status").get<std::string>();
  s.t_final = j.at("t_final").get<double>();
  s.steps = j.at("steps").get<long>();
  s.dt = j.at("dt").get<double>();
  s.config_hash = j.at("config_hash").get<std::string>();
  if (j.contains("blow_up")) {
    const json& b = j["blow_up"];
    s.blow_up = BlowUpEvent{b.at("t").get<double>(), b.at("reason").get<std::string>(),
                            b.at("ix").get<int>(), b.at("iy").get<int>()};
  }
  if (j.contains("first_spd_loss")) {
    const json& b = j["first_spd_loss"];
    s.first_spd_loss = SpdLossEvent{b.at("t").get<double>(), b.at("ix").get<int>(),
                                    b.at("iy").get<int>(), b.at("min_eig").get<double>()};
  }
  return s;
}

RunSummary run_to_dir(const RunConfig& cfg, const std::filesystem::path& dir,
                      bool reuse_cached) {
  namespace fs = std::filesystem;
  const std::string canonical = serialize_config(cfg);

  if (reuse_cached && fs::exists(dir / "run_summary.json") && fs::exists(dir / "config.txt")) {
    std::ifstream in(dir / "config.txt");
    std::string stored((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
    if (stored == canonical) return read_run_summary(dir);
  }

  fs::create_directories(dir);
  {
    std::ofstream out(dir / "config.txt", std::ios::binary);
    out << canonical;
    if (!out) throw IoError("cannot write config echo in '" + dir.string() + "'");
  }

  Simulation sim(cfg.sim);

  std::ofstream diag(dir / "diagnostics.csv", std::ios::binary);
  if (!diag) throw IoError("cannot write diagnostics in '" + dir.string() + "'");
  diag << "# elastic = (s/2) * integral of tr(c); offset from the signed "
          "stress-trace energy by an additive constant\n";
  diag << "t,kinetic,elastic,max_tr_c,min_eig_c\n";

  long snap_index = 0;
  const auto snapshot_hook = [&](const Simulation& s) {
    write_snapshot(dir / snapshot_name(snap_index++), s);
  };
  const auto diag_hook = [&](const Simulation&, const DiagSample& d) {
    char line[200];
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g\n", d.t, d.kinetic,
                  d.elastic, d.max_tr_c, d.min_eig_c);
    diag << line;
  };

  const RunReport report = sim.run(snapshot_hook, diag_hook);
  diag.close();

  json j;
  j["status"] = report.completed() ? "completed" : "blew_up";
  j["t_final"] = report.t_final;
  j["steps"] = report.steps;
  j["dt"] = sim.dt();
  j["config_hash"] = config_hash_hex(cfg);
  j["seed"] = cfg.sim.seed;
  if (report.blow_up) {
    j["blow_up"] = {{"t", report.blow_up->t},
                    {"reason", report.blow_up->reason},
                    {"ix", report.blow_up->ix},
                    {"iy", report.blow_up->iy}};
  }
  if (report.first_spd_loss) {
    j["first_spd_loss"] = {{"t", report.first_spd_loss->t},
                           {"ix", report.first_spd_loss->ix},
                           {"iy", report.first_spd_loss->iy},
                           {"min_eig", report.first_spd_loss->min_eig}};
  }
  {
    std::ofstream out(dir / "run_summary.json", std::ios::binary);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("cannot write run summary in '" + dir.string() + "'");
  }
  return read_run_summary(dir);
}

Snapshot load_final_snapshot(const std::filesystem::path& dir) {
  const auto files = list_snapshots(dir);
  if (files.empty()) throw MissingSnapshot("no snapshots in '" + dir.string() + "'");
  Snapshot best = read_snapshot(files.front());
  for (std::size_t k = 1; k < files.size(); ++k) {
    Snapshot s = read_snapshot(files[k]);
    if (s.time >= best.time) best = std::move(s);
  }
  return best;
}

}  // namespace vefs
