#include "vefs/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vefs {

namespace {

constexpr const char* kMagic = "VEFS1";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const RealField* Snapshot::field(const std::string& name) const {
  for (std::size_t k = 0; k < field_names.size(); ++k)
    if (field_names[k] == name) return &fields[k];
  return nullptr;
}

const RealField& Snapshot::require(const std::string& name) const {
  const RealField* f = field(name);
  if (!f) throw IoError("snapshot has no field '" + name + "'");
  return *f;
}

VectorFieldR Snapshot::velocity() const {
  VectorFieldR u(grid());
  u.x = require("u_x");
  u.y = require("u_y");
  return u;
}

TensorFieldR Snapshot::conformation() const {
  TensorFieldR c(grid());
  c.xx = require("c_xx");
  c.xy = require("c_xy");
  c.yy = require("c_yy");
  return c;
}

void write_snapshot(const std::filesystem::path& file, const Simulation& sim) {
  const SimConfig& cfg = sim.config();
  const VectorFieldR u = sim.velocity_phys();
  const TensorFieldR c = sim.conformation_phys();

  std::vector<std::string> names = {"u_x", "u_y", "c_xx", "c_xy", "c_yy"};
  std::vector<const RealField*> blocks = {&u.x, &u.y, &c.xx, &c.xy, &c.yy};
  TensorFieldR b;
  if (cfg.formulation == Formulation::sqrt_b) {
    b = sim.tensor_phys();
    names.insert(names.end(), {"b_xx", "b_xy", "b_yy"});
    blocks.insert(blocks.end(), {&b.xx, &b.xy, &b.yy});
  }

  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot open '" + file.string() + "' for writing");

  out << kMagic << "\n";
  out << "n=" << cfg.n << "\n";
  out << "time=" << format_double(sim.time()) << "\n";
  out << "model=" << to_string(cfg.model.kind) << "\n";
  out << "formulation=" << to_string(cfg.formulation) << "\n";
  out << "wi=" << format_double(cfg.model.wi) << "\n";
  out << "s=" << format_double(cfg.model.s) << "\n";
  if (cfg.model.kind == ModelKind::fene_p) out << "l2=" << format_double(cfg.model.l2) << "\n";
  out << "fields=";
  for (std::size_t k = 0; k < names.size(); ++k) out << (k ? "," : "") << names[k];
  out << "\n";
  out << "data\n";

  for (const RealField* f : blocks)
    out.write(reinterpret_cast<const char*>(f->data()),
              static_cast<std::streamsize>(f->size() * sizeof(double)));
  if (!out) throw IoError("write failed for '" + file.string() + "'");
}

Snapshot read_snapshot(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open '" + file.string() + "'");

  Snapshot snap;
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw IoError("'" + file.string() + "' is not a VEFS1 snapshot");

  while (std::getline(in, line)) {
    if (line == "data") break;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("malformed snapshot header line: '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "n") {
      snap.n = std::stoi(value);
    } else if (key == "time") {
      snap.time = std::stod(value);
    } else if (key == "model") {
      if (value == "oldroyd_b") snap.model = ModelKind::oldroyd_b;
      else if (value == "fene_p") snap.model = ModelKind::fene_p;
      else throw IoError("unknown model '" + value + "' in snapshot header");
    } else if (key == "formulation") {
      if (value == "direct_c") snap.formulation = Formulation::direct_c;
      else if (value == "sqrt_b") snap.formulation = Formulation::sqrt_b;
      else throw IoError("unknown formulation '" + value + "' in snapshot header");
    } else if (key == "wi") {
      snap.wi = std::stod(value);
    } else if (key == "s") {
      snap.s = std::stod(value);
    } else if (key == "l2") {
      snap.l2 = std::stod(value);
      snap.has_l2 = true;
    } else if (key == "fields") {
      std::stringstream ss(value);
      std::string name;
      while (std::getline(ss, name, ',')) snap.field_names.push_back(name);
    } else {
      throw IoError("unknown snapshot header key '" + key + "'");
    }
  }
  if (snap.n <= 0 || snap.field_names.empty())
    throw IoError("incomplete snapshot header in '" + file.string() + "'");

  const Grid2 grid(snap.n);
  for (std::size_t k = 0; k < snap.field_names.size(); ++k) {
    RealField f(grid);
    in.read(reinterpret_cast<char*>(f.data()),
            static_cast<std::streamsize>(f.size() * sizeof(double)));
    if (!in) throw IoError("truncated snapshot data in '" + file.string() + "'");
    snap.fields.push_back(std::move(f));
  }
  return snap;
}

std::vector<std::filesystem::path> list_snapshots(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir)) return files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("snap_") && name.ends_with(".vefs"))
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

Snapshot load_snapshot_at(const std::filesystem::path& dir, double t, double tol) {
  std::vector<double> available;
  for (const auto& file : list_snapshots(dir)) {
    const Snapshot snap = read_snapshot(file);
    if (std::abs(snap.time - t) <= tol) return snap;
    available.push_back(snap.time);
  }
  std::ostringstream msg;
  msg << "no snapshot at t = " << t << " in '" << dir.string() << "'; available times:";
  if (available.empty()) msg << " none";
  for (double a : available) msg << " " << a;
  throw MissingSnapshot(msg.str());
}

}  // namespace vefs
