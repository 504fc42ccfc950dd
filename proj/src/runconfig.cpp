#include "vefs/runconfig.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace vefs {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value '" + value + "' for key '" + key + "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value '" + value + "' for key '" + key + "'");
  }
}

}  // namespace

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "model") {
    if (value == "oldroyd_b") cfg.sim.model.kind = ModelKind::oldroyd_b;
    else if (value == "fene_p") cfg.sim.model.kind = ModelKind::fene_p;
    else throw ConfigError("bad model '" + value + "' (oldroyd_b | fene_p)");
  } else if (key == "formulation") {
    if (value == "direct_c") cfg.sim.formulation = Formulation::direct_c;
    else if (value == "sqrt_b") cfg.sim.formulation = Formulation::sqrt_b;
    else throw ConfigError("bad formulation '" + value + "' (direct_c | sqrt_b)");
  } else if (key == "N") {
    cfg.sim.n = static_cast<int>(parse_long(key, value));
  } else if (key == "Wi") {
    cfg.sim.model.wi = parse_double(key, value);
  } else if (key == "s") {
    cfg.sim.model.s = parse_double(key, value);
  } else if (key == "l2") {
    cfg.sim.model.l2 = parse_double(key, value);
  } else if (key == "dt") {
    cfg.sim.dt = parse_double(key, value);
  } else if (key == "t_end") {
    cfg.sim.t_end = parse_double(key, value);
  } else if (key == "ic") {
    if (value == "isotropic") cfg.sim.ic = InitialCondition::isotropic;
    else if (value == "perturbed") cfg.sim.ic = InitialCondition::perturbed;
    else throw ConfigError("bad ic '" + value + "' (isotropic | perturbed)");
  } else if (key == "epsilon") {
    cfg.sim.epsilon = parse_double(key, value);
  } else if (key == "snapshot_interval") {
    cfg.sim.snapshot_interval = parse_double(key, value);
  } else if (key == "diagnostic_interval") {
    cfg.sim.diagnostic_interval = parse_double(key, value);
  } else if (key == "seed") {
    cfg.sim.seed = static_cast<std::uint64_t>(parse_long(key, value));
  } else if (key == "output_dir") {
    cfg.output_dir = value;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + " is not 'key = value': '" +
                        line + "'");
    apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig parse_run_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in);
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config '" + file.string() + "'");
  return parse_run_config(in);
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "model = " << to_string(cfg.sim.model.kind) << "\n";
  out << "formulation = " << to_string(cfg.sim.formulation) << "\n";
  out << "N = " << cfg.sim.n << "\n";
  out << "Wi = " << format_double(cfg.sim.model.wi) << "\n";
  out << "s = " << format_double(cfg.sim.model.s) << "\n";
  out << "l2 = " << format_double(cfg.sim.model.l2) << "\n";
  out << "dt = " << format_double(cfg.sim.dt) << "\n";
  out << "t_end = " << format_double(cfg.sim.t_end) << "\n";
  out << "ic = " << to_string(cfg.sim.ic) << "\n";
  out << "epsilon = " << format_double(cfg.sim.epsilon) << "\n";
  out << "snapshot_interval = " << format_double(cfg.sim.snapshot_interval) << "\n";
  out << "diagnostic_interval = " << format_double(cfg.sim.diagnostic_interval) << "\n";
  out << "seed = " << cfg.sim.seed << "\n";
  out << "output_dir = " << cfg.output_dir << "\n";
  return out.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  RunConfig canonical = cfg;
  canonical.output_dir = "";
  const std::string text = serialize_config(canonical);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash_hex(const RunConfig& cfg) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

}  // namespace vefs
