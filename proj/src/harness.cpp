#include "vefs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "vefs/diagnostics.hpp"
#include "vefs/snapshot.hpp"

namespace vefs {

namespace fs = std::filesystem;

namespace {

int resolve_parallelism(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 2;
}

/// Runs the jobs on up to max_parallel threads; rethrows the first failure.
void parallel_run(const std::vector<std::function<void()>>& jobs, int max_parallel) {
  if (jobs.empty()) return;
  const int workers = std::min<int>(resolve_parallelism(max_parallel),
                                    static_cast<int>(jobs.size()));
  if (workers <= 1) {
    for (const auto& job : jobs) job();
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= jobs.size()) return;
        try {
          jobs[k]();
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

RunConfig make_run_config(const ExperimentSpec& spec, int n, Formulation form,
                          double t_end) {
  RunConfig cfg;
  cfg.sim.n = n;
  cfg.sim.model.kind = spec.model;
  cfg.sim.model.s = spec.s;
  cfg.sim.model.l2 = spec.l2;
  cfg.sim.formulation = form;
  cfg.sim.dt = spec.dt > 0.0 ? spec.dt * (256.0 / n) : 0.0;
  cfg.sim.t_end = t_end;
  cfg.sim.ic = spec.ic;
  cfg.sim.epsilon = spec.epsilon;
  cfg.sim.snapshot_interval = 0.0;  // initial + final
  cfg.sim.diagnostic_interval = 0.1;
  cfg.sim.seed = spec.seed;
  return cfg;
}

fs::path run_dir_for(const RunConfig& cfg, const fs::path& workdir) {
  return workdir / "runs" / config_hash_hex(cfg);
}

struct PreparedRun {
  RunConfig cfg;
  fs::path dir;
  RunSummary summary;
};

/// Executes (or reuses) every distinct config, in parallel.
std::map<std::string, PreparedRun> ensure_runs(const std::vector<RunConfig>& configs,
                                               const fs::path& workdir,
                                               int parallelism) {
  std::map<std::string, PreparedRun> prepared;
  for (const RunConfig& cfg : configs) {
    const std::string key = config_hash_hex(cfg);
    if (!prepared.count(key)) prepared[key] = PreparedRun{cfg, run_dir_for(cfg, workdir), {}};
  }
  std::vector<std::function<void()>> jobs;
  for (auto& [key, run] : prepared) {
    PreparedRun* r = &run;
    jobs.push_back([r] { r->summary = run_to_dir(r->cfg, r->dir, /*reuse_cached=*/true); });
  }
  parallel_run(jobs, parallelism);
  return prepared;
}

TensorFieldR comparison_field(const Snapshot& snap, bool s_tensor_basis, double l2) {
  const TensorFieldR c = snap.conformation();
  return s_tensor_basis ? s_tensor(c, l2) : c;
}

std::string formulation_flag(const RunSummary& s) {
  if (s.completed()) return "";
  std::ostringstream msg;
  msg << "blew_up(t=" << (s.blow_up ? s.blow_up->t : s.t_final) << ")";
  return msg.str();
}

}  // namespace

void ExperimentSpec::validate() const {
  if (wi_list.empty()) throw ConfigError("experiment needs at least one Wi");
  if (n_list.empty()) throw ConfigError("experiment needs at least one N");
  for (int n : n_list) {
    if (n <= 0 || (n & (n - 1)) != 0)
      throw ConfigError("experiment N values must be powers of two");
    if (study != Study::stability && n > n_ref)
      throw ConfigError("N_ref must be at least every swept N");
  }
  if (study != Study::stability && (n_ref & (n_ref - 1)) != 0)
    throw ConfigError("N_ref must be a power of two");
}

const ErrorRow* AccuracyResult::find(double wi, int n, Formulation f) const {
  for (const ErrorRow& r : rows)
    if (r.wi == wi && r.n == n && r.formulation == f) return &r;
  return nullptr;
}

const ImprovementRow* AccuracyResult::find_improvement(double wi, int n) const {
  for (const ImprovementRow& r : improvements)
    if (r.wi == wi && r.n == n) return &r;
  return nullptr;
}

const StabilityOutcome* StabilityResult::find(double wi, int n, Formulation f) const {
  for (const StabilityOutcome& r : outcomes)
    if (r.wi == wi && r.n == n && r.formulation == f) return &r;
  return nullptr;
}

AccuracyResult run_accuracy(const ExperimentSpec& spec, const fs::path& workdir) {
  spec.validate();

  std::vector<RunConfig> configs;
  for (double wi : spec.wi_list) {
    const double t = spec.scaled_time ? spec.scaled_T * wi : spec.t_end;
    ExperimentSpec at_wi = spec;  // carries model/s/l2/ic into the config
    RunConfig ref = make_run_config(at_wi, spec.n_ref, Formulation::direct_c, t);
    ref.sim.model.wi = wi;
    configs.push_back(ref);
    for (int n : spec.n_list)
      for (Formulation f : {Formulation::direct_c, Formulation::sqrt_b}) {
        RunConfig cfg = make_run_config(at_wi, n, f, t);
        cfg.sim.model.wi = wi;
        configs.push_back(cfg);
      }
  }

  const auto prepared = ensure_runs(configs, workdir, spec.parallelism);
  const auto lookup = [&](const RunConfig& cfg) -> const PreparedRun& {
    return prepared.at(config_hash_hex(cfg));
  };

  AccuracyResult result;
  for (double wi : spec.wi_list) {
    const double t = spec.scaled_time ? spec.scaled_T * wi : spec.t_end;
    ExperimentSpec at_wi = spec;
    RunConfig ref_cfg = make_run_config(at_wi, spec.n_ref, Formulation::direct_c, t);
    ref_cfg.sim.model.wi = wi;
    const PreparedRun& ref = lookup(ref_cfg);

    TensorFieldR ref_field;
    const bool ref_ok = ref.summary.completed();
    if (ref_ok)
      ref_field = comparison_field(load_final_snapshot(ref.dir), spec.compare_s_tensor,
                                   spec.l2);

    for (int n : spec.n_list) {
      double err_by_form[2] = {0.0, 0.0};
      bool valid_by_form[2] = {false, false};
      for (Formulation f : {Formulation::direct_c, Formulation::sqrt_b}) {
        RunConfig cfg = make_run_config(at_wi, n, f, t);
        cfg.sim.model.wi = wi;
        const PreparedRun& run = lookup(cfg);

        ErrorRow row;
        row.wi = wi;
        row.n = n;
        row.formulation = f;
        row.t = t;
        row.config_hash = run.summary.config_hash;
        row.seed = cfg.sim.seed;
        row.dt = run.summary.dt;
        row.valid = ref_ok && run.summary.completed();
        row.flag = !ref_ok ? "reference_" + formulation_flag(ref.summary)
                           : formulation_flag(run.summary);
        if (row.valid) {
          const TensorFieldR field = comparison_field(load_final_snapshot(run.dir),
                                                      spec.compare_s_tensor, spec.l2);
          const L1Error err = l1_rel_error(field, ref_field);
          row.l1 = err.value;
          row.relative = err.relative;
        }
        err_by_form[f == Formulation::sqrt_b ? 1 : 0] = row.l1;
        valid_by_form[f == Formulation::sqrt_b ? 1 : 0] = row.valid;
        result.rows.push_back(row);
      }

      ImprovementRow imp;
      imp.wi = wi;
      imp.n = n;
      imp.t = t;
      imp.err_c = err_by_form[0];
      imp.err_b2 = err_by_form[1];
      imp.valid = valid_by_form[0] && valid_by_form[1] && imp.err_c > 0.0;
      if (imp.valid) imp.improvement = improvement(imp.err_c, imp.err_b2);
      result.improvements.push_back(imp);
    }
  }

  const auto row_key = [](const ErrorRow& r) {
    return std::make_tuple(r.wi, r.n, static_cast<int>(r.formulation));
  };
  std::sort(result.rows.begin(), result.rows.end(),
            [&](const ErrorRow& a, const ErrorRow& b) { return row_key(a) < row_key(b); });
  return result;
}

StabilityResult run_stability(const ExperimentSpec& spec, const fs::path& workdir) {
  spec.validate();
  StabilityResult result;
  std::mutex result_mutex;

  std::vector<std::function<void()>> chains;
  for (double wi : spec.wi_list)
    for (int n : spec.n_list)
      chains.push_back([&, wi, n] {
        const auto outcome_of = [&](const RunConfig& cfg, const RunSummary& summary,
                                    const fs::path& dir) {
          StabilityOutcome o;
          o.wi = wi;
          o.n = n;
          o.formulation = cfg.sim.formulation;
          o.status = summary.status;
          o.t_final = summary.t_final;
          if (summary.blow_up) {
            o.t_blow_up = summary.blow_up->t;
            o.blow_up_reason = summary.blow_up->reason;
          }
          if (summary.first_spd_loss) o.t_first_spd_loss = summary.first_spd_loss->t;
          o.config_hash = summary.config_hash;
          o.seed = cfg.sim.seed;
          o.dt = summary.dt;
          o.max_tr_seen = 0.0;
          o.min_eig_seen = std::numeric_limits<double>::infinity();
          for (const DiagSample& d : read_diagnostics_csv(dir)) {
            o.max_tr_seen = std::max(o.max_tr_seen, d.max_tr_c);
            o.min_eig_seen = std::min(o.min_eig_seen, d.min_eig_c);
          }
          return o;
        };

        RunConfig direct = make_run_config(spec, n, Formulation::direct_c, spec.horizon);
        direct.sim.model.wi = wi;
        const fs::path direct_dir = run_dir_for(direct, workdir);
        const RunSummary direct_summary = run_to_dir(direct, direct_dir, true);

        double sqrt_t_end = spec.horizon;
        if (direct_summary.blow_up)
          sqrt_t_end =
              std::max(spec.survival_factor * direct_summary.blow_up->t, spec.horizon);

        RunConfig sqrt_cfg = make_run_config(spec, n, Formulation::sqrt_b, sqrt_t_end);
        sqrt_cfg.sim.model.wi = wi;
        const fs::path sqrt_dir = run_dir_for(sqrt_cfg, workdir);
        const RunSummary sqrt_summary = run_to_dir(sqrt_cfg, sqrt_dir, true);

        std::lock_guard<std::mutex> lock(result_mutex);
        result.outcomes.push_back(outcome_of(direct, direct_summary, direct_dir));
        result.outcomes.push_back(outcome_of(sqrt_cfg, sqrt_summary, sqrt_dir));
      });

  parallel_run(chains, spec.parallelism);

  std::sort(result.outcomes.begin(), result.outcomes.end(),
            [](const StabilityOutcome& a, const StabilityOutcome& b) {
              return std::make_tuple(a.wi, a.n, static_cast<int>(a.formulation)) <
                     std::make_tuple(b.wi, b.n, static_cast<int>(b.formulation));
            });
  return result;
}

FenePResult run_fenep(const ExperimentSpec& accuracy_spec,
                      const ExperimentSpec& stability_spec, const fs::path& workdir) {
  FenePResult out;
  out.accuracy = run_accuracy(accuracy_spec, workdir);
  out.stability = run_stability(stability_spec, workdir);
  return out;
}

std::vector<DiagSample> read_diagnostics_csv(const fs::path& run_dir) {
  std::ifstream in(run_dir / "diagnostics.csv");
  if (!in) throw IoError("no diagnostics.csv in '" + run_dir.string() + "'");
  std::vector<DiagSample> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 't') continue;
    DiagSample d;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%lg", &d.t, &d.kinetic, &d.elastic,
                    &d.max_tr_c, &d.min_eig_c) == 5)
      out.push_back(d);
  }
  return out;
}

void write_accuracy_csv(const AccuracyResult& r, const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write '" + file.string() + "'");
  out << "wi,n,formulation,t,l1_rel_error,relative,valid,flag,config_hash,seed,dt\n";
  for (const ErrorRow& row : r.rows) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%g,%d,%s,%g,%.17g,%d,%d,%s,%s,%llu,%.17g\n", row.wi,
                  row.n, to_string(row.formulation), row.t, row.l1, row.relative ? 1 : 0,
                  row.valid ? 1 : 0, row.flag.c_str(), row.config_hash.c_str(),
                  static_cast<unsigned long long>(row.seed), row.dt);
    out << buf;
  }
}

void write_improvement_csv(const AccuracyResult& r, const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write '" + file.string() + "'");
  out << "wi,n,t,err_c,err_b2,improvement,valid\n";
  for (const ImprovementRow& row : r.improvements) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%g,%d,%g,%.17g,%.17g,%.17g,%d\n", row.wi, row.n,
                  row.t, row.err_c, row.err_b2, row.improvement, row.valid ? 1 : 0);
    out << buf;
  }
}

void write_event_log_csv(const StabilityResult& r, const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write '" + file.string() + "'");
  out << "wi,n,formulation,status,t_final,t_blow_up,blow_up_reason,t_first_spd_loss,"
         "max_tr_seen,min_eig_seen,config_hash,seed,dt\n";
  for (const StabilityOutcome& o : r.outcomes) {
    std::ostringstream line;
    line << o.wi << "," << o.n << "," << to_string(o.formulation) << "," << o.status << ","
         << o.t_final << ",";
    if (o.t_blow_up) line << *o.t_blow_up;
    line << "," << o.blow_up_reason << ",";
    if (o.t_first_spd_loss) line << *o.t_first_spd_loss;
    line << "," << o.max_tr_seen << "," << o.min_eig_seen << "," << o.config_hash << ","
         << o.seed << "," << o.dt << "\n";
    out << line.str();
  }
}

ExperimentSpec ExperimentSpec::accuracy_desk() {
  ExperimentSpec s;
  s.study = Study::accuracy;
  s.model = ModelKind::oldroyd_b;
  s.wi_list = {5.0};
  s.n_list = {64, 128, 256};
  s.n_ref = 512;
  s.t_end = 10.0;
  return s;
}

ExperimentSpec ExperimentSpec::improvement_desk() {
  ExperimentSpec s = accuracy_desk();
  s.wi_list = {1.0, 5.0};
  s.n_list = {128};
  s.scaled_time = true;
  s.scaled_T = 2.0;
  return s;
}

ExperimentSpec ExperimentSpec::stability_desk() {
  ExperimentSpec s;
  s.study = Study::stability;
  s.model = ModelKind::oldroyd_b;
  s.wi_list = {10.0};
  s.n_list = {128};
  s.ic = InitialCondition::perturbed;
  s.horizon = 100.0;
  return s;
}

ExperimentSpec ExperimentSpec::fenep_accuracy_desk() {
  ExperimentSpec s = accuracy_desk();
  s.study = Study::fene_p;
  s.model = ModelKind::fene_p;
  s.wi_list = {5.0};
  s.n_list = {64, 128, 256};
  s.l2 = 100.0;
  s.compare_s_tensor = true;
  return s;
}

ExperimentSpec ExperimentSpec::fenep_stability_desk() {
  ExperimentSpec s = stability_desk();
  s.study = Study::fene_p;
  s.model = ModelKind::fene_p;
  s.wi_list = {20.0, 50.0};
  s.l2 = 225.0;
  return s;
}

ExperimentSpec ExperimentSpec::accuracy_full() {
  ExperimentSpec s = accuracy_desk();
  s.n_list = {32, 64, 128, 256, 512};
  s.n_ref = 2048;
  return s;
}

ExperimentSpec ExperimentSpec::improvement_full() {
  ExperimentSpec s = improvement_desk();
  s.wi_list = {1.0, 2.0, 3.0, 4.0, 5.0};
  s.n_list = {128, 256};
  s.n_ref = 2048;
  return s;
}

ExperimentSpec ExperimentSpec::stability_full() {
  ExperimentSpec s = stability_desk();
  s.n_list = {256};
  s.horizon = 1500.0;
  return s;
}

ExperimentSpec ExperimentSpec::fenep_accuracy_full() {
  ExperimentSpec s = fenep_accuracy_desk();
  s.n_list = {256, 512};
  s.n_ref = 1024;
  return s;
}

ExperimentSpec ExperimentSpec::fenep_stability_full() {
  ExperimentSpec s = fenep_stability_desk();
  s.n_list = {256};
  s.horizon = 500.0;
  return s;
}

}  // namespace vefs
