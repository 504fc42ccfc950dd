#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vefs/diagnostics.hpp"
#include "vefs/harness.hpp"
#include "vefs/oracle.hpp"
#include "vefs/runner.hpp"
#include "vefs/snapshot.hpp"

namespace fs = std::filesystem;
using namespace vefs;

namespace {

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value: '" + kv + "'");
    apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (const char* env = std::getenv("VEFS_OUTPUT_DIR")) cfg.output_dir = env;

  const RunSummary summary = run_to_dir(cfg, cfg.output_dir);
  if (summary.completed()) {
    std::printf("completed: t_final=%g steps=%ld dt=%g -> %s\n", summary.t_final,
                summary.steps, summary.dt, cfg.output_dir.c_str());
  } else {
    std::printf("blew_up: t=%g reason=%s at (%d,%d) -> %s\n", summary.blow_up->t,
                summary.blow_up->reason.c_str(), summary.blow_up->ix, summary.blow_up->iy,
                cfg.output_dir.c_str());
  }
  return 0;  // a blow-up is a recorded scientific outcome, not a failure
}

int cmd_compare(const std::string& dir_a, const std::string& dir_b, double t,
                const std::string& quantity, const std::string& out_prefix) {
  const Snapshot coarse = load_snapshot_at(dir_a, t);
  const Snapshot ref = load_snapshot_at(dir_b, t);

  TensorFieldR field_a = coarse.conformation();
  TensorFieldR field_b = ref.conformation();
  if (quantity == "s_tensor") {
    if (!coarse.has_l2 || !ref.has_l2)
      throw UnknownQuantity("s_tensor comparison needs FENE-P snapshots carrying l2");
    field_a = s_tensor(field_a, coarse.l2);
    field_b = s_tensor(field_b, ref.l2);
  } else if (quantity != "c") {
    throw UnknownQuantity("compare quantity must be c or s_tensor");
  }

  const L1Error err = l1_rel_error(field_a, field_b);
  {
    std::ofstream out(out_prefix + "errors.csv", std::ios::binary);
    out << "quantity,t,n,n_ref,l1_error,relative\n";
    out << quantity << "," << t << "," << coarse.n << "," << ref.n << ","
        << err.value << "," << (err.relative ? 1 : 0) << "\n";
  }
  {
    std::ofstream out(out_prefix + "profile_xx.csv", std::ios::binary);
    out << "y,abs_err,rel_err\n";
    for (const ProfilePoint& p : pointwise_error_profile(field_a, field_b, 0))
      out << p.y << "," << p.abs_err << "," << p.rel_err << "\n";
  }
  std::printf("l1_%s_error=%.17g relative=%d\n", quantity.c_str(), err.value,
              err.relative ? 1 : 0);
  return 0;
}

int cmd_oracle(int dim, const std::string& model_name, int samples,
               std::uint64_t seed) {
  const ModelKind model =
      model_name == "fene_p" ? ModelKind::fene_p : ModelKind::oldroyd_b;
  if (model_name != "fene_p" && model_name != "oldroyd_b")
    throw ConfigError("oracle model must be oldroyd_b or fene_p");

  if (samples == 0) {
    std::printf("warning: samples = 0, vacuous pass\n");
    return 0;
  }

  const SymmetrizerSweep sym = symmetrizer_sweep(dim, samples, seed);
  const int instances = std::min(samples, 100);
  const EquivalenceSweep eq = equivalence_sweep(dim, model, instances, seed + 1);

  bool ok = sym.max_residual_closed <= 1e-12;
  std::printf("symmetrizer dim=%d samples=%d max_sym_residual=%.3e", sym.dim, sym.samples,
              sym.max_residual_closed);
  if (dim == 3) {
    ok = ok && sym.max_rel_disagreement <= 1e-12 && sym.max_residual_linsolve <= 1e-12;
    std::printf(" max_linsolve_residual=%.3e max_rel_disagreement=%.3e",
                sym.max_residual_linsolve, sym.max_rel_disagreement);
  }
  std::printf(" -> %s\n", ok ? "pass" : "FAIL");

  const bool eq_ok = eq.max_gap <= 1e-8 && eq.spd_losses == 0;
  std::printf("equivalence dim=%d model=%s instances=%d max_gap=%.3e spd_losses=%d",
              eq.dim, to_string(eq.model), eq.instances, eq.max_gap, eq.spd_losses);
  if (model == ModelKind::fene_p) std::printf(" max_trace_ratio=%.3f", eq.max_trace_ratio);
  std::printf(" -> %s\n", eq_ok ? "pass" : "FAIL");

  return ok && eq_ok ? 0 : 1;
}

int cmd_export(const std::string& snapshot_path, const std::string& what,
               const std::string& component, double l2_arg, const std::string& out_path) {
  const Snapshot snap = read_snapshot(snapshot_path);
  const Grid2 grid = snap.grid();
  RealField value;

  if (what == "vorticity") {
    const VectorFieldR u = snap.velocity();
    const SpecField ux = forward_transform(u.x);
    const SpecField uy = forward_transform(u.y);
    SpecField w = deriv(uy, Axis::x);
    const SpecField dyux = deriv(ux, Axis::y);
    for (std::size_t k = 0; k < w.size(); ++k) w.data()[k] -= dyux.data()[k];
    value = inverse_transform(w);
  } else if (what == "tr_c") {
    const TensorFieldR c = snap.conformation();
    value = RealField(grid);
    for (std::size_t k = 0; k < value.size(); ++k)
      value.data()[k] = c.xx.data()[k] + c.yy.data()[k];
  } else if (what == "c_component") {
    const TensorFieldR c = snap.conformation();
    if (component == "xx") value = c.xx;
    else if (component == "xy") value = c.xy;
    else if (component == "yy") value = c.yy;
    else throw UnknownQuantity("c_component needs --component xx|xy|yy");
  } else if (what == "s_tensor_trace") {
    double l2 = l2_arg;
    if (l2 <= 0.0) {
      if (!snap.has_l2)
        throw UnknownQuantity("s_tensor_trace needs l2 (snapshot has none; pass --l2)");
      l2 = snap.l2;
    }
    const TensorFieldR s = s_tensor(snap.conformation(), l2);
    value = RealField(grid);
    for (std::size_t k = 0; k < value.size(); ++k)
      value.data()[k] = s.xx.data()[k] + s.yy.data()[k];
  } else {
    throw UnknownQuantity("export quantity must be vorticity | tr_c | c_component | "
                          "s_tensor_trace");
  }

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + out_path + "'");
  out << "x,y," << what << "\n";
  for (int iy = 0; iy < grid.n; ++iy)
    for (int ix = 0; ix < grid.n; ++ix) {
      char line[96];
      std::snprintf(line, sizeof(line), "%.10g,%.10g,%.17g\n", grid.x(ix), grid.y(iy),
                    value(ix, iy));
      out << line;
    }
  std::printf("wrote %s (%dx%d) to %s\n", what.c_str(), grid.n, grid.n, out_path.c_str());
  return 0;
}

void write_markdown_summary(const fs::path& out_dir, const std::string& study,
                            const std::vector<std::string>& lines) {
  std::ofstream md(out_dir / (study + "_summary.md"), std::ios::binary);
  md << "# " << study << " study\n\n";
  for (const std::string& line : lines) md << line << "\n";
}

int cmd_experiment(const std::string& study, const std::string& scale,
                   const std::string& out_dir_arg, int parallelism) {
  const bool full = scale == "full";
  const fs::path out_dir(out_dir_arg);
  fs::create_directories(out_dir);
  std::vector<std::string> md;

  if (study == "accuracy") {
    ExperimentSpec table_spec =
        full ? ExperimentSpec::accuracy_full() : ExperimentSpec::accuracy_desk();
    ExperimentSpec imp_spec =
        full ? ExperimentSpec::improvement_full() : ExperimentSpec::improvement_desk();
    table_spec.parallelism = parallelism;
    imp_spec.parallelism = parallelism;

    const AccuracyResult table = run_accuracy(table_spec, out_dir);
    write_accuracy_csv(table, out_dir / "accuracy_errors.csv");
    const AccuracyResult imp = run_accuracy(imp_spec, out_dir);
    write_improvement_csv(imp, out_dir / "improvement.csv");

    md.push_back("L1 errors vs direct-c reference at N_ref=" +
                 std::to_string(table_spec.n_ref) + ": accuracy_errors.csv");
    md.push_back("Improvement at scaled time T=t/Wi=2: improvement.csv");
    for (const ErrorRow& r : table.rows) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "- Wi=%g N=%d %s: l1=%.4e%s", r.wi, r.n,
                    to_string(r.formulation), r.l1, r.valid ? "" : " (invalid)");
      md.push_back(buf);
    }
  } else if (study == "stability") {
    ExperimentSpec spec =
        full ? ExperimentSpec::stability_full() : ExperimentSpec::stability_desk();
    spec.parallelism = parallelism;
    const StabilityResult r = run_stability(spec, out_dir);
    write_event_log_csv(r, out_dir / "stability_events.csv");
    for (const StabilityOutcome& o : r.outcomes) {
      char buf[200];
      std::snprintf(buf, sizeof(buf), "- Wi=%g N=%d %s: %s (t_final=%g, max_tr=%.3e)", o.wi,
                    o.n, to_string(o.formulation), o.status.c_str(), o.t_final,
                    o.max_tr_seen);
      md.push_back(buf);
    }
  } else if (study == "fenep") {
    ExperimentSpec acc = full ? ExperimentSpec::fenep_accuracy_full()
                               : ExperimentSpec::fenep_accuracy_desk();
    ExperimentSpec stab = full ? ExperimentSpec::fenep_stability_full()
                                : ExperimentSpec::fenep_stability_desk();
    acc.parallelism = parallelism;
    stab.parallelism = parallelism;
    const FenePResult r = run_fenep(acc, stab, out_dir);
    write_accuracy_csv(r.accuracy, out_dir / "fenep_s_errors.csv");
    write_improvement_csv(r.accuracy, out_dir / "fenep_improvement.csv");
    write_event_log_csv(r.stability, out_dir / "fenep_events.csv");
    for (const StabilityOutcome& o : r.stability.outcomes) {
      char buf[200];
      std::snprintf(buf, sizeof(buf),
                    "- Wi=%g N=%d %s: %s (t_final=%g, max_tr=%.4g, l2=%g)", o.wi, o.n,
                    to_string(o.formulation), o.status.c_str(), o.t_final, o.max_tr_seen,
                    stab.l2);
      md.push_back(buf);
    }
  } else {
    throw ConfigError("study must be accuracy | stability | fenep");
  }

  write_markdown_summary(out_dir, study, md);
  std::printf("experiment '%s' (%s scale) done -> %s\n", study.c_str(), scale.c_str(),
              out_dir_arg.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vefs: pseudo-spectral Stokes solver for Oldroyd-B / FENE-P "
               "viscoelastic flow with direct and square-root conformation evolution"};
  app.require_subcommand(1);

  // run
  std::string config_path;
  std::vector<std::string> overrides;
  CLI::App* run = app.add_subcommand("run", "run one simulation from a config file");
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--set", overrides, "override, e.g. --set Wi=10")->take_all();

  // compare
  std::string dir_a, dir_b, quantity = "c", out_prefix = "";
  double compare_t = 0.0;
  CLI::App* compare = app.add_subcommand("compare", "error table between two runs");
  compare->add_option("dir_a", dir_a, "coarse run directory")->required();
  compare->add_option("dir_b", dir_b, "reference run directory")->required();
  compare->add_option("--t", compare_t, "snapshot time")->required();
  compare->add_option("--quantity", quantity, "c | s_tensor");
  compare->add_option("--out-prefix", out_prefix, "prefix for output CSVs");

  // oracle
  int dim = 3, samples = 10000;
  std::uint64_t seed = 0;
  std::string model_name = "oldroyd_b";
  CLI::App* oracle = app.add_subcommand(
      "oracle", "randomized symmetrizer and formulation-equivalence checks");
  oracle->add_option("--dim", dim, "2 or 3");
  oracle->add_option("--model", model_name, "oldroyd_b | fene_p");
  oracle->add_option("--samples", samples, "symmetrizer sample count");
  oracle->add_option("--seed", seed, "RNG seed");

  // export
  std::string snapshot_path, what, component = "xx", export_out = "export.csv";
  double l2_arg = 0.0;
  CLI::App* exp = app.add_subcommand("export", "extract a scalar field as CSV");
  exp->add_option("snapshot", snapshot_path, "snapshot file")->required();
  exp->add_option("--what", what, "vorticity | tr_c | c_component | s_tensor_trace")
      ->required();
  exp->add_option("--component", component, "tensor component for c_component");
  exp->add_option("--l2", l2_arg, "FENE-P cutoff when the snapshot has none");
  exp->add_option("--out", export_out, "output CSV path");

  // experiment
  std::string study, scale = "desk", exp_out = "experiments";
  int parallelism = 0;
  CLI::App* experiment =
      app.add_subcommand("experiment", "scripted accuracy/stability studies");
  experiment->add_option("--study", study, "accuracy | stability | fenep")->required();
  experiment->add_option("--scale", scale, "desk | full");
  experiment->add_option("--out", exp_out, "output directory");
  experiment->add_option("--parallel", parallelism, "max concurrent runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, overrides);
    if (*compare) return cmd_compare(dir_a, dir_b, compare_t, quantity, out_prefix);
    if (*oracle) return cmd_oracle(dim, model_name, samples, seed);
    if (*exp) return cmd_export(snapshot_path, what, component, l2_arg, export_out);
    if (*experiment) return cmd_experiment(study, scale, exp_out, parallelism);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 3;
  }
  return 0;
}
