#include "lohe/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "lohe/config.hpp"
#include "lohe/io.hpp"

namespace lohe {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string theorem;
  std::string csv;
  std::string column = "lyapunov";
  double window = 0.6;
};

struct RunOutput {
  std::vector<ObservableRecord> records;
  std::size_t renormalizations = 0;
  double max_norm_drift = 0.0;
  std::optional<std::string> fault;
};

std::vector<ObservableRecord> ensemble_records(const std::vector<double>& times,
                                               const std::vector<Members>& states,
                                               const std::vector<std::array<std::size_t, 4>>& tuples) {
  std::vector<ObservableRecord> rows;
  for (std::size_t k = 0; k < states.size(); ++k) rows.push_back(observe(times[k], states[k], tuples));
  return rows;
}

/// Integrates one config; faults are captured so partial output can be written.
RunOutput simulate(const SimConfig& c) {
  const BuiltSystem sys = build_system(c.system);
  RunOutput out;
  if (c.system.model == ModelKind::KuramotoFrustration) {
    const PhaseModel pm = build_phase_model(EnsembleState(sys.initial), c.system.kappa1);
    Rhs<std::vector<double>> f = [pm](double, const std::vector<double>& th) { return kuramoto_field(pm, th); };
    Trajectory<std::vector<double>> traj;
    try {
      traj = integrate<std::vector<double>>(f, pm.theta, c.system.integrator);
    } catch (const IntegrationFault<std::vector<double>>& e) {
      traj = e.partial();
      out.fault = e.what();
    }
    // Phases act on the initial members: z_j = e^{i theta_j} z_j(0).
    for (std::size_t k = 0; k < traj.size(); ++k) {
      Members z = sys.initial;
      for (std::size_t j = 0; j < z.size(); ++j) z[j] *= std::polar(1.0, traj.states[k][j]);
      ObservableRecord r = observe(traj.times[k], z, c.cross_ratios);
      PhaseModel m = pm;
      m.theta = traj.states[k];
      r.potential = potential(m);
      out.records.push_back(std::move(r));
    }
    return out;
  }
  Trajectory<Members> traj;
  try {
    traj = integrate<Members>(make_ensemble_rhs(sys.params), sys.initial, c.system.integrator);
  } catch (const IntegrationFault<Members>& e) {
    traj = e.partial();
    out.fault = e.what();
  }
  out.records = ensemble_records(traj.times, traj.states, c.cross_ratios);
  out.renormalizations = traj.renormalization_times.size();
  out.max_norm_drift = traj.max_norm_drift();
  return out;
}

json summary_json(const SimConfig& c, const RunOutput& r) {
  json j;
  j["model"] = to_string(c.system.model);
  j["n"] = c.system.n;
  j["dims"] = c.system.dims;
  j["seed"] = c.system.seed;
  j["samples"] = r.records.size();
  j["t_final"] = r.records.empty() ? 0.0 : r.records.back().t;
  j["rho_final"] = r.records.empty() ? 0.0 : r.records.back().rho;
  j["diam_corr_final"] = r.records.empty() ? 0.0 : r.records.back().diam_corr;
  j["max_norm_drift"] = r.max_norm_drift;
  j["renormalizations"] = r.renormalizations;
  j["integration_fault"] = r.fault ? json(*r.fault) : json(nullptr);
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

/// Writes trajectory.csv and summary.json; returns whether the run faulted.
bool write_simulation(const SimConfig& c, const RunOutput& r, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream csv(dir / "trajectory.csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + (dir / "trajectory.csv").string());
  write_csv(csv, r.records, c.cross_ratios);
  write_text(dir / "summary.json", summary_json(c, r).dump(2) + "\n");
  return r.fault.has_value();
}

void warn_degenerate(const SimConfig& c, const RunOutput& r, std::ostream& err) {
  for (std::size_t q = 0; q < c.cross_ratios.size(); ++q) {
    const bool bad = std::any_of(r.records.begin(), r.records.end(),
                                 [&](const ObservableRecord& rec) { return std::isnan(rec.cross_ratios[q].real()); });
    if (bad) {
      const auto& t = c.cross_ratios[q];
      err << "warning: cross-ratio (" << t[0] << "," << t[1] << "," << t[2] << "," << t[3]
          << ") is degenerate at some samples; written as NaN\n";
    }
  }
}

SimConfig load(const Options& o) {
  SimConfig c = load_config(o.config);
  if (o.seed) c.system.seed = *o.seed;
  return c;
}

int exit_for(Verdict v) {
  switch (v) {
    case Verdict::Pass: return kExitPass;
    case Verdict::Fail: return kExitVerificationFail;
    case Verdict::HypothesisNotMet: return kExitHypothesisNotMet;
  }
  return kExitVerificationFail;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const SimConfig c = load(o);
  const fs::path dir = o.out.empty() ? fs::path(c.output_dir) : fs::path(o.out);
  const RunOutput r = simulate(c);
  warn_degenerate(c, r, err);
  write_simulation(c, r, dir);
  if (r.fault) {
    err << "error: " << *r.fault << " (partial trajectory written)\n";
    return kExitIntegrationFault;
  }
  out << "wrote " << r.records.size() << " samples to " << (dir / "trajectory.csv").string() << "\n";
  return kExitPass;
}

std::optional<TheoremId> pick_theorem(const Options& o, const SimConfig* c) {
  if (!o.theorem.empty()) {
    auto id = theorem_from_string(o.theorem);
    if (!id) throw ConfigError(ConfigError::Kind::InvalidValue, "--theorem", "unknown theorem '" + o.theorem + "'");
    return id;
  }
  if (c && c->verify && c->verify->theorem) return c->verify->theorem;
  return std::nullopt;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  ScenarioSpec spec;
  std::string dir = o.out;
  if (o.config.empty()) {
    const auto id = pick_theorem(o, nullptr);
    if (!id) {
      err << "error: verify needs --theorem or a config with verify.theorem\n";
      return kExitUsage;
    }
    spec = reference_scenario(*id);
    if (o.seed) spec.system.seed = *o.seed;
    if (dir.empty()) dir = "out";
  } else {
    const SimConfig c = load(o);
    const auto id = pick_theorem(o, &c);
    if (!id) {
      err << "error: verify needs --theorem or a config with verify.theorem\n";
      return kExitUsage;
    }
    spec = to_scenario(c, *id);
    if (dir.empty()) dir = c.output_dir;
  }
  VerificationReport rep;
  try {
    rep = run_scenario(spec);
  } catch (const IntegrationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIntegrationFault;
  }
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / ("report_" + to_string(spec.theorem) + ".json");
  write_text(path, report_to_json(rep));
  out << to_string(spec.theorem) << ": " << to_string(rep.verdict) << " (" << path.string() << ")\n";
  for (const auto& g : rep.hypothesis.gates)
    if (!g.passed) out << "  gate not met: " << g.name << " (value " << g.value << ", bound " << g.bound << ")\n";
  for (const auto& ch : rep.checks)
    if (!ch.passed) out << "  check failed: " << ch.name << " (value " << ch.value << ")\n";
  return exit_for(rep.verdict);
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const SimConfig base = load(o);
  if (!base.sweep) {
    err << "error: sweep needs a 'sweep' block in the config\n";
    return kExitUsage;
  }
  const fs::path dir = o.out.empty() ? fs::path(base.output_dir) : fs::path(o.out);
  fs::create_directories(dir);
  const auto& sw = *base.sweep;
  std::vector<SimConfig> points;
  for (double v : sw.values) {
    SimConfig c = with_parameter(base, sw.parameter, v);
    try {
      build_system(c.system);
    } catch (const InvalidInput& e) {
      throw ConfigError(ConfigError::Kind::InvalidValue, "/sweep/values",
                        sw.parameter + "=" + format_double(v) + ": " + e.what());
    }
    points.push_back(std::move(c));
  }
  const auto theorem = pick_theorem(o, &base);
  json index;
  index["parameter"] = sw.parameter;
  index["points"] = json::array();
  int code = kExitPass;
  auto escalate = [&](int c) {
    auto rank = [](int x) { return x == kExitIntegrationFault ? 3 : x == kExitVerificationFail ? 2 : x == kExitHypothesisNotMet ? 1 : 0; };
    if (rank(c) > rank(code)) code = c;
  };

  if (theorem) {
    std::vector<ScenarioSpec> specs;
    for (const auto& c : points) specs.push_back(to_scenario(c, *theorem));
    std::vector<VerificationReport> reports;
    try {
      reports = run_scenarios(specs, worker_threads());
    } catch (const IntegrationError& e) {
      err << "error: " << e.what() << "\n";
      return kExitIntegrationFault;
    }
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const std::string name = "report_" + std::to_string(i) + ".json";
      write_text(dir / name, report_to_json(reports[i]));
      index["points"].push_back({{"index", i}, {"value", sw.values[i]}, {"report", name},
                                 {"verdict", to_string(reports[i].verdict)}});
      escalate(exit_for(reports[i].verdict));
    }
  } else {
    std::vector<RunOutput> runs(points.size());
    std::vector<std::exception_ptr> errors(points.size());
    const auto n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_threads())
    for (long i = 0; i < n; ++i) {
      try {
        runs[i] = simulate(points[i]);
        write_simulation(points[i], runs[i], dir / ("point_" + std::to_string(i)));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      warn_degenerate(points[i], runs[i], err);
      index["points"].push_back({{"index", i}, {"value", sw.values[i]},
                                 {"dir", "point_" + std::to_string(i)},
                                 {"integration_fault", runs[i].fault.has_value()}});
      if (runs[i].fault) escalate(kExitIntegrationFault);
    }
  }
  write_text(dir / "index.json", index.dump(2) + "\n");
  out << "swept " << sw.parameter << " over " << points.size() << " points (" << (dir / "index.json").string()
      << ")\n";
  return code;
}

int cmd_rate_fit(const Options& o, std::ostream& out, std::ostream&) {
  std::ifstream in(o.csv);
  if (!in) throw ConfigError(ConfigError::Kind::InvalidValue, "--csv", "cannot read '" + o.csv + "'");
  const CsvTable table = read_csv(in);
  const RateFit fit = fit_decay_rate(table.column("t"), table.column(o.column), o.window);
  json j = {{"column", o.column}, {"window", o.window}, {"rate", fit.rate}, {"intercept", fit.intercept},
            {"r2", fit.r2}};
  out << j.dump(2) << "\n";
  return kExitPass;
}

}  // namespace

int worker_threads() {
  if (const char* env = std::getenv("RUN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0)
      throw ConfigError(ConfigError::Kind::InvalidValue, "RUN_THREADS", "must be a positive integer");
    return int(v);
  }
  return omp_get_max_threads();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate and verify Lohe-type aggregation models", "lohe-lab"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* cfg = sub->add_option("--config", o.config, "JSON configuration (version v1)")->check(CLI::ExistingFile);
    if (config_required) cfg->required();
    sub->add_option("--out", o.out, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "64-bit seed (overrides the config seed)");
  };
  auto* simulate_cmd = app.add_subcommand("simulate", "integrate a model and write trajectory.csv + summary.json");
  add_common(simulate_cmd, true);
  auto* verify_cmd = app.add_subcommand("verify", "run a theorem scenario and write a report");
  add_common(verify_cmd, false);
  verify_cmd->add_option("--theorem", o.theorem, "theorem id, e.g. T3.1");
  auto* sweep_cmd = app.add_subcommand("sweep", "run one simulation or report per grid point");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--theorem", o.theorem, "verify this theorem at every grid point");
  auto* fit_cmd = app.add_subcommand("rate-fit", "fit an exponential decay rate to a CSV column");
  fit_cmd->add_option("--csv", o.csv, "trajectory CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--column", o.column, "column to fit (default lyapunov)");
  fit_cmd->add_option("--window", o.window, "trailing window fraction (default 0.6)");
  fit_cmd->add_option("--config", o.config, "ignored; accepted for symmetry");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }
  for (auto* sub : {simulate_cmd, verify_cmd, sweep_cmd})
    if (sub->parsed() && sub->count("--seed")) o.seed = seed;

  try {
    omp_set_num_threads(worker_threads());
    if (simulate_cmd->parsed()) return cmd_simulate(o, out, err);
    if (verify_cmd->parsed()) return cmd_verify(o, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(o, out, err);
    return cmd_rate_fit(o, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IntegrationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIntegrationFault;
  } catch (const FitDomainError& e) {
    err << "fit error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace lohe
