#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "perihyp/certify.hpp"
#include "perihyp/config.hpp"
#include "perihyp/ibvp.hpp"
#include "perihyp/periodic.hpp"
#include "perihyp/report.hpp"

namespace fs = std::filesystem;
using namespace perihyp;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kInputError = 2;

struct Flags {
  std::string config;
  std::optional<int> nx;
  std::optional<int> nt;
  std::optional<double> tol;
  std::optional<int> maxit;
  std::optional<double> t_end;
  std::optional<double> gamma;
  std::optional<int> samples;
  std::string initial;
  std::string out = ".";
  bool json = false;
  unsigned seed = 42;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("config", f.config, "configuration file (YAML)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--nx", f.nx, "spatial cells")->check(CLI::PositiveNumber);
  cmd->add_option("--nt", f.nt, "time nodes per period")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.tol, "solver tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--maxit", f.maxit, "maximum iterations")->check(CLI::PositiveNumber);
  cmd->add_option("--t-end", f.t_end, "end time of the simulation");
  cmd->add_option("--gamma", f.gamma, "perturbation amplitude")->check(CLI::NonNegativeNumber);
  cmd->add_option("--samples", f.samples, "perturbation samples")->check(CLI::PositiveNumber);
  cmd->add_option("--initial", f.initial, "initial data: zero or random")->check(CLI::IsMember({"zero", "random"}));
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--json", f.json, "print report.json to stdout");
  cmd->add_option("--seed", f.seed, "random seed (default 42)");
}

Config load(const Flags& f) {
  Config cfg = load_config(f.config);
  if (f.nx) cfg.disc.nx = *f.nx;
  if (f.nt) cfg.disc.nt = *f.nt;
  if (f.tol) {
    cfg.solver.tol = *f.tol;
    cfg.solver.tol_outer = *f.tol;
  }
  if (f.maxit) {
    cfg.solver.maxit = *f.maxit;
    cfg.solver.maxit_outer = *f.maxit;
  }
  if (f.gamma) cfg.perturb.gamma = *f.gamma;
  if (f.samples) cfg.perturb.samples = *f.samples;
  if (f.t_end) cfg.simulate.t_end = *f.t_end;
  if (!f.initial.empty()) cfg.simulate.initial = f.initial;
  if (f.nx || f.nt) validate_config(cfg);
  return cfg;
}

void need_linear(const Config& cfg, const std::string& command) {
  if (cfg.quasilinear) throw ConfigError(cfg.origin + ": '" + command + "' needs a [system] section");
}

std::string out_path(const Flags& f, const std::string& name) { return (fs::path(f.out) / name).string(); }

void finish(const Flags& f, const Json& report) {
  write_json(out_path(f, "report.json"), report);
  if (f.json) std::cout << dump_json(report);
}

SolverOptions solver_options(const Config& cfg, const Flags& f) {
  SolverOptions o;
  o.tol = cfg.solver.tol;
  o.maxit = cfg.solver.maxit;
  o.anderson = cfg.solver.anderson;
  if (f.initial == "random") o.initial = random_profile(cfg.n(), cfg.disc.nx, f.seed);
  return o;
}

int cmd_certify(const Flags& f) {
  Config cfg = load(f);
  need_linear(cfg, "certify");
  CertifyOptions o;
  o.nx = cfg.disc.nx;
  o.nt = cfg.disc.nt;
  o.gnorm_points = 4 * cfg.disc.nt;
  o.trace = TraceOptions::from(cfg.disc);
  o.a0 = cfg.disc.a0;
  CertificationReport r = certify(cfg.system, cfg.boundary, cfg.lyapunov, o);
  std::cerr << "lyapunov: " << (r.lyapunov_pass ? "pass" : "fail") << "  (ii) max eigenvalue "
            << format_number(r.cond_ii.value) << "  (iii) max eigenvalue " << format_number(r.cond_iii.value)
            << "\n";
  for (int i = 0; i < 3; ++i)
    std::cerr << "||G_" << i << "|| = " << format_number(r.dissipativity.norms[i].value) << "\n";
  std::cerr << "certificate: " << (r.pass ? "pass" : "fail") << "\n";
  finish(f, {{"command", "certify"}, {"config", cfg.origin}, {"certificate", to_json(r)}});
  return r.pass ? kOk : kFail;
}

int cmd_solve_linear(const Flags& f) {
  Config cfg = load(f);
  need_linear(cfg, "solve-linear");
  SolveReport r = solve_linear_periodic(cfg.system, cfg.boundary, cfg.disc, solver_options(cfg, f));
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << r.message << " after " << r.iterations << " iterations\n";
  write_solution_csv(out_path(f, "solution.csv"), r.solution);
  write_increments_csv(out_path(f, "convergence.csv"), r.increments);
  finish(f, {{"command", "solve-linear"}, {"config", cfg.origin}, {"seed", f.seed}, {"solve", to_json(r)}});
  return r.converged ? kOk : kFail;
}

int cmd_solve_quasilinear(const Flags& f) {
  Config cfg = load(f);
  if (!cfg.quasilinear) throw ConfigError(cfg.origin + ": 'solve-quasilinear' needs a [quasilinear] section");
  QuasilinearOptions o;
  o.tol_outer = cfg.solver.tol_outer;
  o.tol_inner = cfg.solver.tol_inner;
  o.maxit_outer = cfg.solver.maxit_outer;
  o.maxit_inner = cfg.solver.maxit;
  o.anderson = cfg.solver.anderson;
  SolveReport r = solve_quasilinear(cfg.qspec, cfg.boundary, cfg.disc, o);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << r.message << " after " << r.iterations << " outer iterations\n";
  write_solution_csv(out_path(f, "solution.csv"), r.solution);
  write_increments_csv(out_path(f, "convergence.csv"), r.increments);
  finish(f, {{"command", "solve-quasilinear"}, {"config", cfg.origin}, {"solve", to_json(r)}});
  return r.converged ? kOk : kFail;
}

int cmd_simulate(const Flags& f) {
  Config cfg = load(f);
  need_linear(cfg, "simulate");
  const double T = cfg.period();
  const double t_end = cfg.simulate.t_end.value_or(8.0 * T);
  const Snapshot phi = cfg.simulate.initial == "random" ? random_profile(cfg.n(), cfg.disc.nx, f.seed)
                                                        : Snapshot(cfg.n(), cfg.disc.nx);
  TrajectoryRecord rec = simulate(cfg.system, cfg.boundary, cfg.disc, phi, 0.0, t_end);
  write_norms_csv(out_path(f, "norms.csv"), rec);
  Json report = {{"command", "simulate"},
                 {"config", cfg.origin},
                 {"seed", f.seed},
                 {"initial", cfg.simulate.initial},
                 {"t_end", t_end},
                 {"steps", static_cast<int>(rec.times.size()) - 1}};
  if (t_end >= (cfg.simulate.skip + 3) * T * (1.0 - 1e-12) && rec.l2.front() > 0.0) {
    DecayEstimate d = fit_decay(rec, T, cfg.simulate.skip);
    report["decay"] = to_json(d);
    std::cerr << "alpha = " << format_number(d.alpha) << ", M = " << format_number(d.M) << "\n";
  } else {
    std::cerr << "record too short or zero initial data; no decay fit\n";
  }
  finish(f, report);
  return kOk;
}

int cmd_mms(const Flags& f) {
  Config cfg = load(f);
  need_linear(cfg, "mms");
  if (!cfg.mms) throw ConfigError(cfg.origin + ": 'mms' needs an [mms] section");
  SolverOptions o;
  o.tol = cfg.solver.tol;
  o.maxit = cfg.solver.maxit;
  o.anderson = cfg.solver.anderson;
  MmsResult r = mms_study(cfg.linear, cfg.mms->solution, cfg.mms->levels, cfg.disc, o);
  bool ok = r.monotone;
  for (const auto& l : r.levels) {
    ok = ok && l.converged;
    std::cerr << l.nx << "x" << l.nt << ": sup error " << format_number(l.sup_error) << ", order "
              << format_number(l.order) << "\n";
  }
  write_mms_csv(out_path(f, "convergence.csv"), r);
  finish(f, {{"command", "mms"}, {"config", cfg.origin}, {"mms", to_json(r)}});
  return ok ? kOk : kFail;
}

int cmd_perturb(const Flags& f) {
  Config cfg = load(f);
  need_linear(cfg, "perturb");
  SolverOptions o;
  o.tol = cfg.solver.tol;
  o.maxit = cfg.solver.maxit;
  o.anderson = cfg.solver.anderson;
  PerturbResult r = perturb_study(cfg.linear, cfg.disc, cfg.perturb.gamma, cfg.perturb.samples, f.seed, o);
  std::cerr << "max deviation " << format_number(r.max_deviation) << " (C = " << format_number(r.deviation_constant)
            << ")\n";
  write_perturb_csv(out_path(f, "convergence.csv"), r);
  finish(f, {{"command", "perturb"}, {"config", cfg.origin}, {"perturb", to_json(r)}});
  return r.all_converged ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-periodic solutions and stability certificates for 1D hyperbolic systems"};
  app.require_subcommand(1);
  Flags flags;
  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const Flags&);
  };
  const Entry entries[] = {
      {"certify", "check the Lyapunov and dissipativity conditions", cmd_certify},
      {"solve-linear", "periodic solution of the linear problem", cmd_solve_linear},
      {"solve-quasilinear", "periodic solution of the quasilinear problem", cmd_solve_quasilinear},
      {"simulate", "march the initial-boundary value problem and fit the decay", cmd_simulate},
      {"mms", "manufactured-solution convergence study", cmd_mms},
      {"perturb", "robustness study under random coefficient perturbations", cmd_perturb},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> cmds;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_flags(sub, flags);
    cmds.emplace_back(sub, &e);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  try {
    fs::create_directories(flags.out);
    for (auto [sub, e] : cmds)
      if (sub->parsed()) return e->run(flags);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kInputError;
}
