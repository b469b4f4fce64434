// Acceptance run over the bundled configurations. Prints one PASS/FAIL line per
// criterion and exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "perihyp/certify.hpp"
#include "perihyp/config.hpp"
#include "perihyp/ibvp.hpp"
#include "perihyp/periodic.hpp"

using namespace perihyp;

namespace {

using Clock = std::chrono::steady_clock;

std::string bundled(const std::string& name) { return std::string(PERIHYP_CONFIG_DIR) + "/" + name; }

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects the individual checks of one criterion.
struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double grid_error(const GridFunction& u, const std::vector<Field>& exact) {
  const Grid& g = u.grid();
  double err = 0.0;
  for (int l = 0; l < g.nt; ++l)
    for (int i = 0; i <= g.nx; ++i)
      for (int j = 0; j < u.components(); ++j)
        err = std::max(err, std::abs(u.at(l, i, j) - exact[j]->value(g.x(i), g.t(l))));
  return err;
}

void ac1(Verdict& v) {
  Config c = load_config(bundled("example1.yaml"));
  CertifyOptions o;
  o.nx = 128;
  o.nt = 128;
  o.gnorm_points = 4 * o.nt;
  o.trace = TraceOptions::from(c.disc);
  const auto start = Clock::now();
  CertificationReport r = certify(c.system, c.boundary, c.lyapunov, o);
  const double elapsed = seconds_since(start);
  const double expected = (-5.0 + std::sqrt(13.0)) / 2.0;
  v.require(r.pass && r.validation.pass() && r.lyapunov_pass && r.dissipativity.pass, "all verdicts pass");
  v.require(std::abs(r.cond_ii.value - expected) <= 1e-6, "(ii) margin");
  double worst = 0.0;
  for (const auto& g : r.dissipativity.norms) {
    v.require(g.value < 1.0, "norm < 1");
    v.require(g.value <= 2.0 / std::numbers::e, "norm <= 2/e");
    v.require(std::abs(g.row_values[0] - 1.5 * std::exp(-3.0)) <= 1e-6, "row 1 = 1.5 e^-3");
    worst = std::max(worst, g.value);
  }
  v.require(elapsed <= 10.0, "runtime <= 10 s");
  v.detail << "(ii) max eigenvalue " << num(r.cond_ii.value) << " vs " << num(expected) << ", max ||G_i|| "
           << num(worst) << ", " << num(elapsed) << " s";
}

void ac2(Verdict& v) {
  Config c = load_config(bundled("transport.yaml"));
  std::vector<Field> exact = {make_field("sin(t - x)"), make_field(0.0)};
  const auto start = Clock::now();
  std::vector<double> errors;
  double err128 = 0.0;
  for (int n : {32, 64, 128, 256}) {
    Discretization d = c.disc;
    d.nx = n;
    d.nt = n;
    SolveReport r = solve_linear_periodic(c.system, c.boundary, d);
    v.require(r.converged, "converged at " + std::to_string(n));
    errors.push_back(grid_error(r.solution, exact));
    if (n == 128) err128 = errors.back();
  }
  const double elapsed = seconds_since(start);
  v.require(err128 <= 0.02, "sup error at 129x128");
  double min_order = 1e9;
  for (std::size_t k = 1; k < errors.size(); ++k) min_order = std::min(min_order, std::log2(errors[k - 1] / errors[k]));
  v.require(min_order >= 0.9, "order >= 0.9");
  v.require(elapsed <= 30.0, "runtime <= 30 s");
  v.detail << "error at 128 " << num(err128) << ", min order " << num(min_order) << ", " << num(elapsed) << " s";
}

void ac3(Verdict& v) {
  Config c = load_config(bundled("example1_mms.yaml"));
  MmsResult r = mms_study(c.linear, c.mms->solution, c.mms->levels, c.disc);
  v.require(r.levels.size() >= 4, "four levels");
  v.require(r.monotone, "monotone");
  double lo = 1e9, hi = -1e9, ratio = 0.0;
  for (std::size_t k = 0; k < r.levels.size(); ++k) {
    const MmsLevel& l = r.levels[k];
    v.require(l.converged, "converged");
    if (k > 0) {
      lo = std::min(lo, l.order);
      hi = std::max(hi, l.order);
    }
    ratio = std::max(ratio, l.operator_residual / l.sup_error);
  }
  v.require(lo >= 0.9 && hi <= 2.5, "orders in [0.9, 2.5]");
  v.require(ratio <= 10.0, "operator residual <= 10x error");
  v.detail << "orders in [" << num(lo) << ", " << num(hi) << "], max residual/error " << num(ratio) << ", finest error "
           << num(r.levels.back().sup_error);
}

void ac4(Verdict& v) {
  Config c = load_config(bundled("example1.yaml"));
  const double T = c.period();
  const int skip = 2;
  TrajectoryRecord rec = simulate(c.system, c.boundary, c.disc, random_profile(c.n(), c.disc.nx, 42), 0.0, 8.0 * T);
  DecayEstimate d = fit_decay(rec, T, skip);
  v.require(d.alpha > 0.0, "alpha > 0");
  std::vector<double> rho(d.contraction.begin() + skip, d.contraction.end());
  v.require(!rho.empty(), "post-transient factors");
  double log_mean = 0.0;
  for (double r : rho) log_mean += std::log(r);
  const double gmean = std::exp(log_mean / rho.size());
  const double predicted = std::exp(-d.alpha * T);
  double spread = 0.0, mismatch = 0.0;
  for (double r : rho) {
    spread = std::max(spread, std::abs(r / gmean - 1.0));
    mismatch = std::max(mismatch, std::abs(r / predicted - 1.0));
  }
  v.require(spread <= 0.2, "rho_l within 20% of their geometric mean");
  v.require(mismatch <= 0.2, "rho_l within 20% of exp(-alpha T)");
  const auto [mn, mx] = std::minmax_element(rho.begin(), rho.end());
  v.detail << "alpha " << num(d.alpha) << ", exp(-alpha T) " << num(predicted) << ", spread " << num(spread)
           << ", vs fit " << num(mismatch) << ", max/min " << num(*mx / *mn);
}

void ac5(Verdict& v) {
  Config c = load_config(bundled("example1_forced.yaml"));
  SolverOptions o;
  o.tol = c.solver.tol;
  o.maxit = c.solver.maxit;
  o.operator_residual = false;
  SolveReport zero = solve_linear_periodic(c.system, c.boundary, c.disc, o);
  o.initial = random_profile(c.n(), c.disc.nx, 42);
  SolveReport random = solve_linear_periodic(c.system, c.boundary, c.disc, o);
  v.require(zero.converged && random.converged, "both converge");
  const double dist = sup_distance(zero.solution, random.solution);
  v.require(dist <= 4.0 * o.tol, "agree within 4 tol");
  v.detail << "distance " << num(dist) << " (4 tol = " << num(4.0 * o.tol) << "), iterations " << zero.iterations
           << " and " << random.iterations;
}

void ac6(Verdict& v) {
  Config c = load_config(bundled("example1_quasilinear.yaml"));
  QuasilinearOptions o;
  o.tol_outer = c.solver.tol_outer;
  o.tol_inner = c.solver.tol_inner;
  o.maxit_outer = c.solver.maxit_outer;
  o.maxit_inner = c.solver.maxit;
  const double eps = 1e-3;
  SolveReport r = solve_quasilinear(c.qspec, c.boundary, c.disc, o);
  v.require(r.converged, "converges");
  double rho = 0.0;
  for (double q : r.outer_contraction) rho = std::max(rho, q);
  v.require(!r.outer_contraction.empty() && rho < 1.0, "outer contraction < 1");
  const double norm = r.solution.sup_norm();
  v.require(norm <= 10.0 * eps, "||u|| <= 10 eps");

  QuasilinearSystemSpec half = c.qspec;
  half.F[0] = half.F[0] - parse_expression("0.0005*sin(t)");
  SolveReport h = solve_quasilinear(half, c.boundary, c.disc, o);
  v.require(h.converged, "halved forcing converges");
  const double ratio = h.solution.sup_norm() / norm;
  v.require(ratio >= 0.4 && ratio <= 0.6, "halving ratio in [0.4, 0.6]");

  QuasilinearOptions restart = o;
  restart.initial = r.solution;
  SolveReport again = solve_quasilinear(c.qspec, c.boundary, c.disc, restart);
  v.require(again.converged && again.iterations == 1, "restart takes 1 iteration");
  v.detail << "rho " << num(rho) << ", ||u|| " << num(norm) << ", halving ratio " << num(ratio) << ", restart "
           << again.iterations << " iteration(s)";
}

void ac7(Verdict& v) {
  Config c = load_config(bundled("example1_forced.yaml"));
  SolverOptions o;
  o.tol = c.solver.tol;
  o.maxit = c.solver.maxit;
  PerturbResult big = perturb_study(c.linear, c.disc, 1e-2, 8, 42, o);
  PerturbResult small = perturb_study(c.linear, c.disc, 1e-3, 8, 42, o);
  v.require(big.base_converged && big.all_converged, "all samples converge at 1e-2");
  v.require(big.samples.size() == 8, "eight samples");
  v.require(std::isfinite(big.max_deviation) && big.max_deviation > 0.0, "finite deviation");
  v.require(small.all_converged, "all samples converge at 1e-3");
  const double ratio = small.max_deviation / big.max_deviation;
  v.require(ratio <= 0.25, "deviation ratio <= 0.25");
  v.detail << "max deviation " << num(big.max_deviation) << " (C = " << num(big.deviation_constant)
           << "), at 1e-3 " << num(small.max_deviation) << ", ratio " << num(ratio);
}

void ac8(Verdict& v) {
  const std::string cmd = std::string("\"") + PERIHYP_UNIT_TESTS + "\" --gtest_filter='*Property*' --gtest_brief=1";
  const auto start = Clock::now();
  const int status = std::system(cmd.c_str());
  const double elapsed = seconds_since(start);
  v.require(status == 0, "property suites pass");
  v.require(elapsed <= 300.0, "runtime <= 5 min");
  v.detail << "property suites " << (status == 0 ? "passed" : "failed") << " in " << num(elapsed) << " s";
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},
      {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  bool all = true;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    Verdict v;
    const auto start = Clock::now();
    try {
      run(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    all = all && v.pass;
    std::cout << name << ' ' << (v.pass ? "PASS" : "FAIL") << "  " << v.detail.str() << "  (" << num(seconds_since(start))
              << " s)" << std::endl;
  }
  return all ? 0 : 1;
}
