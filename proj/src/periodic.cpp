#include "perihyp/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "perihyp/ibvp.hpp"
#include "perihyp/operators.hpp"
#include "perihyp/parallel.hpp"
#include "perihyp/quadrature.hpp"

namespace perihyp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Least-squares Anderson mixing over the stored history (type II).
class AndersonMixer {
 public:
  explicit AndersonMixer(int depth) : depth_(depth) {}

  // Returns the next iterate given x_k and G(x_k).
  Snapshot next(const Snapshot& x, const Snapshot& gx) {
    std::vector<double> f(x.data().size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = gx.data()[i] - x.data()[i];
    xs_.push_back(gx);
    fs_.push_back(f);
    if (static_cast<int>(fs_.size()) > depth_ + 1) {
      xs_.erase(xs_.begin());
      fs_.erase(fs_.begin());
    }
    const int cols = static_cast<int>(fs_.size()) - 1;
    if (cols == 0) return gx;
    const std::size_t len = f.size();
    // Columns dF_c = f_{c+1} - f_c; normal equations with a tiny ridge.
    std::vector<std::vector<double>> dF(cols, std::vector<double>(len));
    for (int c = 0; c < cols; ++c)
      for (std::size_t i = 0; i < len; ++i) dF[c][i] = fs_[c + 1][i] - fs_[c][i];
    std::vector<double> A(static_cast<std::size_t>(cols) * cols), rhs(cols);
    double scale = 0.0;
    for (int r = 0; r < cols; ++r) {
      for (int c = 0; c < cols; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += dF[r][i] * dF[c][i];
        A[r * cols + c] = s;
      }
      double s = 0.0;
      for (std::size_t i = 0; i < len; ++i) s += dF[r][i] * f[i];
      rhs[r] = s;
      scale = std::max(scale, A[r * cols + r]);
    }
    if (!(scale > 0.0)) return gx;
    for (int r = 0; r < cols; ++r) A[r * cols + r] += 1e-12 * scale;
    std::vector<double> gamma = rhs;
    for (int p = 0; p < cols; ++p) {
      int piv = p;
      for (int r = p + 1; r < cols; ++r)
        if (std::abs(A[r * cols + p]) > std::abs(A[piv * cols + p])) piv = r;
      if (A[piv * cols + p] == 0.0) return gx;
      if (piv != p) {
        for (int c = 0; c < cols; ++c) std::swap(A[p * cols + c], A[piv * cols + c]);
        std::swap(gamma[p], gamma[piv]);
      }
      for (int r = p + 1; r < cols; ++r) {
        const double fct = A[r * cols + p] / A[p * cols + p];
        for (int c = p; c < cols; ++c) A[r * cols + c] -= fct * A[p * cols + c];
        gamma[r] -= fct * gamma[p];
      }
    }
    for (int p = cols - 1; p >= 0; --p) {
      double s = gamma[p];
      for (int c = p + 1; c < cols; ++c) s -= A[p * cols + c] * gamma[c];
      gamma[p] = s / A[p * cols + p];
    }
    Snapshot out = gx;
    for (int c = 0; c < cols; ++c) {
      for (std::size_t i = 0; i < len; ++i)
        out.data()[i] -= gamma[c] * (xs_[c + 1].data()[i] - xs_[c].data()[i]);
    }
    return out;
  }

 private:
  int depth_;
  std::vector<Snapshot> xs_;
  std::vector<std::vector<double>> fs_;
};

int outflow_node(int k, int m, int nx) { return k < m ? nx : 0; }
int inflow_node(int j, int m, int nx) { return j < m ? 0 : nx; }

double boundary_residual_impl(int n, int m, const BoundarySpec& bspec, const GridFunction& u) {
  const Grid& g = u.grid();
  double res = 0.0;
  for (int l = 0; l < g.nt; ++l) {
    const double t = g.t(l);
    Snapshot s = bspec.has_nonlocal() ? u.snapshot(l) : Snapshot();
    for (int j = 0; j < n; ++j) {
      double rhs = bspec.h[j]->value(0.0, t);
      for (int k = 0; k < n; ++k) rhs += bspec.reflection(j, k) * u.at(l, outflow_node(k, m, g.nx), k);
      if (bspec.nonlocal.size() > static_cast<std::size_t>(j) && bspec.nonlocal[j]) {
        const auto& nl = *bspec.nonlocal[j];
        rhs += nl.H_value(t, nl.apply_Q(t, s));
      }
      res = std::max(res, std::abs(u.at(l, inflow_node(j, m, g.nx), j) - rhs));
    }
  }
  return res;
}

// A_j(x, t, u(x, t)) or d_u F evaluated through the Gauss-Legendre mean value.
class FrozenField final : public ScalarField {
 public:
  FrozenField(const Expression& e, std::shared_ptr<const GridFunction> u, bool mean_value, double sign)
      : program_(e), u_(std::move(u)), mean_value_(mean_value), sign_(sign) {
    for (int s : e.free_slots())
      if (s >= slot::u_base) used_.push_back(s - slot::u_base);
    set_fd_step_t(1e-5);
  }

  double value(double x, double t) const override {
    const int n = u_->components();
    std::vector<double> slots(std::max(program_.required_slots(), slot::u_base + n), 0.0);
    slots[slot::x] = x;
    slots[slot::t] = t;
    const double xc = std::clamp(x, 0.0, 1.0);
    std::vector<double> uval(n, 0.0);
    for (int k : used_) uval[k] = u_->interpolate(k, xc, t);
    if (!mean_value_) {
      for (int k : used_) slots[slot::u(k)] = uval[k];
      return sign_ * program_(slots);
    }
    double acc = 0.0;
    for (std::size_t g = 0; g < kGauss5Nodes.size(); ++g) {
      for (int k : used_) slots[slot::u(k)] = kGauss5Nodes[g] * uval[k];
      acc += kGauss5Weights[g] * program_(slots);
    }
    return sign_ * acc;
  }

 private:
  CompiledExpression program_;
  std::shared_ptr<const GridFunction> u_;
  std::vector<int> used_;
  bool mean_value_;
  double sign_;
};

// h_j(t) plus a tabulated periodic correction.
class ShiftedBoundaryField final : public ScalarField {
 public:
  ShiftedBoundaryField(Field base, std::shared_ptr<const TimeSeries> shift, int component)
      : base_(std::move(base)), shift_(std::move(shift)), component_(component) {}
  double value(double x, double t) const override {
    return base_->value(x, t) + shift_->interpolate(component_, t);
  }

 private:
  Field base_;
  std::shared_ptr<const TimeSeries> shift_;
  int component_;
};

bool depends_on_u(const Expression& e) {
  const auto slots = e.free_slots();
  return std::any_of(slots.begin(), slots.end(), [](int s) { return s >= slot::u_base; });
}

Expression zero_u(const Expression& e, int n) {
  Expression out = e;
  for (int k = 0; k < n; ++k) out = out.substitute(slot::u(k), Expression::constant(0.0));
  return out;
}

}  // namespace

GridFunction march_period(const LinearSystemSpec& spec, const BoundarySpec& bspec, const Discretization& disc,
                          const Snapshot& phi, Snapshot* end) {
  Marcher marcher(spec, bspec, disc);
  const Grid grid = disc.grid(spec.period);
  GridFunction out(grid, spec.n, disc.rule);
  Snapshot u = phi;
  out.set_snapshot(0, u);
  for (int l = 0; l < grid.nt; ++l) {
    u = marcher.step(u, grid.t(l));
    if (l + 1 < grid.nt) out.set_snapshot(l + 1, u);
  }
  if (end) *end = std::move(u);
  return out;
}

Snapshot period_map(const LinearSystemSpec& spec, const BoundarySpec& bspec, const Discretization& disc,
                    const Snapshot& phi) {
  Marcher marcher(spec, bspec, disc);
  const Grid grid = disc.grid(spec.period);
  Snapshot u = phi;
  for (int l = 0; l < grid.nt; ++l) u = marcher.step(u, grid.t(l));
  return u;
}

double pde_residual(const LinearSystemSpec& spec, const GridFunction& u) {
  const Grid& g = u.grid();
  const int n = spec.n;
  std::vector<double> worst(g.nt, 0.0);
  parallel_for(0, g.nt, [&](int l) {
    const double t = g.t(l);
    for (int i = 1; i < g.nx; ++i) {
      const double x = g.x(i);
      for (int j = 0; j < n; ++j) {
        const double ut = (u.at(l + 1, i, j) - u.at(l - 1, i, j)) / (2.0 * g.dt());
        const double ux = (u.at(l, i + 1, j) - u.at(l, i - 1, j)) / (2.0 * g.dx());
        double r = ut + spec.speed(j).value(x, t) * ux - spec.forcing(j).value(x, t);
        for (int k = 0; k < n; ++k) r += spec.coupling(j, k).value(x, t) * u.at(l, i, k);
        worst[l] = std::max(worst[l], std::abs(r));
      }
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

double boundary_residual(const LinearSystemSpec& spec, const BoundarySpec& bspec, const GridFunction& u) {
  return boundary_residual_impl(spec.n, spec.m, bspec, u);
}

SolveReport solve_linear_periodic(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                                  const Discretization& disc, const SolverOptions& opts) {
  SolveReport rep;
  rep.operator_residual = kNaN;
  rep.g0_norm = kNaN;
  if (opts.check_dissipativity) {
    rep.g0_norm = g_norm(spec, bspec, 0, 4 * disc.nt, TraceOptions::from(disc)).value;
    if (rep.g0_norm >= 1.0)
      rep.warnings.push_back("||G_0|| = " + format_double(rep.g0_norm) + " >= 1; the period map may not contract");
  }
  Marcher marcher(spec, bspec, disc);
  const Grid grid = disc.grid(spec.period);
  auto phi_map = [&](const Snapshot& phi) {
    Snapshot u = phi;
    for (int l = 0; l < grid.nt; ++l) u = marcher.step(u, grid.t(l));
    return u;
  };
  Snapshot phi = opts.initial ? *opts.initial : Snapshot(spec.n, disc.nx);
  if (phi.components() != spec.n || phi.nx() != disc.nx)
    throw std::invalid_argument("initial profile does not match the grid");
  AndersonMixer mixer(opts.anderson_depth);
  for (int it = 1; it <= opts.maxit; ++it) {
    Snapshot next = phi_map(phi);
    const double inc = sup_distance(next, phi);
    rep.increments.push_back(inc);
    rep.iterations = it;
    if (!std::isfinite(inc)) {
      rep.message = "period map iterate is not finite at iteration " + std::to_string(it);
      break;
    }
    if (inc < opts.tol) {
      phi = std::move(next);
      rep.converged = true;
      break;
    }
    phi = opts.anderson ? mixer.next(phi, next) : std::move(next);
  }
  if (!rep.converged && rep.message.empty()) {
    rep.message = "period map did not converge in " + std::to_string(opts.maxit) +
                  " iterations (last increment " + format_double(rep.increments.back()) + ")";
  }
  Snapshot end;
  rep.solution = march_period(spec, bspec, disc, phi, &end);
  rep.fixed_point_residual = sup_distance(end, phi);
  if (!rep.converged) return rep;
  rep.message = "converged";
  rep.pde_residual = pde_residual(spec, rep.solution);
  rep.boundary_residual = boundary_residual(spec, bspec, rep.solution);
  if (opts.operator_residual)
    rep.operator_residual = residual_operator_equation(spec, bspec, rep.solution, TraceOptions::from(disc));
  return rep;
}

// ---------------------------------------------------------------------------

FrozenProblem freeze(const QuasilinearSystemSpec& qspec, const BoundarySpec& bspec, const GridFunction& u) {
  const int n = qspec.n;
  auto frozen = std::make_shared<const GridFunction>(u);
  FrozenProblem out;
  LinearSystemSpec& s = out.spec;
  s.n = n;
  s.m = qspec.m;
  s.period = qspec.period;
  for (int j = 0; j < n; ++j) {
    const Expression& A = qspec.A[j];
    s.a.push_back(depends_on_u(A) ? std::make_shared<FrozenField>(A, frozen, false, 1.0) : make_field(A));
  }
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const Expression D = qspec.F[j].derivative(slot::u(k));
      if (depends_on_u(D))
        s.b.push_back(std::make_shared<FrozenField>(D, frozen, true, -1.0));
      else
        s.b.push_back(make_field(-D));
    }
  }
  for (int j = 0; j < n; ++j) s.f.push_back(make_field(zero_u(qspec.F[j], n)));

  out.bspec = bspec;
  if (bspec.has_nonlocal()) {
    const Grid& g = u.grid();
    auto series = std::make_shared<TimeSeries>(n, g.nt, g.period);
    for (int l = 0; l < g.nt; ++l) {
      Snapshot snap = u.snapshot(l);
      for (int j = 0; j < n; ++j) {
        if (!bspec.nonlocal[j]) continue;
        const auto& nl = *bspec.nonlocal[j];
        series->at(l, j) = nl.H_value(g.t(l), nl.apply_Q(g.t(l), snap));
      }
    }
    std::shared_ptr<const TimeSeries> shared = series;
    for (int j = 0; j < n; ++j) {
      if (!bspec.nonlocal[j]) continue;
      out.bspec.h[j] = std::make_shared<ShiftedBoundaryField>(bspec.h[j], shared, j);
      out.bspec.nonlocal[j].reset();
    }
  }
  return out;
}

double pde_residual(const QuasilinearSystemSpec& qspec, const GridFunction& u) {
  const Grid& g = u.grid();
  const int n = qspec.n;
  std::vector<CompiledExpression> A, F;
  for (int j = 0; j < n; ++j) {
    A.emplace_back(qspec.A[j]);
    F.emplace_back(qspec.F[j]);
  }
  std::vector<double> worst(g.nt, 0.0);
  parallel_for(0, g.nt, [&](int l) {
    std::vector<double> slots(slot::u_base + n, 0.0);
    slots[slot::t] = g.t(l);
    for (int i = 1; i < g.nx; ++i) {
      slots[slot::x] = g.x(i);
      for (int k = 0; k < n; ++k) slots[slot::u(k)] = u.at(l, i, k);
      for (int j = 0; j < n; ++j) {
        const double ut = (u.at(l + 1, i, j) - u.at(l - 1, i, j)) / (2.0 * g.dt());
        const double ux = (u.at(l, i + 1, j) - u.at(l, i - 1, j)) / (2.0 * g.dx());
        worst[l] = std::max(worst[l], std::abs(ut + A[j](slots) * ux - F[j](slots)));
      }
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

SolveReport solve_quasilinear(const QuasilinearSystemSpec& qspec, const BoundarySpec& bspec,
                              const Discretization& disc, const QuasilinearOptions& opts) {
  ValidationOptions vopts;
  vopts.nx = disc.nx;
  vopts.nt = disc.nt;
  vopts.a0 = disc.a0;
  require(validate(qspec, vopts), "quasilinear system");
  const Grid grid = disc.grid(qspec.period);
  GridFunction u = opts.initial ? *opts.initial : GridFunction(grid, qspec.n, disc.rule);
  if (u.grid().nx != grid.nx || u.grid().nt != grid.nt || u.components() != qspec.n)
    throw std::invalid_argument("initial iterate does not match the grid");

  SolveReport rep;
  rep.operator_residual = kNaN;
  rep.g0_norm = kNaN;
  FrozenProblem last;
  for (int k = 1; k <= opts.maxit_outer; ++k) {
    FrozenProblem frozen = freeze(qspec, bspec, u);
    SolverOptions inner;
    inner.tol = opts.tol_inner;
    inner.maxit = opts.maxit_inner;
    inner.anderson = opts.anderson;
    inner.operator_residual = false;
    inner.check_dissipativity = (k == 1);
    inner.initial = u.snapshot(0);
    SolveReport r = solve_linear_periodic(frozen.spec, frozen.bspec, disc, inner);
    if (k == 1) {
      rep.g0_norm = r.g0_norm;
      rep.warnings = r.warnings;
    }
    rep.inner_iterations += r.iterations;
    rep.iterations = k;
    rep.fixed_point_residual = r.fixed_point_residual;
    if (!r.converged) {
      rep.solution = std::move(r.solution);
      rep.message = "inner periodic solve failed at outer iteration " + std::to_string(k) + ": " + r.message;
      return rep;
    }
    const double inc = sup_distance(r.solution, u);
    if (!rep.increments.empty()) rep.outer_contraction.push_back(inc / rep.increments.back());
    rep.increments.push_back(inc);
    u = std::move(r.solution);
    last = std::move(frozen);
    if (!std::isfinite(inc)) {
      rep.message = "outer iteration diverged at iteration " + std::to_string(k);
      break;
    }
    if (u.sup_norm() > qspec.delta0) {
      rep.message = "radius error: ||u^" + std::to_string(k) + "|| = " + format_double(u.sup_norm()) +
                    " exceeds delta0 = " + format_double(qspec.delta0);
      break;
    }
    if (inc < opts.tol_outer) {
      rep.converged = true;
      break;
    }
  }
  rep.outer_increments = rep.increments;
  rep.solution = std::move(u);
  if (!rep.converged) {
    if (rep.message.empty())
      rep.message = "outer iteration did not converge in " + std::to_string(opts.maxit_outer) + " iterations";
    return rep;
  }
  rep.message = "converged";
  rep.pde_residual = pde_residual(qspec, rep.solution);
  rep.boundary_residual = boundary_residual_impl(qspec.n, qspec.m, bspec, rep.solution);
  if (opts.operator_residual)
    rep.operator_residual =
        residual_operator_equation(last.spec, last.bspec, rep.solution, TraceOptions::from(disc));
  return rep;
}

// ---------------------------------------------------------------------------

ManufacturedData manufactured_setup(int n, int m, const std::vector<Expression>& a,
                                    const std::vector<Expression>& b, const std::vector<double>& r,
                                    const std::vector<Expression>& ustar) {
  ManufacturedData out;
  for (int j = 0; j < n; ++j) {
    Expression f = ustar[j].derivative(slot::t) + a[j] * ustar[j].derivative(slot::x);
    for (int k = 0; k < n; ++k) f = f + b[static_cast<std::size_t>(j) * n + k] * ustar[k];
    out.f.push_back(f);
  }
  auto at_x = [](const Expression& e, double x) { return e.substitute(slot::x, Expression::constant(x)); };
  for (int j = 0; j < n; ++j) {
    Expression h = at_x(ustar[j], entry_abscissa(j, m));
    for (int k = 0; k < n; ++k) {
      const double rjk = r[static_cast<std::size_t>(j) * n + k];
      if (rjk != 0.0) h = h - Expression::constant(rjk) * at_x(ustar[k], 1.0 - entry_abscissa(k, m));
    }
    out.h.push_back(h);
  }
  return out;
}

LinearSystemSpec LinearProblem::system() const {
  LinearSystemSpec s;
  s.n = n;
  s.m = m;
  s.period = period;
  for (const auto& e : a) s.a.push_back(make_field(e));
  for (const auto& e : b) s.b.push_back(make_field(e));
  for (int j = 0; j < n; ++j)
    s.f.push_back(j < static_cast<int>(f.size()) ? make_field(f[j]) : make_field(0.0));
  return s;
}

BoundarySpec LinearProblem::boundary() const {
  BoundarySpec bs = BoundarySpec::zero(n);
  if (!r.empty()) bs.r = r;
  for (int j = 0; j < n && j < static_cast<int>(h.size()); ++j) bs.h[j] = make_field(h[j]);
  if (!nonlocal.empty()) bs.nonlocal = nonlocal;
  return bs;
}

MmsResult mms_study(const LinearProblem& base, const std::vector<Expression>& ustar,
                    const std::vector<std::pair<int, int>>& levels, const Discretization& disc,
                    const SolverOptions& opts) {
  if (static_cast<int>(ustar.size()) != base.n) throw std::invalid_argument("u* must have n components");
  for (const auto& nl : base.nonlocal)
    if (nl) throw std::invalid_argument("manufactured solutions require a local boundary condition");
  ManufacturedData md = manufactured_setup(base.n, base.m, base.a, base.b, base.r, ustar);
  LinearProblem problem = base;
  problem.f = md.f;
  problem.h = md.h;
  const LinearSystemSpec spec = problem.system();
  const BoundarySpec bspec = problem.boundary();
  std::vector<Field> exact;
  for (const auto& e : ustar) exact.push_back(make_field(e));

  MmsResult result;
  for (auto [nx, nt] : levels) {
    Discretization d = disc;
    d.nx = nx;
    d.nt = nt;
    SolveReport rep = solve_linear_periodic(spec, bspec, d, opts);
    MmsLevel lv;
    lv.nx = nx;
    lv.nt = nt;
    lv.iterations = rep.iterations;
    lv.converged = rep.converged;
    lv.operator_residual = rep.operator_residual;
    const GridFunction ref = sample_field(exact, rep.solution.grid());
    lv.sup_error = sup_distance(rep.solution, ref);
    const Grid& g = rep.solution.grid();
    for (int l = 0; l < g.nt; ++l)
      for (int i = 0; i <= g.nx; ++i)
        for (int j = 0; j < base.n; ++j) {
          const double d2 = rep.solution.at(l + 1, i, j) - 2.0 * rep.solution.at(l, i, j) +
                            rep.solution.at(l - 1, i, j);
          lv.d2t_max = std::max(lv.d2t_max, std::abs(d2) / (g.dt() * g.dt()));
        }
    if (!result.levels.empty()) {
      const MmsLevel& prev = result.levels.back();
      lv.order = std::log(prev.sup_error / lv.sup_error) / std::log(static_cast<double>(nx) / prev.nx);
    }
    result.levels.push_back(lv);
  }
  result.monotone = true;
  for (std::size_t k = 1; k < result.levels.size(); ++k)
    if (!(result.levels[k].sup_error < result.levels[k - 1].sup_error)) result.monotone = false;
  return result;
}

Expression perturbation(double gamma, double period, const std::array<double, 4>& c) {
  const double total = std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]) + std::abs(c[3]);
  if (gamma == 0.0 || total == 0.0) return Expression::constant(0.0);
  const Expression x = Expression::variable(slot::x);
  const Expression t = Expression::variable(slot::t);
  const Expression w = Expression::constant(2.0 * std::numbers::pi / period) * t;
  const Expression p = Expression::constant(c[0]) +
                       Expression::constant(c[1]) * cos(Expression::constant(std::numbers::pi) * x) +
                       Expression::constant(c[2]) * sin(w) + Expression::constant(c[3]) * cos(w);
  return Expression::constant(gamma / total) * p;
}

PerturbResult perturb_study(const LinearProblem& base, const Discretization& disc, double gamma, int samples,
                            unsigned seed, const SolverOptions& opts) {
  PerturbResult out;
  out.gamma = gamma;
  out.seed = seed;
  SolverOptions sopts = opts;
  sopts.operator_residual = false;
  const LinearSystemSpec base_spec = base.system();
  const BoundarySpec bspec = base.boundary();
  SolveReport base_rep = solve_linear_periodic(base_spec, bspec, disc, sopts);
  out.base_converged = base_rep.converged;
  out.base_norm = base_rep.solution.sup_norm();

  ValidationOptions vopts;
  vopts.nx = disc.nx;
  vopts.nt = disc.nt;
  vopts.a0 = disc.a0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  auto draw = [&] {
    std::array<double, 4> c{};
    for (double& v : c) v = coef(rng);
    return c;
  };
  out.all_converged = base_rep.converged;
  for (int s = 0; s < samples; ++s) {
    LinearProblem p = base;
    for (auto& e : p.a) e = e + perturbation(gamma, base.period, draw());
    for (auto& e : p.b) e = e + perturbation(gamma, base.period, draw());
    PerturbSample row;
    row.index = s;
    const LinearSystemSpec spec = p.system();
    ValidationReport vr = validate(spec, vopts);
    if (!vr.pass()) {
      row.valid = false;
      row.message = vr.failures();
      out.all_converged = false;
      out.samples.push_back(row);
      continue;
    }
    SolverOptions o = sopts;
    if (base_rep.converged) o.initial = base_rep.solution.snapshot(0);
    try {
      SolveReport rep = solve_linear_periodic(spec, bspec, disc, o);
      row.converged = rep.converged;
      row.iterations = rep.iterations;
      row.solution_norm = rep.solution.sup_norm();
      row.deviation = sup_distance(rep.solution, base_rep.solution);
      row.message = rep.message;
    } catch (const std::exception& e) {
      row.converged = false;
      row.message = e.what();
    }
    if (!row.converged) out.all_converged = false;
    if (row.converged) out.max_deviation = std::max(out.max_deviation, row.deviation);
    out.samples.push_back(row);
  }
  out.deviation_constant = gamma > 0.0 ? out.max_deviation / gamma : 0.0;
  return out;
}

Snapshot random_profile(int n, int nx, unsigned seed, double amplitude) {
  Snapshot s(n, nx);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  for (double& v : s.data()) v = dist(rng);
  return s;
}

}  // namespace perihyp
