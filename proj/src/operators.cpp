#include "perihyp/operators.hpp"

#include <cmath>
#include <string>

#include "perihyp/parallel.hpp"
#include "perihyp/quadrature.hpp"

namespace perihyp {

namespace {

double outflow_abscissa(int k, int m) { return 1.0 - entry_abscissa(k, m); }

// Exit time and end weight of the full trace from the outflow end back to x_j.
struct BoundaryCrossing {
  double exit_time;
  double weight;
};

BoundaryCrossing boundary_crossing(const LinearSystemSpec& spec, int j, double t, int i,
                                   const TraceOptions& opts) {
  const double xj = entry_abscissa(j, spec.m);
  CharacteristicTrace tr = trace(spec, j, 1.0 - xj, t, xj, opts);
  fill_weights(spec, tr, i);
  return {tr.end_omega(), tr.c[i].back()};
}

double row_abs_sum(const BoundarySpec& bspec, int j) {
  double s = 0.0;
  for (int k = 0; k < bspec.n; ++k) s += std::abs(bspec.reflection(j, k));
  return s;
}

}  // namespace

BoundaryTraceFunction apply_G(const LinearSystemSpec& spec, const BoundarySpec& bspec, int i,
                              const BoundaryTraceFunction& psi, const TraceOptions& opts) {
  const int n = spec.n;
  BoundaryTraceFunction out(n, psi.nodes(), psi.period());
  parallel_for(0, psi.nodes(), [&](int l) {
    const double t = psi.time(l);
    for (int j = 0; j < n; ++j) {
      auto [tau, c] = boundary_crossing(spec, j, t, i, opts);
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        const double r = bspec.reflection(j, k);
        if (r != 0.0) acc += r * psi.interpolate(k, tau);
      }
      out.at(l, j) = c * acc;
    }
  });
  return out;
}

GNorm g_norm(const LinearSystemSpec& spec, const BoundarySpec& bspec, int i, int eval_points,
             const TraceOptions& opts) {
  const int n = spec.n;
  std::vector<double> values(static_cast<std::size_t>(eval_points) * n, 0.0);
  parallel_for(0, eval_points, [&](int l) {
    const double t = spec.period * l / eval_points;
    for (int j = 0; j < n; ++j) {
      const double rsum = row_abs_sum(bspec, j);
      if (rsum == 0.0) continue;
      values[static_cast<std::size_t>(l) * n + j] =
          std::abs(boundary_crossing(spec, j, t, i, opts).weight) * rsum;
    }
  });
  GNorm g;
  g.row_values.assign(n, 0.0);
  for (int l = 0; l < eval_points; ++l) {
    for (int j = 0; j < n; ++j) {
      const double v = values[static_cast<std::size_t>(l) * n + j];
      g.row_values[j] = std::max(g.row_values[j], v);
      if (v > g.value) {
        g.value = v;
        g.row = j;
        g.t = spec.period * l / eval_points;
      }
    }
  }
  return g;
}

TraceSolveResult boundary_trace_solve(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                                      const BoundaryTraceFunction& g, double tol, int maxit,
                                      const TraceOptions& opts) {
  const double norm0 = g_norm(spec, bspec, 0, 4 * g.nodes(), opts).value;
  if (norm0 >= 1.0)
    throw NonContractionError("||G_0|| = " + std::to_string(norm0) + " >= 1: Picard iteration does not contract");
  const int n = spec.n;
  const int nt = g.nodes();
  // One trace per (node, row); the iteration itself is then a weighted shift.
  std::vector<BoundaryCrossing> crossings(static_cast<std::size_t>(nt) * n);
  parallel_for(0, nt, [&](int l) {
    for (int j = 0; j < n; ++j)
      crossings[static_cast<std::size_t>(l) * n + j] = boundary_crossing(spec, j, g.time(l), 0, opts);
  });
  TraceSolveResult result;
  result.z = BoundaryTraceFunction(n, nt, g.period());
  for (int it = 1; it <= maxit; ++it) {
    BoundaryTraceFunction next(n, nt, g.period());
    for (int l = 0; l < nt; ++l) {
      for (int j = 0; j < n; ++j) {
        const auto& cr = crossings[static_cast<std::size_t>(l) * n + j];
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
          const double r = bspec.reflection(j, k);
          if (r != 0.0) acc += r * result.z.interpolate(k, cr.exit_time);
        }
        next.at(l, j) = cr.weight * acc + g.at(l, j);
      }
    }
    const double inc = sup_distance(next, result.z);
    result.z = std::move(next);
    result.iterations = it;
    result.increments.push_back(inc);
    if (inc < tol) return result;
  }
  throw ConvergenceError("boundary trace iteration did not converge in " + std::to_string(maxit) +
                         " iterations");
}

// ---------------------------------------------------------------------------

BoundaryForcing::BoundaryForcing(const BoundarySpec& bspec, const GridFunction* u) : bspec_(bspec) {
  has_nonlocal_ = bspec.has_nonlocal() && u != nullptr;
  if (!has_nonlocal_) return;
  const Grid& grid = u->grid();
  nonlocal_ = TimeSeries(bspec.n, grid.nt, grid.period);
  for (int l = 0; l < grid.nt; ++l) {
    Snapshot s = u->snapshot(l);
    for (int j = 0; j < bspec.n; ++j) {
      if (!bspec.nonlocal[j]) continue;
      const auto& nl = *bspec.nonlocal[j];
      const double t = grid.t(l);
      nonlocal_.at(l, j) = nl.H_value(t, nl.apply_Q(t, s));
    }
  }
}

double BoundaryForcing::operator()(int j, double t) const {
  double v = bspec_.h[j]->value(0.0, t);
  if (has_nonlocal_ && bspec_.nonlocal[j]) v += nonlocal_.interpolate(j, t);
  return v;
}

namespace {

struct TermMask {
  bool C = false, D = false, P = false, S = false;
};

struct NodeTerms {
  double C = 0.0, D = 0.0, P = 0.0, S = 0.0;
};

NodeTerms node_terms(const LinearSystemSpec& spec, const BoundarySpec* bspec, const GridFunction* u,
                     const BoundaryForcing* forcing, int j, double x, double t, TermMask mask,
                     const TraceOptions& opts) {
  const int n = spec.n;
  const double xj = entry_abscissa(j, spec.m);
  CharacteristicTrace tr = trace(spec, j, x, t, xj, opts);
  fill_weights(spec, tr, 0);
  NodeTerms out;
  const double tau = tr.end_omega();
  const double c_end = tr.c[0].back();
  if (mask.C) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const double r = bspec->reflection(j, k);
      if (r != 0.0) acc += r * u->interpolate(k, outflow_abscissa(k, spec.m), tau);
    }
    out.C = c_end * acc;
  }
  if (mask.P) out.P = c_end * (*forcing)(j, tau);
  if ((mask.D || mask.S) && tr.size() > 1) {
    const std::size_t count = tr.size();
    std::vector<double> dterm(count, 0.0), sterm(count, 0.0);
    for (std::size_t s = 0; s < count; ++s) {
      const double xi = tr.xi[s];
      const double om = tr.omega[s];
      if (mask.D) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == j) continue;
          const ScalarField& bjk = spec.coupling(j, k);
          if (bjk.is_constant() && bjk.value(0.0, 0.0) == 0.0) continue;
          acc += bjk.value(xi, om) * u->interpolate(k, xi, om);
        }
        dterm[s] = tr.d[s] * acc;
      }
      if (mask.S) sterm[s] = tr.d[s] * spec.forcing(j).value(xi, om);
    }
    // The lattice runs from x to x_j, so Simpson yields int_x^{x_j}.
    const double h = tr.step();
    if (mask.D) out.D = simpson(dterm, h);
    if (mask.S) out.S = -simpson(sterm, h);
  }
  return out;
}

void sweep(const LinearSystemSpec& spec, const BoundarySpec* bspec, const GridFunction* u,
           const Grid& grid, TermMask mask, const TraceOptions& opts, OperatorTerms& terms) {
  const int n = spec.n;
  std::unique_ptr<BoundaryForcing> forcing;
  if (mask.P) forcing = std::make_unique<BoundaryForcing>(*bspec, u);
  auto init = [&](GridFunction& g, bool on) {
    if (on) g = GridFunction(grid, n, u ? u->rule() : InterpolationRule::Linear);
  };
  init(terms.C, mask.C);
  init(terms.D, mask.D);
  init(terms.P, mask.P);
  init(terms.S, mask.S);
  parallel_for(0, grid.nt, [&](int l) {
    const double t = grid.t(l);
    for (int i = 0; i <= grid.nx; ++i) {
      for (int j = 0; j < n; ++j) {
        NodeTerms nt = node_terms(spec, bspec, u, forcing.get(), j, grid.x(i), t, mask, opts);
        if (mask.C) terms.C.at(l, i, j) = nt.C;
        if (mask.D) terms.D.at(l, i, j) = nt.D;
        if (mask.P) terms.P.at(l, i, j) = nt.P;
        if (mask.S) terms.S.at(l, i, j) = nt.S;
      }
    }
  });
}

}  // namespace

OperatorTerms operator_terms(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                             const GridFunction& u, const TraceOptions& opts) {
  OperatorTerms terms;
  sweep(spec, &bspec, &u, u.grid(), {true, true, true, true}, opts, terms);
  return terms;
}

GridFunction apply_C(const LinearSystemSpec& spec, const BoundarySpec& bspec, const GridFunction& u,
                     const TraceOptions& opts) {
  OperatorTerms terms;
  sweep(spec, &bspec, &u, u.grid(), {true, false, false, false}, opts, terms);
  return std::move(terms.C);
}

GridFunction apply_D(const LinearSystemSpec& spec, const GridFunction& u, const TraceOptions& opts) {
  OperatorTerms terms;
  sweep(spec, nullptr, &u, u.grid(), {false, true, false, false}, opts, terms);
  return std::move(terms.D);
}

GridFunction apply_P(const LinearSystemSpec& spec, const BoundarySpec& bspec, const Grid& grid,
                     const TraceOptions& opts) {
  OperatorTerms terms;
  sweep(spec, &bspec, nullptr, grid, {false, false, true, false}, opts, terms);
  return std::move(terms.P);
}

GridFunction apply_S(const LinearSystemSpec& spec, const Grid& grid, const TraceOptions& opts) {
  OperatorTerms terms;
  sweep(spec, nullptr, nullptr, grid, {false, false, false, true}, opts, terms);
  return std::move(terms.S);
}

double residual_operator_equation(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                                  const GridFunction& u, const TraceOptions& opts) {
  OperatorTerms terms = operator_terms(spec, bspec, u, opts);
  const Grid& g = u.grid();
  double res = 0.0;
  for (int l = 0; l < g.nt; ++l)
    for (int i = 0; i <= g.nx; ++i)
      for (int j = 0; j < spec.n; ++j) {
        const double rhs =
            terms.C.at(l, i, j) + terms.D.at(l, i, j) + terms.P.at(l, i, j) + terms.S.at(l, i, j);
        res = std::max(res, std::abs(u.at(l, i, j) - rhs));
      }
  return res;
}

}  // namespace perihyp
