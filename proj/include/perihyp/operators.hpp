#pragma once

#include <vector>

#include "perihyp/characteristics.hpp"
#include "perihyp/grid.hpp"
#include "perihyp/model.hpp"

namespace perihyp {

/// Outflow traces z_j(t): u_j(1,t) for j < m, u_j(0,t) for j >= m.
using BoundaryTraceFunction = TimeSeries;

class NonContractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// [G_i psi]_j(t) = c_j^i(x_j, 1 - x_j, t) sum_k r_jk psi_k(omega_j(x_j, 1 - x_j, t)),
/// evaluated at the nodes of psi; psi is read by periodic linear interpolation.
BoundaryTraceFunction apply_G(const LinearSystemSpec& spec, const BoundarySpec& bspec, int i,
                              const BoundaryTraceFunction& psi, const TraceOptions& opts = {});

struct GNorm {
  double value = 0.0;
  int row = 0;     // maximizing row (0-based)
  double t = 0.0;  // maximizing time
  std::vector<double> row_values;  // sup over t of |c_j^i| sum_k |r_jk|, per row
};

/// sup over t and j of |c_j^i(x_j, 1 - x_j, t)| sum_k |r_jk| on `eval_points`
/// equally spaced times in one period. This is the sup norm of G_i: each psi_k
/// is read at one time per (j, t), so unit psi with aligned signs attains it.
GNorm g_norm(const LinearSystemSpec& spec, const BoundarySpec& bspec, int i, int eval_points,
             const TraceOptions& opts = {});

struct TraceSolveResult {
  BoundaryTraceFunction z;
  int iterations = 0;
  std::vector<double> increments;
};

/// Solves z = G_0 z + g by Picard iteration from z = 0.
/// Throws NonContractionError if g_norm(0) >= 1 and ConvergenceError after maxit.
TraceSolveResult boundary_trace_solve(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                                      const BoundaryTraceFunction& g, double tol, int maxit,
                                      const TraceOptions& opts = {});

/// Terms of u = Cu + Du + Ph + Sf at every node of u's grid.
struct OperatorTerms {
  GridFunction C, D, P, S;
};

/// Boundary data g_j(t) = h_j(t) + H_j(t, Q_j(t) u(.,t)) for the P term. Rows
/// without a nonlocal part use h_j exactly; nonlocal rows interpolate H between nodes.
class BoundaryForcing {
 public:
  BoundaryForcing(const BoundarySpec& bspec, const GridFunction* u);
  double operator()(int j, double t) const;

 private:
  const BoundarySpec& bspec_;
  TimeSeries nonlocal_;
  bool has_nonlocal_ = false;
};

OperatorTerms operator_terms(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                             const GridFunction& u, const TraceOptions& opts = {});

GridFunction apply_C(const LinearSystemSpec& spec, const BoundarySpec& bspec, const GridFunction& u,
                     const TraceOptions& opts = {});
GridFunction apply_D(const LinearSystemSpec& spec, const GridFunction& u, const TraceOptions& opts = {});
/// P applied to the h_j of bspec, on the given grid.
GridFunction apply_P(const LinearSystemSpec& spec, const BoundarySpec& bspec, const Grid& grid,
                     const TraceOptions& opts = {});
/// S applied to the forcing f of spec, on the given grid.
GridFunction apply_S(const LinearSystemSpec& spec, const Grid& grid, const TraceOptions& opts = {});

/// || u - (Cu + Du + Ph + Sf) ||_inf over the nodes of u's grid.
double residual_operator_equation(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                                  const GridFunction& u, const TraceOptions& opts = {});

}  // namespace perihyp
