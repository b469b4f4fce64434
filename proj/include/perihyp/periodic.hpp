#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "perihyp/grid.hpp"
#include "perihyp/model.hpp"

namespace perihyp {

struct SolverOptions {
  double tol = 1e-8;  // sup norm of the period-map increment
  int maxit = 200;
  bool anderson = false;
  int anderson_depth = 3;
  bool operator_residual = true;
  bool check_dissipativity = true;
  std::optional<Snapshot> initial;  // starting profile at t = 0 (default 0)
};

struct SolveReport {
  GridFunction solution;
  int iterations = 0;
  std::vector<double> increments;
  double fixed_point_residual = 0.0;  // ||Phi(phi*) - phi*||_inf
  double operator_residual = 0.0;     // NaN when not computed
  double pde_residual = 0.0;          // central differences at interior nodes
  double boundary_residual = 0.0;
  double g0_norm = 0.0;               // NaN when not computed
  bool converged = false;
  std::string message;
  std::vector<std::string> warnings;

  // Quasilinear runs only.
  std::vector<double> outer_increments;
  std::vector<double> outer_contraction;  // increment ratios k+1 over k
  int inner_iterations = 0;               // summed over outer iterations
};

/// One-period march from (0, phi).
Snapshot period_map(const LinearSystemSpec& spec, const BoundarySpec& bspec, const Discretization& disc,
                    const Snapshot& phi);

/// March from (0, phi) over one period, storing the state at every time node.
/// `end`, if given, receives the state at t = T.
GridFunction march_period(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                          const Discretization& disc, const Snapshot& phi, Snapshot* end = nullptr);

/// Fixed point of the period map by Picard iteration (optionally Anderson accelerated).
SolveReport solve_linear_periodic(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                                  const Discretization& disc, const SolverOptions& opts = {});

/// Residuals of a grid solution of the linear problem.
double pde_residual(const LinearSystemSpec& spec, const GridFunction& u);
double boundary_residual(const LinearSystemSpec& spec, const BoundarySpec& bspec, const GridFunction& u);

struct QuasilinearOptions {
  double tol_outer = 1e-8;
  double tol_inner = 1e-10;
  int maxit_outer = 50;
  int maxit_inner = 200;
  bool anderson = false;
  bool operator_residual = false;
  std::optional<GridFunction> initial;  // outer starting iterate (default 0)
};

/// Coefficients of the problem frozen at a given iterate.
struct FrozenProblem {
  LinearSystemSpec spec;
  BoundarySpec bspec;
};

/// A^k = A(x,t,u^k), B^k = -int_0^1 d_u F(x,t,sigma u^k) d sigma, f = F(x,t,0),
/// and boundary data h_j + H_j(t, Q_j u^k) folded into h.
FrozenProblem freeze(const QuasilinearSystemSpec& qspec, const BoundarySpec& bspec, const GridFunction& u);

/// Outer Picard iteration over frozen linear periodic problems.
SolveReport solve_quasilinear(const QuasilinearSystemSpec& qspec, const BoundarySpec& bspec,
                              const Discretization& disc, const QuasilinearOptions& opts = {});

/// Residual of du/dt + A(u) du/dx - F(u) by central differences at interior nodes.
double pde_residual(const QuasilinearSystemSpec& qspec, const GridFunction& u);

// ---------------------------------------------------------------------------

/// Forcing and boundary data for which u* solves the linear problem.
struct ManufacturedData {
  std::vector<Expression> f;  // in x, t
  std::vector<Expression> h;  // in t
};

/// f = d_t u* + a d_x u* + b u*, h_j = u*_j(x_j, t) - R_j u*(., t).
ManufacturedData manufactured_setup(int n, int m, const std::vector<Expression>& a,
                                    const std::vector<Expression>& b, const std::vector<double>& r,
                                    const std::vector<Expression>& ustar);

/// Linear problem stated with expressions, so that it can be rebuilt with new data.
struct LinearProblem {
  int n = 2;
  int m = 1;
  double period = 1.0;
  std::vector<Expression> a;  // n
  std::vector<Expression> b;  // n*n
  std::vector<Expression> f;  // n
  std::vector<double> r;      // n*n
  std::vector<Expression> h;  // n
  std::vector<std::optional<NonlocalBoundary>> nonlocal;  // n, may be empty

  LinearSystemSpec system() const;
  BoundarySpec boundary() const;
};

struct MmsLevel {
  int nx = 0;
  int nt = 0;
  double sup_error = 0.0;
  double operator_residual = 0.0;
  double order = 0.0;    // log2 of the error ratio to the previous level; 0 for the first
  double d2t_max = 0.0;  // max |second difference in t| / dt^2
  int iterations = 0;
  bool converged = false;
};

struct MmsResult {
  std::vector<MmsLevel> levels;
  bool monotone = false;
};

/// Solves the manufactured problem on each (nx, nt) level and measures the sup error against u*.
MmsResult mms_study(const LinearProblem& base, const std::vector<Expression>& ustar,
                    const std::vector<std::pair<int, int>>& levels, const Discretization& disc,
                    const SolverOptions& opts = {});

struct PerturbSample {
  int index = 0;
  bool valid = true;   // perturbed spec passed validation
  bool converged = false;
  int iterations = 0;
  double solution_norm = 0.0;
  double deviation = 0.0;  // sup distance to the base solution
  std::string message;
};

struct PerturbResult {
  double gamma = 0.0;
  unsigned seed = 42;
  double base_norm = 0.0;
  bool base_converged = false;
  std::vector<PerturbSample> samples;
  double max_deviation = 0.0;
  double deviation_constant = 0.0;  // max deviation / gamma
  bool all_converged = false;
};

/// Smooth periodic perturbation of amplitude <= gamma:
/// gamma (c0 + c1 cos(pi x) + c2 sin(2 pi t/T) + c3 cos(2 pi t/T)) / sum |c_i|.
Expression perturbation(double gamma, double period, const std::array<double, 4>& c);

/// Re-solves the problem with every a_j and b_jk perturbed; samples are seeded deterministically.
PerturbResult perturb_study(const LinearProblem& base, const Discretization& disc, double gamma, int samples,
                            unsigned seed = 42, const SolverOptions& opts = {});

/// Uniform random profile in [-amplitude, amplitude] at every node.
Snapshot random_profile(int n, int nx, unsigned seed, double amplitude = 1.0);

}  // namespace perihyp
