#pragma once

#include <optional>
#include <string>
#include <vector>

#include "perihyp/field.hpp"
#include "perihyp/grid.hpp"

namespace perihyp {

/// du/dt + a(x,t) du/dx + b(x,t) u = f(x,t) on [0,1], a diagonal.
/// Components 0..m-1 travel right (a_j > 0), m..n-1 travel left.
struct LinearSystemSpec {
  int n = 2;
  int m = 1;
  double period = 1.0;
  std::vector<Field> a;  // n
  std::vector<Field> b;  // n*n, row-major
  std::vector<Field> f;  // n

  const ScalarField& speed(int j) const { return *a[j]; }
  const ScalarField& coupling(int j, int k) const { return *b[static_cast<std::size_t>(j) * n + k]; }
  const ScalarField& forcing(int j) const { return *f[j]; }
  bool right_moving(int j) const { return j < m; }
};

/// du/dt + A(x,t,u) du/dx = F(x,t,u), A diagonal; expressions in x, t, u1..un.
struct QuasilinearSystemSpec {
  int n = 2;
  int m = 1;
  double period = 1.0;
  std::vector<Expression> A;
  std::vector<Expression> F;
  double delta0 = 0.1;  // validity radius for ||u||
};

/// Point evaluation w(t) * u_k(x*, t) inside a nonlocal functional.
struct PointSample {
  Field weight;  // depends on t only
  int component = 0;
  double location = 0.0;
};

/// Kernel integral of kernel(x,t) * u_k(x,t) over [0,1].
struct KernelIntegral {
  Field kernel;
  int component = 0;
};

/// Nonlocal part H_j(t, Q_j(t) u) of one boundary row.
struct NonlocalBoundary {
  Expression H;  // in t and q
  std::vector<PointSample> points;
  std::vector<KernelIntegral> kernels;

  /// Q_j(t) applied to a profile (kernel integrals by the trapezoid rule).
  double apply_Q(double t, const Snapshot& u) const;
  /// H_j(t, q) and its q-derivative.
  double H_value(double t, double q) const;
};

/// u_j(x_j, t) = R_j u(.,t) + h_j(t) [+ H_j(t, Q_j u)], with x_j the inflow end.
///
/// Row j of r multiplies the outgoing traces: v_k(1) for k < m, v_k(0) for k >= m.
struct BoundarySpec {
  int n = 2;
  std::vector<double> r;  // n*n, row-major
  std::vector<Field> h;   // n, functions of t
  std::vector<std::optional<NonlocalBoundary>> nonlocal;  // n

  double reflection(int j, int k) const { return r[static_cast<std::size_t>(j) * n + k]; }
  bool has_nonlocal() const;

  static BoundarySpec zero(int n);
};

/// Discretization shared by the tracing, marching and checking code.
struct Discretization {
  int nx = 128;
  int nt = 128;
  int substeps = 4;
  double a0 = 1e-3;
  InterpolationRule rule = InterpolationRule::Linear;

  Grid grid(double period) const { return Grid{nx, nt, period}; }
};

struct ConditionCheck {
  std::string name;
  bool pass = true;
  double margin = 0.0;  // attained value of the checked quantity
  double x = 0.0;
  double t = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ConditionCheck> checks;
  bool pass() const;
  /// Every failed check, one per line.
  std::string failures() const;
};

struct ValidationOptions {
  int nx = 128;  // cells, so nx+1 sample abscissae
  int nt = 128;
  double a0 = 1e-3;
  int periodicity_samples = 64;
  double periodicity_tol = 1e-9;
  unsigned seed = 42;
};

/// Checks sign pattern, speed separation (both with margin a0) and periodicity.
ValidationReport validate(const LinearSystemSpec& spec, const ValidationOptions& opts = {});
/// Same conditions for A(x,t,v) over sampled ||v|| <= delta0.
ValidationReport validate(const QuasilinearSystemSpec& spec, const ValidationOptions& opts = {});
/// Finite reflection matrix and finite Q_j(t)1 at sampled t.
ValidationReport validate(const BoundarySpec& spec, double period, const ValidationOptions& opts = {});

/// Throws std::invalid_argument listing the failures if the report does not pass.
void require(const ValidationReport& report, const std::string& what);

}  // namespace perihyp
