#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "perihyp/characteristics.hpp"
#include "perihyp/model.hpp"
#include "perihyp/operators.hpp"

namespace perihyp {

/// Small dense row-major square matrix.
struct SquareMatrix {
  int n = 0;
  std::vector<double> data;

  explicit SquareMatrix(int size = 0) : n(size), data(static_cast<std::size_t>(size) * size, 0.0) {}
  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * n + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * n + c]; }
  double asymmetry() const;
};

/// Eigenvalues of a symmetric matrix, ascending. Closed form for n <= 2,
/// cyclic Jacobi (off-diagonal threshold 1e-12) otherwise.
std::vector<double> symmetric_eigenvalues(const SquareMatrix& m);
/// Cyclic Jacobi regardless of size; exposed for cross-checking.
std::vector<double> jacobi_eigenvalues(SquareMatrix m, double threshold = 1e-12, int max_sweeps = 100);

/// Diagonal Lyapunov weight V(x,t) and optional required margins beta_1..beta_4.
struct LyapunovSpec {
  std::vector<Field> V;
  std::optional<std::array<double, 4>> margins;  // nullopt = "auto"

  static LyapunovSpec identity(int n);
};

/// u(0,t) = J0 z(t), u(1,t) = J1 z(t) with z = (u^1(1,t), u^2(0,t)).
struct JMatrices {
  SquareMatrix J0;
  SquareMatrix J1;
};
JMatrices build_J_matrices(const BoundarySpec& bspec, int n, int m);

struct CertifyOptions {
  int nx = 128;           // cells for condition (ii)
  int nt = 128;           // time samples for condition (ii)
  int boundary_nt = 512;  // time samples for condition (iii)
  int gnorm_points = 512; // time samples for ||G_i||
  TraceOptions trace;
  double a0 = 1e-3;
};

struct LyapunovCondition {
  std::string name;
  bool pass = false;
  double value = 0.0;   // attained extreme (min V for "i_lower", max eigenvalue for ii/iii)
  double margin = 0.0;  // beta attained: min V, max V, or -max eigenvalue
  double required = 0.0;
  double x = 0.0;
  double t = 0.0;
};

struct DissipativityResult {
  std::array<GNorm, 3> norms;
  bool pass = false;
};

struct CertificationReport {
  ValidationReport validation;
  LyapunovCondition cond_i_lower;  // beta_1 <= min V
  LyapunovCondition cond_i_upper;  // max V <= beta_2
  LyapunovCondition cond_ii;
  LyapunovCondition cond_iii;
  bool lyapunov_pass = false;
  DissipativityResult dissipativity;
  bool auto_margins = true;
  bool pass = false;
  std::string note;
};

/// Assembled d_t V + d_x(V a) - V b - b^T V at one point.
SquareMatrix lyapunov_interior_matrix(const LinearSystemSpec& spec, const LyapunovSpec& lspec,
                                      double x, double t);
/// Assembled J0^T V(0,t) a(0,t) J0 - J1^T V(1,t) a(1,t) J1.
SquareMatrix lyapunov_boundary_matrix(const LinearSystemSpec& spec, const LyapunovSpec& lspec,
                                      const JMatrices& J, double t);

/// Conditions (i)-(iii) of the Lyapunov criterion; dissipativity and validation are left empty.
CertificationReport lyapunov_check(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                                   const LyapunovSpec& lspec, const CertifyOptions& opts = {});

/// ||G_i|| for i = 0, 1, 2; pass iff all are < 1.
DissipativityResult dissipativity_check(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                                        const CertifyOptions& opts = {});

/// Validation, Lyapunov conditions and dissipativity in one report.
CertificationReport certify(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                            const LyapunovSpec& lspec, const CertifyOptions& opts = {});

}  // namespace perihyp
