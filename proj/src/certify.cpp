#include "perihyp/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "perihyp/parallel.hpp"

namespace perihyp {

double SquareMatrix::asymmetry() const {
  double s = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c) s = std::max(s, std::abs((*this)(r, c) - (*this)(c, r)));
  return s;
}

std::vector<double> jacobi_eigenvalues(SquareMatrix a, double threshold, int max_sweeps) {
  const int n = a.n;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off < threshold) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < threshold * 1e-3) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int k = 0; k < n; ++k) ev[k] = a(k, k);
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<double> symmetric_eigenvalues(const SquareMatrix& m) {
  if (m.n == 1) return {m(0, 0)};
  if (m.n == 2) {
    const double mean = 0.5 * (m(0, 0) + m(1, 1));
    const double half = 0.5 * (m(0, 0) - m(1, 1));
    const double rad = std::hypot(half, m(0, 1));
    return {mean - rad, mean + rad};
  }
  return jacobi_eigenvalues(m);
}

LyapunovSpec LyapunovSpec::identity(int n) {
  LyapunovSpec l;
  l.V.assign(n, make_field(1.0));
  return l;
}

JMatrices build_J_matrices(const BoundarySpec& bspec, int n, int m) {
  JMatrices J{SquareMatrix(n), SquareMatrix(n)};
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j < m) {
        J.J0(j, k) = bspec.reflection(j, k);
        J.J1(j, k) = (j == k) ? 1.0 : 0.0;
      } else {
        J.J0(j, k) = (j == k) ? 1.0 : 0.0;
        J.J1(j, k) = bspec.reflection(j, k);
      }
    }
  }
  return J;
}

namespace {

// d/dx (V_j a_j), symbolic when both factors carry expressions.
class VaDerivative {
 public:
  VaDerivative(const ScalarField& V, const ScalarField& a) : V_(V), a_(a) {
    if (V.expression() && a.expression()) {
      symbolic_ = CompiledExpression((*V.expression() * *a.expression()).derivative(slot::x));
    }
  }
  double operator()(double x, double t) const {
    if (symbolic_) {
      const std::array<double, 2> s{x, t};
      return (*symbolic_)(s);
    }
    return V_.dx(x, t) * a_.value(x, t) + V_.value(x, t) * a_.dx(x, t);
  }

 private:
  const ScalarField& V_;
  const ScalarField& a_;
  std::optional<CompiledExpression> symbolic_;
};

class InteriorAssembler {
 public:
  InteriorAssembler(const LinearSystemSpec& spec, const LyapunovSpec& lspec)
      : spec_(spec), lspec_(lspec) {
    if (static_cast<int>(lspec.V.size()) != spec.n)
      throw std::invalid_argument("Lyapunov weight must have n entries");
    for (int j = 0; j < spec.n; ++j) va_.emplace_back(*lspec.V[j], spec.speed(j));
  }

  SquareMatrix operator()(double x, double t) const {
    const int n = spec_.n;
    SquareMatrix M(n);
    std::vector<double> V(n);
    for (int j = 0; j < n; ++j) V[j] = lspec_.V[j]->value(x, t);
    std::vector<double> b(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) b[static_cast<std::size_t>(j) * n + k] = spec_.coupling(j, k).value(x, t);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        M(j, k) = -(V[j] * b[static_cast<std::size_t>(j) * n + k] + b[static_cast<std::size_t>(k) * n + j] * V[k]);
      }
      M(j, j) += lspec_.V[j]->dt(x, t) + va_[j](x, t);
    }
    if (M.asymmetry() > 1e-12) throw std::logic_error("interior Lyapunov matrix is not symmetric");
    return M;
  }

 private:
  const LinearSystemSpec& spec_;
  const LyapunovSpec& lspec_;
  std::vector<VaDerivative> va_;
};

}  // namespace

SquareMatrix lyapunov_interior_matrix(const LinearSystemSpec& spec, const LyapunovSpec& lspec,
                                      double x, double t) {
  return InteriorAssembler(spec, lspec)(x, t);
}

SquareMatrix lyapunov_boundary_matrix(const LinearSystemSpec& spec, const LyapunovSpec& lspec,
                                      const JMatrices& J, double t) {
  const int n = spec.n;
  std::vector<double> D0(n), D1(n);
  for (int r = 0; r < n; ++r) {
    D0[r] = lspec.V[r]->value(0.0, t) * spec.speed(r).value(0.0, t);
    D1[r] = lspec.V[r]->value(1.0, t) * spec.speed(r).value(1.0, t);
  }
  SquareMatrix M(n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      double acc = 0.0;
      for (int r = 0; r < n; ++r) acc += J.J0(r, p) * D0[r] * J.J0(r, q) - J.J1(r, p) * D1[r] * J.J1(r, q);
      M(p, q) = acc;
    }
  }
  double scale = 1.0;
  for (double v : M.data) scale = std::max(scale, std::abs(v));
  if (M.asymmetry() > 1e-12 * scale) throw std::logic_error("boundary Lyapunov matrix is not symmetric");
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) M(q, p) = M(p, q);
  return M;
}

CertificationReport lyapunov_check(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                                   const LyapunovSpec& lspec, const CertifyOptions& opts) {
  const int n = spec.n;
  CertificationReport rep;
  rep.auto_margins = !lspec.margins.has_value();
  InteriorAssembler interior(spec, lspec);

  struct PointResult {
    double vmin, vmax, eig;
  };
  const int nxs = opts.nx + 1;
  std::vector<PointResult> pts(static_cast<std::size_t>(opts.nt) * nxs);
  parallel_for(0, opts.nt, [&](int l) {
    const double t = spec.period * l / opts.nt;
    for (int i = 0; i < nxs; ++i) {
      const double x = static_cast<double>(i) / opts.nx;
      PointResult pr{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
      for (int j = 0; j < n; ++j) {
        const double v = lspec.V[j]->value(x, t);
        pr.vmin = std::min(pr.vmin, v);
        pr.vmax = std::max(pr.vmax, v);
      }
      pr.eig = symmetric_eigenvalues(interior(x, t)).back();
      pts[static_cast<std::size_t>(l) * nxs + i] = pr;
    }
  });

  auto& lo = rep.cond_i_lower;
  auto& hi = rep.cond_i_upper;
  auto& c2 = rep.cond_ii;
  lo.name = "i_lower";
  hi.name = "i_upper";
  c2.name = "ii_interior";
  lo.value = std::numeric_limits<double>::infinity();
  hi.value = -std::numeric_limits<double>::infinity();
  c2.value = -std::numeric_limits<double>::infinity();
  for (int l = 0; l < opts.nt; ++l) {
    for (int i = 0; i < nxs; ++i) {
      const auto& pr = pts[static_cast<std::size_t>(l) * nxs + i];
      const double x = static_cast<double>(i) / opts.nx;
      const double t = spec.period * l / opts.nt;
      if (pr.vmin < lo.value) {
        lo.value = pr.vmin;
        lo.x = x;
        lo.t = t;
      }
      if (pr.vmax > hi.value) {
        hi.value = pr.vmax;
        hi.x = x;
        hi.t = t;
      }
      if (pr.eig > c2.value) {
        c2.value = pr.eig;
        c2.x = x;
        c2.t = t;
      }
    }
  }
  lo.margin = lo.value;
  hi.margin = hi.value;
  c2.margin = -c2.value;

  // Condition (iii) on the boundary time grid.
  const JMatrices J = build_J_matrices(bspec, n, spec.m);
  auto& c3 = rep.cond_iii;
  c3.name = "iii_boundary";
  c3.value = -std::numeric_limits<double>::infinity();
  std::vector<double> eig3(opts.boundary_nt);
  parallel_for(0, opts.boundary_nt, [&](int l) {
    const double t = spec.period * l / opts.boundary_nt;
    eig3[l] = symmetric_eigenvalues(lyapunov_boundary_matrix(spec, lspec, J, t)).back();
  });
  for (int l = 0; l < opts.boundary_nt; ++l) {
    if (eig3[l] > c3.value) {
      c3.value = eig3[l];
      c3.t = spec.period * l / opts.boundary_nt;
    }
  }
  c3.margin = -c3.value;

  if (lspec.margins) {
    const auto& b = *lspec.margins;
    lo.required = b[0];
    hi.required = b[1];
    c2.required = b[2];
    c3.required = b[3];
    lo.pass = b[0] > 0.0 && lo.value >= b[0];
    hi.pass = hi.value <= b[1];
    c2.pass = c2.value < -b[2];
    c3.pass = c3.value < -b[3];
  } else {
    lo.pass = lo.value > 0.0;
    hi.pass = std::isfinite(hi.value);
    c2.pass = c2.value < 0.0;
    c3.pass = c3.value < 0.0;
  }
  rep.lyapunov_pass = lo.pass && hi.pass && c2.pass && c3.pass;
  rep.note =
      "Conditions (i)-(iii) are strict inequalities and persist under small perturbations of a and b; "
      "the admissible perturbation radius is not quantified (see the perturb command).";
  return rep;
}

DissipativityResult dissipativity_check(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                                        const CertifyOptions& opts) {
  DissipativityResult d;
  d.pass = true;
  for (int i = 0; i < 3; ++i) {
    d.norms[i] = g_norm(spec, bspec, i, opts.gnorm_points, opts.trace);
    d.pass = d.pass && d.norms[i].value < 1.0;
  }
  return d;
}

CertificationReport certify(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                            const LyapunovSpec& lspec, const CertifyOptions& opts) {
  ValidationOptions vopts;
  vopts.nx = opts.nx;
  vopts.nt = opts.nt;
  vopts.a0 = opts.a0;
  ValidationReport validation = validate(spec, vopts);
  ValidationReport bvalid = validate(bspec, spec.period, vopts);
  validation.checks.insert(validation.checks.end(), bvalid.checks.begin(), bvalid.checks.end());
  if (!validation.pass()) {
    CertificationReport rep;
    rep.validation = validation;
    rep.auto_margins = !lspec.margins.has_value();
    rep.note = "system failed validation; stability conditions not evaluated";
    return rep;
  }
  CertificationReport rep = lyapunov_check(spec, bspec, lspec, opts);
  rep.validation = std::move(validation);
  rep.dissipativity = dissipativity_check(spec, bspec, opts);
  rep.pass = rep.validation.pass() && rep.lyapunov_pass && rep.dissipativity.pass;
  return rep;
}

}  // namespace perihyp
