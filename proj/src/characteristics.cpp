#include "perihyp/characteristics.hpp"

#include <cmath>
#include <string>

#include "perihyp/quadrature.hpp"

namespace perihyp {

namespace {

double checked_speed(const ScalarField& a, int j, double xi, double omega, double a0) {
  double v = a.value(xi, omega);
  if (!(std::abs(v) >= 0.5 * a0)) {
    throw TraceError("characteristic " + std::to_string(j + 1) + ": |a| = " + std::to_string(v) +
                     " < a0/2 at xi=" + std::to_string(xi) + ", omega=" + std::to_string(omega));
  }
  return v;
}

int step_count(double span, const TraceOptions& opts) {
  int steps = static_cast<int>(std::ceil(std::abs(span) * opts.nx * opts.substeps - 1e-9));
  steps = std::max(steps, 2);
  if (steps % 2 != 0) ++steps;
  return steps;
}

}  // namespace

CharacteristicTrace trace(const LinearSystemSpec& spec, int j, double x, double t, double xi_end,
                          const TraceOptions& opts) {
  if (j < 0 || j >= spec.n) throw std::out_of_range("component index out of range");
  if (x < 0.0 || x > 1.0 || xi_end < 0.0 || xi_end > 1.0)
    throw std::out_of_range("trace abscissae must lie in [0,1]");
  const ScalarField& a = spec.speed(j);
  CharacteristicTrace tr;
  tr.component = j;
  tr.x = x;
  tr.t = t;
  if (xi_end == x) {
    tr.xi = {x};
    tr.omega = {t};
    tr.speed = {checked_speed(a, j, x, t, opts.a0)};
    return tr;
  }
  const int steps = step_count(xi_end - x, opts);
  const double h = (xi_end - x) / steps;
  tr.xi.resize(steps + 1);
  tr.omega.resize(steps + 1);
  tr.speed.resize(steps + 1);
  double w = t;
  double s = checked_speed(a, j, x, w, opts.a0);
  tr.xi[0] = x;
  tr.omega[0] = t;
  tr.speed[0] = s;
  for (int k = 0; k < steps; ++k) {
    const double xi = x + k * h;
    const double k1 = 1.0 / s;
    const double k2 = 1.0 / checked_speed(a, j, xi + 0.5 * h, w + 0.5 * h * k1, opts.a0);
    const double k3 = 1.0 / checked_speed(a, j, xi + 0.5 * h, w + 0.5 * h * k2, opts.a0);
    const double xi_next = (k + 1 == steps) ? xi_end : x + (k + 1) * h;
    const double k4 = 1.0 / checked_speed(a, j, xi_next, w + h * k3, opts.a0);
    w += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    s = checked_speed(a, j, xi_next, w, opts.a0);
    tr.xi[k + 1] = xi_next;
    tr.omega[k + 1] = w;
    tr.speed[k + 1] = s;
  }
  return tr;
}

std::vector<double> trace_targets(const LinearSystemSpec& spec, int j, double x, double t,
                                  const std::vector<double>& targets, const TraceOptions& opts) {
  std::vector<double> out;
  out.reserve(targets.size());
  for (double xi : targets) out.push_back(trace(spec, j, x, t, xi, opts).end_omega());
  return out;
}

void fill_weights(const LinearSystemSpec& spec, CharacteristicTrace& tr, int i) {
  if (i < 0 || i > 2) throw std::out_of_range("weight index must be 0, 1 or 2");
  const int j = tr.component;
  const std::size_t count = tr.size();
  auto& c = tr.c[i];
  c.assign(count, 1.0);
  if (count > 1) {
    const ScalarField& a = spec.speed(j);
    const ScalarField& bjj = spec.coupling(j, j);
    std::vector<double> integrand(count), running(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double ak = tr.speed[k];
      double g = bjj.is_constant() && bjj.value(0.0, 0.0) == 0.0
                     ? 0.0
                     : bjj.value(tr.xi[k], tr.omega[k]) / ak;
      if (i > 0 && !a.is_constant()) g -= i * a.dt(tr.xi[k], tr.omega[k]) / (ak * ak);
      integrand[k] = g;
    }
    cumulative_simpson(integrand, tr.step(), running);
    for (std::size_t k = 1; k < count; ++k) c[k] = std::exp(running[k]);
  }
  if (i == 0) {
    tr.d.resize(count);
    for (std::size_t k = 0; k < count; ++k) tr.d[k] = c[k] / tr.speed[k];
  }
}

double exit_time(const LinearSystemSpec& spec, int j, double x, double t, const TraceOptions& opts) {
  return trace(spec, j, x, t, entry_abscissa(j, spec.m), opts).end_omega();
}

}  // namespace perihyp
