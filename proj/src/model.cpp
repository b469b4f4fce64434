#include "perihyp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace perihyp {

double NonlocalBoundary::apply_Q(double t, const Snapshot& u) const {
  double q = 0.0;
  for (const auto& p : points) q += p.weight->value(0.0, t) * u.interpolate(p.component, p.location);
  const int nx = u.nx();
  for (const auto& k : kernels) {
    double acc = 0.0;
    for (int i = 0; i <= nx; ++i) {
      double x = static_cast<double>(i) / nx;
      double w = (i == 0 || i == nx) ? 0.5 : 1.0;
      acc += w * k.kernel->value(x, t) * u.at(i, k.component);
    }
    q += acc / nx;
  }
  return q;
}

double NonlocalBoundary::H_value(double t, double q) const {
  Bindings b;
  b.set(slot::t, t).set(slot::q, q);
  return H.evaluate(b);
}

bool BoundarySpec::has_nonlocal() const {
  return std::any_of(nonlocal.begin(), nonlocal.end(), [](const auto& v) { return v.has_value(); });
}

BoundarySpec BoundarySpec::zero(int n) {
  BoundarySpec b;
  b.n = n;
  b.r.assign(static_cast<std::size_t>(n) * n, 0.0);
  b.h.assign(n, make_field(0.0));
  b.nonlocal.assign(n, std::nullopt);
  return b;
}

bool ValidationReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.pass; });
}

std::string ValidationReport::failures() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    if (c.pass) continue;
    os << c.name << ": " << c.detail << " (attained " << c.margin << " at x=" << c.x
       << ", t=" << c.t << ")\n";
  }
  return os.str();
}

void require(const ValidationReport& report, const std::string& what) {
  if (!report.pass()) throw std::invalid_argument(what + " failed validation:\n" + report.failures());
}

namespace {

// Running minimum with its location.
struct Worst {
  double value = std::numeric_limits<double>::infinity();
  double x = 0.0;
  double t = 0.0;
  void offer(double v, double xx, double tt) {
    if (v < value) {
      value = v;
      x = xx;
      t = tt;
    }
  }
};

// Sign and separation checks for speeds given as a callback speed(j, x, t).
template <typename Speed>
void speed_checks(int n, int m, double period, const ValidationOptions& opts, Speed&& speed,
                  const std::string& suffix, ValidationReport& report) {
  Worst pos, neg, sep;
  int pos_j = -1, neg_j = -1, sep_j = -1, sep_k = -1;
  std::vector<double> a(n);
  for (int l = 0; l < opts.nt; ++l) {
    double t = period * l / opts.nt;
    for (int i = 0; i <= opts.nx; ++i) {
      double x = static_cast<double>(i) / opts.nx;
      for (int j = 0; j < n; ++j) {
        a[j] = speed(j, x, t);
        if (!std::isfinite(a[j])) throw DomainError("non-finite speed a" + std::to_string(j + 1));
      }
      for (int j = 0; j < n; ++j) {
        if (j < m) {
          double before = pos.value;
          pos.offer(a[j], x, t);
          if (pos.value != before) pos_j = j;
        } else {
          double before = neg.value;
          neg.offer(-a[j], x, t);
          if (neg.value != before) neg_j = j;
        }
        for (int k = j + 1; k < n; ++k) {
          double before = sep.value;
          sep.offer(std::abs(a[j] - a[k]), x, t);
          if (sep.value != before) {
            sep_j = j;
            sep_k = k;
          }
        }
      }
    }
  }
  auto add = [&](const std::string& name, const Worst& w, const std::string& detail) {
    ConditionCheck c;
    c.name = name + suffix;
    c.margin = w.value;
    c.x = w.x;
    c.t = w.t;
    c.pass = w.value >= opts.a0;
    c.detail = detail;
    report.checks.push_back(c);
  };
  if (m > 0) {
    add("positive_speeds", pos,
        "a" + std::to_string(pos_j + 1) + " must be >= a0 = " + std::to_string(opts.a0));
  }
  if (m < n) {
    add("negative_speeds", neg,
        "a" + std::to_string(neg_j + 1) + " must be negative, <= -a0 = " + std::to_string(-opts.a0));
  }
  if (n > 1) {
    add("speed_separation", sep,
        "|a" + std::to_string(sep_j + 1) + " - a" + std::to_string(sep_k + 1) +
            "| must be >= a0 = " + std::to_string(opts.a0));
  }
}

void periodicity_check(const std::vector<std::pair<std::string, const ScalarField*>>& fields,
                       double period, const ValidationOptions& opts, ValidationReport& report) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ux(0.0, 1.0), ut(0.0, period);
  ConditionCheck c;
  c.name = "periodicity";
  c.margin = 0.0;
  for (int s = 0; s < opts.periodicity_samples; ++s) {
    double x = ux(rng), t = ut(rng);
    for (const auto& [name, field] : fields) {
      double d = std::abs(field->value(x, t + period) - field->value(x, t));
      if (d > c.margin) {
        c.margin = d;
        c.x = x;
        c.t = t;
        c.detail = name + " is not T-periodic";
      }
    }
  }
  c.pass = c.margin <= opts.periodicity_tol;
  report.checks.push_back(c);
}

void check_shape(int n, int m, double period) {
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  if (m < 0 || m > n) throw std::invalid_argument("m must lie in [0, n]");
  if (!(period > 0.0) || !std::isfinite(period)) throw std::invalid_argument("period must be > 0");
}

}  // namespace

ValidationReport validate(const LinearSystemSpec& spec, const ValidationOptions& opts) {
  check_shape(spec.n, spec.m, spec.period);
  if (opts.nx < 8 || opts.nt < 8) throw std::invalid_argument("validation grid must be >= 8");
  if (static_cast<int>(spec.a.size()) != spec.n ||
      static_cast<int>(spec.b.size()) != spec.n * spec.n ||
      static_cast<int>(spec.f.size()) != spec.n)
    throw std::invalid_argument("coefficient arrays do not match n");
  ValidationReport report;
  speed_checks(
      spec.n, spec.m, spec.period, opts,
      [&](int j, double x, double t) { return spec.speed(j).value(x, t); }, "", report);
  std::vector<std::pair<std::string, const ScalarField*>> fields;
  for (int j = 0; j < spec.n; ++j) {
    fields.emplace_back("a" + std::to_string(j + 1), spec.a[j].get());
    fields.emplace_back("f" + std::to_string(j + 1), spec.f[j].get());
    for (int k = 0; k < spec.n; ++k)
      fields.emplace_back("b" + std::to_string(j + 1) + std::to_string(k + 1),
                          spec.b[static_cast<std::size_t>(j) * spec.n + k].get());
  }
  periodicity_check(fields, spec.period, opts, report);
  return report;
}

ValidationReport validate(const QuasilinearSystemSpec& spec, const ValidationOptions& opts) {
  check_shape(spec.n, spec.m, spec.period);
  if (opts.nx < 8 || opts.nt < 8) throw std::invalid_argument("validation grid must be >= 8");
  if (static_cast<int>(spec.A.size()) != spec.n || static_cast<int>(spec.F.size()) != spec.n)
    throw std::invalid_argument("coefficient arrays do not match n");
  if (!(spec.delta0 > 0.0)) throw std::invalid_argument("delta0 must be > 0");
  std::vector<CompiledExpression> A;
  for (const auto& e : spec.A) A.emplace_back(e);
  // Sample v on the corners and centre of the cube ||v||_inf <= delta0
  // (all 3^n points of {-delta0, 0, delta0}^n when n is small).
  std::vector<std::vector<double>> states;
  const int n = spec.n;
  if (n <= 6) {
    int total = 1;
    for (int j = 0; j < n; ++j) total *= 3;
    for (int c = 0; c < total; ++c) {
      std::vector<double> v(n);
      int code = c;
      for (int j = 0; j < n; ++j) {
        v[j] = (code % 3 - 1) * spec.delta0;
        code /= 3;
      }
      states.push_back(v);
    }
  } else {
    states.emplace_back(n, 0.0);
    for (int j = 0; j < n; ++j)
      for (double s : {-1.0, 1.0}) {
        std::vector<double> v(n, 0.0);
        v[j] = s * spec.delta0;
        states.push_back(v);
      }
  }
  ValidationReport report;
  std::vector<double> slots(slot::u(n), 0.0);
  ValidationOptions coarse = opts;
  for (std::size_t s = 0; s < states.size(); ++s) {
    std::copy(states[s].begin(), states[s].end(), slots.begin() + slot::u_base);
    ValidationReport part;
    speed_checks(
        n, spec.m, spec.period, coarse,
        [&](int j, double x, double t) {
          slots[slot::x] = x;
          slots[slot::t] = t;
          return A[j](slots);
        },
        "", part);
    for (auto& c : part.checks) {
      auto it = std::find_if(report.checks.begin(), report.checks.end(),
                             [&](const ConditionCheck& o) { return o.name == c.name; });
      if (it == report.checks.end()) {
        report.checks.push_back(c);
      } else if (c.margin < it->margin) {
        *it = c;
      }
    }
  }
  // Periodicity of A and F at u = 0.
  std::vector<Field> at_zero;
  std::vector<std::pair<std::string, const ScalarField*>> fields;
  for (int j = 0; j < n; ++j) {
    Expression a0 = spec.A[j], f0 = spec.F[j];
    for (int k = 0; k < n; ++k) {
      a0 = a0.substitute(slot::u(k), Expression::constant(0.0));
      f0 = f0.substitute(slot::u(k), Expression::constant(0.0));
    }
    at_zero.push_back(make_field(a0));
    at_zero.push_back(make_field(f0));
    fields.emplace_back("A" + std::to_string(j + 1), at_zero[at_zero.size() - 2].get());
    fields.emplace_back("F" + std::to_string(j + 1), at_zero.back().get());
  }
  periodicity_check(fields, spec.period, opts, report);
  return report;
}

ValidationReport validate(const BoundarySpec& spec, double period, const ValidationOptions& opts) {
  ValidationReport report;
  ConditionCheck finite;
  finite.name = "reflection_finite";
  finite.pass = static_cast<int>(spec.r.size()) == spec.n * spec.n &&
                std::all_of(spec.r.begin(), spec.r.end(), [](double v) { return std::isfinite(v); });
  finite.detail = "reflection matrix must be n x n and finite";
  report.checks.push_back(finite);

  ConditionCheck bounded;
  bounded.name = "nonlocal_bounded";
  bounded.detail = "Q_j(t) applied to the constant one field must be finite";
  Snapshot ones(spec.n, opts.nx);
  for (double& v : ones.data()) v = 1.0;
  for (int j = 0; j < spec.n; ++j) {
    if (j >= static_cast<int>(spec.nonlocal.size()) || !spec.nonlocal[j]) continue;
    const auto& nl = *spec.nonlocal[j];
    for (const auto& p : nl.points) {
      if (p.component < 0 || p.component >= spec.n || p.location < 0.0 || p.location > 1.0)
        throw std::invalid_argument("nonlocal point sample out of range in row " +
                                    std::to_string(j + 1));
    }
    for (const auto& k : nl.kernels) {
      if (k.component < 0 || k.component >= spec.n)
        throw std::invalid_argument("nonlocal kernel component out of range in row " +
                                    std::to_string(j + 1));
    }
    for (int l = 0; l < opts.nt; ++l) {
      double t = period * l / opts.nt;
      double q = nl.apply_Q(t, ones);
      bounded.margin = std::max(bounded.margin, std::abs(q));
      if (!std::isfinite(q)) {
        bounded.pass = false;
        bounded.t = t;
      }
    }
  }
  report.checks.push_back(bounded);
  return report;
}

}  // namespace perihyp
