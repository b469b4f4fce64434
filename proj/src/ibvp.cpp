#include "perihyp/ibvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "perihyp/parallel.hpp"
#include "perihyp/quadrature.hpp"

namespace perihyp {

namespace {

bool is_zero_field(const ScalarField& f) { return f.is_constant() && f.value(0.0, 0.0) == 0.0; }

int outflow_node(int j, int m, int nx) { return j < m ? nx : 0; }
int inflow_node(int j, int m, int nx) { return j < m ? 0 : nx; }

}  // namespace

Marcher::Marcher(const LinearSystemSpec& spec, const BoundarySpec& bspec, const Discretization& disc)
    : spec_(spec),
      bspec_(bspec),
      disc_(disc),
      trace_(TraceOptions::from(disc)),
      dt_(spec.period / disc.nt),
      substeps_(disc.substeps + disc.substeps % 2) {
  if (bspec.n != spec.n) throw std::invalid_argument("boundary spec size does not match system");
  couplings_.resize(spec.n);
  for (int j = 0; j < spec.n; ++j)
    for (int k = 0; k < spec.n; ++k)
      if (k != j && !is_zero_field(spec.coupling(j, k))) couplings_[j].push_back(k);
}

double Marcher::source(const Snapshot& u, int j, double x, double t) const {
  double g = spec_.forcing(j).value(x, t);
  for (int k : couplings_[j]) g -= spec_.coupling(j, k).value(x, t) * u.interpolate(k, x, disc_.rule);
  return g;
}

double Marcher::interior_update(const Snapshot& u, int j, int i, double t_now, bool& crossed) const {
  const ScalarField& a = spec_.speed(j);
  const ScalarField& bjj = spec_.coupling(j, j);
  const int N = substeps_;
  const double h = dt_ / N;
  const double t_new = t_now + dt_;
  std::vector<double> X(N + 1), tau(N + 1);
  X[0] = static_cast<double>(i) / disc_.nx;
  tau[0] = t_new;
  auto speed = [&](double x, double t) { return a.value(std::clamp(x, 0.0, 1.0), t); };
  for (int s = 0; s < N; ++s) {
    const double x0 = X[s], t0 = tau[s];
    const double k1 = speed(x0, t0);
    const double k2 = speed(x0 - 0.5 * h * k1, t0 - 0.5 * h);
    const double k3 = speed(x0 - 0.5 * h * k2, t0 - 0.5 * h);
    const double k4 = speed(x0 - h * k3, t0 - h);
    X[s + 1] = x0 - h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    tau[s + 1] = (s + 1 == N) ? t_now : t_new - (s + 1) * h;
    if (X[s + 1] < -1e-14 || X[s + 1] > 1.0 + 1e-14) {
      crossed = true;
      return 0.0;
    }
    X[s + 1] = std::clamp(X[s + 1], 0.0, 1.0);
  }
  crossed = false;
  // Weight exp(-int_tau^{t_new} b_jj) at every sample (the lattice runs backward in time).
  std::vector<double> weight(N + 1, 1.0);
  if (!is_zero_field(bjj)) {
    std::vector<double> b(N + 1), running(N + 1);
    for (int s = 0; s <= N; ++s) b[s] = bjj.value(X[s], tau[s]);
    cumulative_simpson(b, -h, running);
    for (int s = 0; s <= N; ++s) weight[s] = std::exp(running[s]);
  }
  std::vector<double> g(N + 1);
  for (int s = 0; s <= N; ++s) g[s] = weight[s] * source(u, j, X[s], tau[s]);
  return weight[N] * u.interpolate(j, X[N], disc_.rule) + simpson(g, h);
}

double Marcher::boundary_value(const Snapshot& u, const Snapshot& fresh, const Snapshot* mixed, int j,
                               double tau, double t_now) const {
  const int nx = disc_.nx;
  const int m = spec_.m;
  const double w = std::clamp((tau - t_now) / dt_, 0.0, 1.0);
  double value = bspec_.h[j]->value(0.0, tau);
  for (int k = 0; k < spec_.n; ++k) {
    const double r = bspec_.reflection(j, k);
    if (r == 0.0) continue;
    const int io = outflow_node(k, m, nx);
    value += r * ((1.0 - w) * u.at(io, k) + w * fresh.at(io, k));
  }
  if (mixed && j < static_cast<int>(bspec_.nonlocal.size()) && bspec_.nonlocal[j]) {
    const auto& nl = *bspec_.nonlocal[j];
    value += nl.H_value(tau, nl.apply_Q(tau, *mixed));
  }
  return value;
}

double Marcher::crossing_update(const Snapshot& u, const Snapshot& fresh, const Snapshot* mixed, int j,
                                double x, double t_now) const {
  const double xj = entry_abscissa(j, spec_.m);
  CharacteristicTrace tr = trace(spec_, j, x, t_now + dt_, xj, trace_);
  fill_weights(spec_, tr, 0);
  const double tau_b = std::max(tr.end_omega(), t_now);
  double value = tr.c[0].back() * boundary_value(u, fresh, mixed, j, tau_b, t_now);
  if (tr.size() > 1) {
    std::vector<double> g(tr.size());
    for (std::size_t s = 0; s < tr.size(); ++s) g[s] = tr.d[s] * source(u, j, tr.xi[s], tr.omega[s]);
    // int_{x_j}^{x} d g d xi; the lattice runs from x to x_j.
    value -= simpson(g, tr.step());
  }
  return value;
}

Snapshot Marcher::step(const Snapshot& u, double t_now) const {
  const int n = spec_.n;
  const int m = spec_.m;
  const int nx = disc_.nx;
  if (u.components() != n || u.nx() != nx) throw std::invalid_argument("snapshot shape does not match discretization");
  Snapshot fresh(n, nx);
  // Outflow values depend on interior data only.
  for (int j = 0; j < n; ++j) {
    bool crossed = false;
    const int io = outflow_node(j, m, nx);
    fresh.at(io, j) = interior_update(u, j, io, t_now, crossed);
    if (crossed) {
      throw std::runtime_error("time step " + std::to_string(dt_) + " exceeds the crossing time of characteristic " +
                               std::to_string(j + 1) + "; increase nt");
    }
  }
  std::unique_ptr<Snapshot> mixed;
  if (bspec_.has_nonlocal()) {
    mixed = std::make_unique<Snapshot>(u);
    for (int k = 0; k < n; ++k) {
      const int io = outflow_node(k, m, nx);
      mixed->at(io, k) = fresh.at(io, k);
    }
  }
  const double t_new = t_now + dt_;
  parallel_for(0, nx + 1, [&](int i) {
    for (int j = 0; j < n; ++j) {
      if (i == outflow_node(j, m, nx)) continue;
      if (i == inflow_node(j, m, nx)) {
        fresh.at(i, j) = boundary_value(u, fresh, mixed.get(), j, t_new, t_now);
        continue;
      }
      bool crossed = false;
      double v = interior_update(u, j, i, t_now, crossed);
      if (crossed) v = crossing_update(u, fresh, mixed.get(), j, static_cast<double>(i) / nx, t_now);
      fresh.at(i, j) = v;
    }
  });
  return fresh;
}

TrajectoryRecord simulate(const LinearSystemSpec& spec, const BoundarySpec& bspec, const Discretization& disc,
                          const Snapshot& phi, double s, double t_end, const SimulateOptions& opts) {
  if (!(t_end > s)) throw std::invalid_argument("t_end must exceed the start time");
  Marcher marcher(spec, bspec, disc);
  const double dt = marcher.dt();
  const int steps = static_cast<int>(std::ceil((t_end - s) / dt - 1e-9));
  TrajectoryRecord rec;
  rec.start = s;
  rec.dt = dt;
  rec.times.reserve(steps + 1);
  Snapshot u = phi;
  auto record = [&](int k) {
    rec.times.push_back(s + k * dt);
    rec.l2.push_back(u.l2_norm());
    rec.sup.push_back(u.sup_norm());
    if (opts.keep_snapshots) rec.snapshots.push_back(u);
  };
  record(0);
  for (int k = 0; k < steps; ++k) {
    u = marcher.step(u, s + k * dt);
    record(k + 1);
  }
  return rec;
}

DecayEstimate fit_decay(const TrajectoryRecord& record, double period, int skip_periods) {
  DecayEstimate est;
  if (record.times.empty()) throw std::invalid_argument("empty trajectory");
  const double span = record.times.back() - record.start;
  if (span < (skip_periods + 3) * period - 1e-9 * period)
    throw std::invalid_argument("trajectory must span at least skip + 3 periods");
  const int per_period = static_cast<int>(std::lround(period / record.dt));
  for (std::size_t l = 1; static_cast<std::size_t>(l * per_period) < record.l2.size(); ++l) {
    const double prev = record.l2[(l - 1) * per_period];
    const double cur = record.l2[l * per_period];
    est.contraction.push_back(prev > 0.0 ? cur / prev : 0.0);
  }
  const double t_fit = record.start + skip_periods * period - 1e-9 * period;
  std::vector<double> ts, ys;
  for (std::size_t k = 0; k < record.times.size(); ++k) {
    if (record.times[k] < t_fit) continue;
    if (!(record.l2[k] > std::numeric_limits<double>::min())) {
      est.decayed_to_zero = true;
      est.alpha = std::numeric_limits<double>::infinity();
      return est;
    }
    ts.push_back(record.times[k]);
    ys.push_back(std::log(record.l2[k]));
  }
  const double count = static_cast<double>(ts.size());
  double tm = 0.0, ym = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    tm += ts[k];
    ym += ys[k];
  }
  tm /= count;
  ym /= count;
  double stt = 0.0, sty = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    stt += (ts[k] - tm) * (ts[k] - tm);
    sty += (ts[k] - tm) * (ys[k] - ym);
  }
  const double slope = sty / stt;
  const double intercept = ym - slope * tm;
  est.alpha = -slope;
  double max_res = 0.0, ss = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double r = ys[k] - (intercept + slope * ts[k]);
    max_res = std::max(max_res, r);
    ss += r * r;
  }
  est.M = std::exp(max_res);
  est.fit_residual = std::sqrt(ss / count);
  const double phi = record.l2.front();
  if (phi > 0.0) {
    double worst = 0.0;
    for (std::size_t k = 0; k < record.times.size(); ++k) {
      if (record.l2[k] <= 0.0) continue;
      worst = std::max(worst, std::log(record.l2[k] / phi) + est.alpha * (record.times[k] - record.start));
    }
    est.envelope = std::exp(worst);
  }
  return est;
}

}  // namespace perihyp
