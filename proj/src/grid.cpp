#include "perihyp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace perihyp {

CellPosition locate(double position, int cells) {
  double p = position * cells;
  double r = std::nearbyint(p);
  if (std::abs(p - r) < 1e-12) p = r;
  int cell = static_cast<int>(std::floor(p));
  cell = std::clamp(cell, 0, cells - 1);
  return {cell, p - cell};
}

CellPosition locate_periodic(double t, double period, int nt) {
  double tau = std::fmod(t, period);
  if (tau < 0.0) tau += period;
  double p = tau / period * nt;
  double r = std::nearbyint(p);
  if (std::abs(p - r) < 1e-9) p = r;
  int l = static_cast<int>(std::floor(p));
  double w = p - l;
  if (l >= nt) l -= nt;
  return {l, w};
}

namespace {

void check_x(double& x) {
  if (x < -1e-12 || x > 1.0 + 1e-12 || std::isnan(x))
    throw std::out_of_range("x = " + std::to_string(x) + " outside [0,1]");
  x = std::clamp(x, 0.0, 1.0);
}

// Fritsch-Carlson slope at node i for equally spaced data.
double pchip_slope(std::span<const double> v, int stride, int nx, int i) {
  auto at = [&](int k) { return v[static_cast<std::size_t>(k) * stride]; };
  if (nx == 1) return at(1) - at(0);
  if (i == 0 || i == nx) {
    // Three-point one-sided estimate, limited to preserve monotonicity.
    int s = i == 0 ? 1 : -1;
    double d0 = s * (at(i + s) - at(i));
    double d1 = s * (at(i + 2 * s) - at(i + s));
    double d = (3.0 * d0 - d1) / 2.0;
    if (d * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3.0 * d0)) return 3.0 * d0;
    return d;
  }
  double dl = at(i) - at(i - 1);
  double dr = at(i + 1) - at(i);
  if (dl * dr <= 0.0) return 0.0;
  return 2.0 / (1.0 / dl + 1.0 / dr);
}

}  // namespace

double interpolate_profile(std::span<const double> values, int stride, int nx, double x,
                           InterpolationRule rule) {
  check_x(x);
  auto [i, w] = locate(x, nx);
  double v0 = values[static_cast<std::size_t>(i) * stride];
  if (w == 0.0) return v0;
  double v1 = values[static_cast<std::size_t>(i + 1) * stride];
  if (rule == InterpolationRule::Linear) return (1.0 - w) * v0 + w * v1;
  // Slopes are per cell (unit spacing in index space).
  double m0 = pchip_slope(values, stride, nx, i);
  double m1 = pchip_slope(values, stride, nx, i + 1);
  double w2 = w * w;
  double w3 = w2 * w;
  return (2 * w3 - 3 * w2 + 1) * v0 + (w3 - 2 * w2 + w) * m0 + (-2 * w3 + 3 * w2) * v1 +
         (w3 - w2) * m1;
}

// ---------------------------------------------------------------------------

double Snapshot::interpolate(int j, double x, InterpolationRule rule) const {
  return interpolate_profile(std::span<const double>(data_).subspan(j), n_, nx_, x, rule);
}

double Snapshot::sup_norm() const {
  double s = 0.0;
  for (double v : data_) s = std::max(s, std::abs(v));
  return s;
}

double Snapshot::l2_norm() const {
  double acc = 0.0;
  for (int i = 0; i <= nx_; ++i) {
    double sq = 0.0;
    for (int j = 0; j < n_; ++j) sq += at(i, j) * at(i, j);
    acc += (i == 0 || i == nx_) ? 0.5 * sq : sq;
  }
  return std::sqrt(acc / nx_);
}

double sup_distance(const Snapshot& a, const Snapshot& b) {
  if (a.data().size() != b.data().size()) throw std::invalid_argument("snapshot size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    s = std::max(s, std::abs(a.data()[k] - b.data()[k]));
  return s;
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(Grid grid, int n, InterpolationRule rule)
    : grid_(grid),
      n_(n),
      rule_(rule),
      data_(static_cast<std::size_t>(grid.nt) * grid.x_nodes() * n, 0.0) {
  if (grid.nx < 1 || grid.nt < 1 || n < 1) throw std::invalid_argument("empty grid function");
}

double GridFunction::interpolate(int j, double x, double t) const {
  auto [l, w] = locate_periodic(t, grid_.period, grid_.nt);
  const int stride = n_;
  auto profile = [&](int ll) {
    std::span<const double> base(data_.data() + index(grid_.wrap(ll), 0, j),
                                 static_cast<std::size_t>(grid_.x_nodes()) * n_ - j);
    return interpolate_profile(base, stride, grid_.nx, x, rule_);
  };
  double v0 = profile(l);
  if (w == 0.0) return v0;
  return (1.0 - w) * v0 + w * profile(l + 1);
}

std::vector<double> GridFunction::interpolate(double x, double t) const {
  std::vector<double> out(n_);
  for (int j = 0; j < n_; ++j) out[j] = interpolate(j, x, t);
  return out;
}

Snapshot GridFunction::snapshot(int l) const {
  Snapshot s(n_, grid_.nx);
  for (int i = 0; i <= grid_.nx; ++i)
    for (int j = 0; j < n_; ++j) s.at(i, j) = at(l, i, j);
  return s;
}

void GridFunction::set_snapshot(int l, const Snapshot& s) {
  if (s.components() != n_ || s.nx() != grid_.nx) throw std::invalid_argument("snapshot shape");
  for (int i = 0; i <= grid_.nx; ++i)
    for (int j = 0; j < n_; ++j) at(l, i, j) = s.at(i, j);
}

double GridFunction::sup_norm() const {
  double s = 0.0;
  for (double v : data_) s = std::max(s, std::abs(v));
  return s;
}

double sup_distance(const GridFunction& a, const GridFunction& b) {
  const Grid& ga = a.grid();
  const Grid& gb = b.grid();
  if (ga.nx != gb.nx || ga.nt != gb.nt || a.components() != b.components())
    throw std::invalid_argument("grid function shape mismatch");
  double s = 0.0;
  for (int l = 0; l < ga.nt; ++l)
    for (int i = 0; i <= ga.nx; ++i)
      for (int j = 0; j < a.components(); ++j)
        s = std::max(s, std::abs(a.at(l, i, j) - b.at(l, i, j)));
  return s;
}

GridFunction sample_field(std::span<const Field> fields, const Grid& grid, InterpolationRule rule) {
  GridFunction g(grid, static_cast<int>(fields.size()), rule);
  for (int l = 0; l < grid.nt; ++l)
    for (int i = 0; i <= grid.nx; ++i)
      for (std::size_t j = 0; j < fields.size(); ++j)
        g.at(l, i, static_cast<int>(j)) = fields[j]->value(grid.x(i), grid.t(l));
  return g;
}

// ---------------------------------------------------------------------------

double TimeSeries::interpolate(int j, double t) const {
  auto [l, w] = locate_periodic(t, period_, nt_);
  double v0 = at(l, j);
  if (w == 0.0) return v0;
  return (1.0 - w) * v0 + w * at(l + 1, j);
}

double TimeSeries::sup_norm() const {
  double s = 0.0;
  for (double v : data_) s = std::max(s, std::abs(v));
  return s;
}

double sup_distance(const TimeSeries& a, const TimeSeries& b) {
  if (a.components() != b.components() || a.nodes() != b.nodes())
    throw std::invalid_argument("time series shape mismatch");
  double s = 0.0;
  for (int l = 0; l < a.nodes(); ++l)
    for (int j = 0; j < a.components(); ++j) s = std::max(s, std::abs(a.at(l, j) - b.at(l, j)));
  return s;
}

TimeSeriesField::TimeSeriesField(std::shared_ptr<const TimeSeries> series, int component)
    : series_(std::move(series)), component_(component) {
  set_fd_step_t(1e-6 * series_->period());
}

double TimeSeriesField::value(double, double t) const { return series_->interpolate(component_, t); }

}  // namespace perihyp
