#pragma once

#include <span>
#include <vector>

#include "perihyp/field.hpp"

namespace perihyp {

/// Uniform tensor grid: nx cells (nx+1 nodes) on [0,1], nt periodic nodes on [0,T).
struct Grid {
  int nx = 128;
  int nt = 128;
  double period = 1.0;

  int x_nodes() const { return nx + 1; }
  double dx() const { return 1.0 / nx; }
  double dt() const { return period / nt; }
  double x(int i) const { return static_cast<double>(i) / nx; }
  double t(int l) const { return period * static_cast<double>(l) / nt; }
  int wrap(int l) const { return ((l % nt) + nt) % nt; }
};

enum class InterpolationRule { Linear, MonotoneCubic };

/// Locates x on a uniform grid of `cells` cells: returns the cell index and
/// the fractional offset in [0,1). Positions within 1e-12 cells of a node snap to it.
struct CellPosition {
  int cell;
  double offset;
};
CellPosition locate(double position, int cells);

/// Profile interpolation over nx+1 equally spaced nodes on [0,1].
/// `values` is strided: node i lives at values[i*stride].
double interpolate_profile(std::span<const double> values, int stride, int nx, double x,
                           InterpolationRule rule);

/// n-component profile on the x-grid at one instant.
class Snapshot {
 public:
  Snapshot() = default;
  Snapshot(int n, int nx) : n_(n), nx_(nx), data_(static_cast<std::size_t>(n) * (nx + 1), 0.0) {}

  int components() const { return n_; }
  int nx() const { return nx_; }

  double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  double at(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double interpolate(int j, double x, InterpolationRule rule = InterpolationRule::Linear) const;

  double sup_norm() const;
  /// L2 norm over [0,1] of the Euclidean component norm, by the trapezoid rule.
  double l2_norm() const;

 private:
  int n_ = 0;
  int nx_ = 0;
  std::vector<double> data_;
};

double sup_distance(const Snapshot& a, const Snapshot& b);

/// n-component field on a Grid; periodic in t by construction.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(Grid grid, int n, InterpolationRule rule = InterpolationRule::Linear);

  const Grid& grid() const { return grid_; }
  int components() const { return n_; }
  InterpolationRule rule() const { return rule_; }

  double& at(int l, int i, int j) { return data_[index(grid_.wrap(l), i, j)]; }
  double at(int l, int i, int j) const { return data_[index(grid_.wrap(l), i, j)]; }

  /// Piecewise interpolation, linear in t with periodic wrap. x must lie in [0,1].
  double interpolate(int j, double x, double t) const;
  std::vector<double> interpolate(double x, double t) const;

  Snapshot snapshot(int l) const;
  void set_snapshot(int l, const Snapshot& s);

  double sup_norm() const;

 private:
  std::size_t index(int l, int i, int j) const {
    return (static_cast<std::size_t>(l) * grid_.x_nodes() + i) * n_ + j;
  }

  Grid grid_;
  int n_ = 0;
  InterpolationRule rule_ = InterpolationRule::Linear;
  std::vector<double> data_;
};

double sup_distance(const GridFunction& a, const GridFunction& b);

/// Samples one field per component at every grid node.
GridFunction sample_field(std::span<const Field> fields, const Grid& grid,
                          InterpolationRule rule = InterpolationRule::Linear);

/// n-component periodic function of t on the nt-node grid of one period.
///
/// Used for boundary traces: component j holds u_j at the outflow end.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(int n, int nt, double period)
      : n_(n), nt_(nt), period_(period), data_(static_cast<std::size_t>(n) * nt, 0.0) {}

  int components() const { return n_; }
  int nodes() const { return nt_; }
  double period() const { return period_; }
  double time(int l) const { return period_ * static_cast<double>(l) / nt_; }

  double& at(int l, int j) { return data_[static_cast<std::size_t>(wrap(l)) * n_ + j]; }
  double at(int l, int j) const { return data_[static_cast<std::size_t>(wrap(l)) * n_ + j]; }

  double interpolate(int j, double t) const;
  double sup_norm() const;

 private:
  int wrap(int l) const { return ((l % nt_) + nt_) % nt_; }
  int n_ = 0;
  int nt_ = 0;
  double period_ = 1.0;
  std::vector<double> data_;
};

double sup_distance(const TimeSeries& a, const TimeSeries& b);

/// Periodic time position: node index and offset within the step.
CellPosition locate_periodic(double t, double period, int nt);

/// One scalar component of a TimeSeries exposed as a field (x ignored).
class TimeSeriesField final : public ScalarField {
 public:
  TimeSeriesField(std::shared_ptr<const TimeSeries> series, int component);
  double value(double x, double t) const override;
  double dx(double, double) const override { return 0.0; }

 private:
  std::shared_ptr<const TimeSeries> series_;
  int component_;
};

}  // namespace perihyp
