#pragma once

#include <memory>
#include <vector>

#include "perihyp/characteristics.hpp"
#include "perihyp/grid.hpp"
#include "perihyp/model.hpp"

namespace perihyp {

/// Semi-Lagrangian time stepper for the initial-boundary value problem.
///
/// Each node backtraces its characteristic over one step. Interior feet take
/// the weighted interpolated old value plus the integrated source; feet that
/// reach the inflow end take the boundary value at the crossing time. Outflow
/// nodes are updated first so that the reflection terms are explicit.
class Marcher {
 public:
  Marcher(const LinearSystemSpec& spec, const BoundarySpec& bspec, const Discretization& disc);

  /// Advances u from t_now to t_now + dt().
  Snapshot step(const Snapshot& u, double t_now) const;

  double dt() const { return dt_; }
  const Discretization& discretization() const { return disc_; }

 private:
  double interior_update(const Snapshot& u, int j, int i, double t_now, bool& crossed) const;
  double crossing_update(const Snapshot& u, const Snapshot& fresh, const Snapshot* mixed, int j,
                         double x, double t_now) const;
  double boundary_value(const Snapshot& u, const Snapshot& fresh, const Snapshot* mixed, int j,
                        double tau, double t_now) const;
  double source(const Snapshot& u, int j, double x, double t) const;

  const LinearSystemSpec& spec_;
  const BoundarySpec& bspec_;
  Discretization disc_;
  TraceOptions trace_;
  double dt_;
  int substeps_;
  std::vector<std::vector<int>> couplings_;  // nonzero off-diagonal k per row
};

struct TrajectoryRecord {
  double start = 0.0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> l2;
  std::vector<double> sup;
  std::vector<Snapshot> snapshots;  // empty unless requested
};

struct SimulateOptions {
  bool keep_snapshots = false;
};

/// Marches from (s, phi) to t_end on the uniform step T/nt, recording norms at every node.
TrajectoryRecord simulate(const LinearSystemSpec& spec, const BoundarySpec& bspec,
                          const Discretization& disc, const Snapshot& phi, double s, double t_end,
                          const SimulateOptions& opts = {});

struct DecayEstimate {
  double M = 1.0;      // exp of the largest residual above the fitted line, >= 1
  double alpha = 0.0;  // fitted decay rate; +inf when the norms reached zero
  double envelope = 1.0;  // smallest K with ||u(t)|| <= K e^{-alpha (t-s)} ||phi|| on the record
  std::vector<double> contraction;  // rho_l = ||u(s+lT)|| / ||u(s+(l-1)T)||
  double fit_residual = 0.0;        // RMS residual of the log-linear fit
  bool decayed_to_zero = false;
};

/// Least-squares fit of log ||u(.,t)||_L2 against t after `skip_periods` periods.
DecayEstimate fit_decay(const TrajectoryRecord& record, double period, int skip_periods);

}  // namespace perihyp
