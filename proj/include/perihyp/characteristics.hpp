#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "perihyp/model.hpp"

namespace perihyp {

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceOptions {
  int nx = 128;      // reference cell count; step = 1 / (nx * substeps)
  int substeps = 4;  // RK4 steps per cell
  double a0 = 1e-3;  // |a_j| below a0/2 aborts the trace

  static TraceOptions from(const Discretization& d) { return {d.nx, d.substeps, d.a0}; }
};

/// Samples of omega_j(xi; x, t) on a uniform xi lattice from x to an end point.
///
/// c[i] holds c_j^i(xi_k, x, t) once fill_weights(i) ran; d holds d_j^0.
struct CharacteristicTrace {
  int component = 0;
  double x = 0.0;
  double t = 0.0;
  std::vector<double> xi;
  std::vector<double> omega;
  std::vector<double> speed;  // a_j(xi_k, omega_k)
  std::array<std::vector<double>, 3> c;
  std::vector<double> d;

  std::size_t size() const { return xi.size(); }
  /// Signed lattice step (0 for the degenerate single-sample trace).
  double step() const { return xi.size() > 1 ? xi[1] - xi[0] : 0.0; }
  double end_xi() const { return xi.back(); }
  double end_omega() const { return omega.back(); }
};

/// Inflow end of component j (0-based): 0 if j < m, else 1.
inline double entry_abscissa(int j, int m) { return j < m ? 0.0 : 1.0; }

/// Integrates d omega / d xi = 1 / a_j(xi, omega), omega(x) = t, by RK4 from
/// x to xi_end. The step count is ceil(|xi_end - x| nx substeps), rounded up
/// to an even number >= 2; xi_end == x yields the single anchor sample.
CharacteristicTrace trace(const LinearSystemSpec& spec, int j, double x, double t, double xi_end,
                          const TraceOptions& opts = {});

/// omega_j at each target abscissa.
std::vector<double> trace_targets(const LinearSystemSpec& spec, int j, double x, double t,
                                  const std::vector<double>& targets, const TraceOptions& opts = {});

/// c_j^i = exp int_x^xi [b_jj / a_j - i d_t a_j / a_j^2](eta, omega(eta)) d eta on
/// the trace lattice (cumulative Simpson). i = 0 also fills d = c / a.
void fill_weights(const LinearSystemSpec& spec, CharacteristicTrace& trace, int i);

/// omega_j(x_j, x, t): the time at which the characteristic through (x, t) left the inflow end.
double exit_time(const LinearSystemSpec& spec, int j, double x, double t, const TraceOptions& opts = {});

}  // namespace perihyp
