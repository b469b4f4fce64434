#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

namespace perihyp {

/// Composite Simpson over an even number of uniform intervals of signed width h.
inline double simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size() - 1;
  if (f.size() < 3 || n % 2 != 0) throw std::invalid_argument("simpson needs an even interval count");
  double acc = f[0] + f[n];
  for (std::size_t k = 1; k < n; ++k) acc += (k % 2 == 1 ? 4.0 : 2.0) * f[k];
  return acc * h / 3.0;
}

/// Running integrals I_k = int_0^{k h} f. Even nodes use Simpson pairs; odd
/// nodes use the matching three-point partial rule (5, 8, -1)/12.
inline void cumulative_simpson(std::span<const double> f, double h, std::span<double> out) {
  const std::size_t n = f.size() - 1;
  if (f.size() < 3 || n % 2 != 0 || out.size() != f.size())
    throw std::invalid_argument("cumulative_simpson needs an even interval count");
  out[0] = 0.0;
  for (std::size_t k = 0; k + 2 <= n; k += 2) {
    out[k + 1] = out[k] + h * (5.0 * f[k] + 8.0 * f[k + 1] - f[k + 2]) / 12.0;
    out[k + 2] = out[k] + h * (f[k] + 4.0 * f[k + 1] + f[k + 2]) / 3.0;
  }
}

/// Five-point Gauss-Legendre nodes and weights on [0,1].
inline constexpr std::array<double, 5> kGauss5Nodes = {
    0.04691007703066800, 0.23076534494715845, 0.5, 0.76923465505284155, 0.95308992296933200};
inline constexpr std::array<double, 5> kGauss5Weights = {
    0.11846344252809454, 0.23931433524968324, 0.28444444444444444, 0.23931433524968324,
    0.11846344252809454};

}  // namespace perihyp
