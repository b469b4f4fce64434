#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "perihyp/expr.hpp"
#include "perihyp/model.hpp"
#include "perihyp/periodic.hpp"

namespace perihyp::testing {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline std::vector<Expression> parse_all(const std::vector<std::string>& texts) {
  std::vector<Expression> out;
  for (const auto& s : texts) out.push_back(parse_expression(s));
  return out;
}

// Two-component system with the coefficients of the bundled example.
inline LinearProblem example1(const std::vector<std::string>& f = {"0", "0"}) {
  LinearProblem p;
  p.n = 2;
  p.m = 1;
  p.period = kTwoPi;
  p.a = parse_all({"2 - x", "-(2 + sin(t))"});
  p.b = parse_all({"0", "2*sin(t)", "-sin(t)", "2"});
  p.f = parse_all(f);
  const double e3 = std::exp(-3.0);
  p.r = {e3, e3 / 2.0, e3, e3};
  p.h = parse_all({"0", "0"});
  return p;
}

// Decoupled constant-speed system a = (s1, s2) with constant diagonal damping.
inline LinearProblem constant_speed(double s1, double s2, double b11 = 0.0, double b22 = 0.0,
                                    std::vector<double> r = {0, 0, 0, 0}, double period = kTwoPi) {
  LinearProblem p;
  p.n = 2;
  p.m = 1;
  p.period = period;
  p.a = {Expression::constant(s1), Expression::constant(s2)};
  p.b = {Expression::constant(b11), Expression::constant(0.0), Expression::constant(0.0),
         Expression::constant(b22)};
  p.f = {Expression::constant(0.0), Expression::constant(0.0)};
  p.r = std::move(r);
  p.h = {Expression::constant(0.0), Expression::constant(0.0)};
  return p;
}

// a = (1, -1), b = 0, r = 0, h1 = sin t: periodic solution u1 = sin(t - x), u2 = 0.
inline LinearProblem transport() {
  LinearProblem p = constant_speed(1.0, -1.0);
  p.h[0] = parse_expression("sin(t)");
  return p;
}

inline Discretization grid(int nx, int nt) {
  Discretization d;
  d.nx = nx;
  d.nt = nt;
  return d;
}

}  // namespace perihyp::testing
