#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "perihyp/periodic.hpp"

using namespace perihyp;
using namespace perihyp::testing;

namespace {

QuasilinearSystemSpec quasilinear(const std::vector<std::string>& A, const std::vector<std::string>& F) {
  QuasilinearSystemSpec q;
  q.n = 2;
  q.m = 1;
  q.period = kTwoPi;
  q.A = parse_all(A);
  q.F = parse_all(F);
  q.delta0 = 0.1;
  return q;
}

double max_abs(const Expression& e, int nx, int nt, double period) {
  double m = 0.0;
  for (int l = 0; l < nt; ++l)
    for (int i = 0; i <= nx; ++i)
      m = std::max(m, std::abs(evaluate(e, {{"x", static_cast<double>(i) / nx}, {"t", period * l / nt}})));
  return m;
}

}  // namespace

TEST(PeriodMap, HomogeneousZero) {
  LinearProblem p = example1();
  const LinearSystemSpec s = p.system();
  const BoundarySpec b = p.boundary();
  EXPECT_EQ(period_map(s, b, grid(32, 32), Snapshot(2, 32)).sup_norm(), 0.0);
}

TEST(PeriodMap, FlushForgetsInitialData) {
  LinearProblem p = constant_speed(1.0, -1.0);
  const LinearSystemSpec s = p.system();
  const BoundarySpec b = p.boundary();
  for (unsigned seed : {1u, 2u, 3u}) EXPECT_EQ(period_map(s, b, grid(32, 64), random_profile(2, 32, seed)).sup_norm(), 0.0);
}

TEST(PeriodMap, Affine) {
  LinearProblem p = example1({"0.01*sin(t)", "0.2*x"});
  p.h = parse_all({"cos(t)", "0.1"});
  const LinearSystemSpec s = p.system();
  const BoundarySpec b = p.boundary();
  const Discretization d = grid(48, 48);
  const Snapshot phi = random_profile(2, 48, 10), psi = random_profile(2, 48, 11);
  for (double alpha : {0.25, -1.5, 3.0}) {
    Snapshot mix(2, 48);
    for (std::size_t k = 0; k < mix.data().size(); ++k)
      mix.data()[k] = alpha * phi.data()[k] + (1 - alpha) * psi.data()[k];
    Snapshot lhs = period_map(s, b, d, mix);
    Snapshot a = period_map(s, b, d, phi), c = period_map(s, b, d, psi);
    double dist = 0.0;
    for (std::size_t k = 0; k < lhs.data().size(); ++k)
      dist = std::max(dist, std::abs(lhs.data()[k] - (alpha * a.data()[k] + (1 - alpha) * c.data()[k])));
    EXPECT_LE(dist, 1e-10);
  }
}

TEST(PeriodMap, MarchStoresEveryNode) {
  LinearProblem p = example1({"0.01*sin(t)", "0"});
  const LinearSystemSpec s = p.system();
  const BoundarySpec b = p.boundary();
  const Discretization d = grid(16, 32);
  const Snapshot phi = random_profile(2, 16, 4);
  Snapshot end;
  GridFunction u = march_period(s, b, d, phi, &end);
  EXPECT_EQ(sup_distance(u.snapshot(0), phi), 0.0);
  EXPECT_EQ(sup_distance(end, period_map(s, b, d, phi)), 0.0);
}

TEST(LinearSolve, Transport) {
  LinearProblem p = transport();
  const LinearSystemSpec s = p.system();
  const BoundarySpec b = p.boundary();
  SolveReport r = solve_linear_periodic(s, b, grid(64, 64));
  ASSERT_TRUE(r.converged) << r.message;
  const Grid& g = r.solution.grid();
  double err = 0.0;
  for (int l = 0; l < g.nt; ++l)
    for (int i = 0; i <= g.nx; ++i) {
      err = std::max(err, std::abs(r.solution.at(l, i, 0) - std::sin(g.t(l) - g.x(i))));
      err = std::max(err, std::abs(r.solution.at(l, i, 1)));
    }
  const double interp = (g.dx() * g.dx() + g.dt() * g.dt()) / 8.0;
  EXPECT_LE(err, 5.0 * std::max(interp, g.dt() / 2.0));
  EXPECT_EQ(r.g0_norm, 0.0);
  EXPECT_TRUE(std::isfinite(r.operator_residual));
}

TEST(LinearSolve, HomogeneousGivesZero) {
  LinearProblem p = example1();
  const LinearSystemSpec s = p.system();
  const BoundarySpec b = p.boundary();
  SolveReport r = solve_linear_periodic(s, b, grid(32, 32));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.solution.sup_norm(), 0.0);
}

TEST(LinearSolve, ForcedExampleResiduals) {
  LinearProblem p = example1({"0.01*sin(t)", "0"});
  const LinearSystemSpec s = p.system();
  const BoundarySpec b = p.boundary();
  SolveReport r = solve_linear_periodic(s, b, grid(64, 64));
  ASSERT_TRUE(r.converged);
  EXPECT_LT(r.g0_norm, 1.0);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_GT(r.solution.sup_norm(), 0.0);
  std::vector<Expression> ustar = parse_all({"0.1*sin(t)*sin(pi*x)", "0.1*cos(t)*x*(1 - x)"});
  MmsResult mms = mms_study(example1(), ustar, {{64, 64}}, grid(64, 64));
  EXPECT_LE(r.operator_residual, 10.0 * mms.levels[0].sup_error);
  EXPECT_LT(r.pde_residual, 1e-2);
  EXPECT_LT(r.boundary_residual, 1e-12);
}

TEST(LinearSolve, NonContractingReportsFailure) {
  LinearProblem p = constant_speed(1.0, -1.0, 0.0, 0.0, {0, 1.2, 1.2, 0});
  p.h[0] = parse_expression("1");
  const LinearSystemSpec s = p.system();
  const BoundarySpec b = p.boundary();
  SolverOptions o;
  o.maxit = 20;
  SolveReport r = solve_linear_periodic(s, b, grid(16, 32), o);
  EXPECT_FALSE(r.converged);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_FALSE(r.message.empty());
}

TEST(LinearSolve, AndersonAgreesWithPicard) {
  LinearProblem p = example1({"0.01*sin(t)", "0"});
  p.r = {0.4, 0.3, 0.3, 0.5};
  const LinearSystemSpec s = p.system();
  const BoundarySpec b = p.boundary();
  SolverOptions o;
  o.operator_residual = false;
  SolveReport plain = solve_linear_periodic(s, b, grid(32, 32), o);
  o.anderson = true;
  SolveReport acc = solve_linear_periodic(s, b, grid(32, 32), o);
  ASSERT_TRUE(plain.converged && acc.converged);
  EXPECT_LE(acc.iterations, plain.iterations);
  EXPECT_LE(sup_distance(plain.solution, acc.solution), 1e-7);
}

TEST(PeriodicProperty, FixedPointCertificateAndUniqueness) {
  LinearProblem p = example1({"0.01*sin(t)", "0.05*cos(t)*x"});
  p.h = parse_all({"0.1*sin(2*t)", "0"});
  const LinearSystemSpec s = p.system();
  const BoundarySpec b = p.boundary();
  SolverOptions o;
  o.operator_residual = false;
  SolveReport from_zero = solve_linear_periodic(s, b, grid(48, 48), o);
  ASSERT_TRUE(from_zero.converged);
  EXPECT_LT(from_zero.fixed_point_residual, 2.0 * o.tol);
  for (unsigned seed : {42u, 7u, 1234u}) {
    o.initial = random_profile(2, 48, seed);
    SolveReport from_random = solve_linear_periodic(s, b, grid(48, 48), o);
    ASSERT_TRUE(from_random.converged);
    EXPECT_LT(from_random.fixed_point_residual, 2.0 * o.tol);
    EXPECT_LE(sup_distance(from_zero.solution, from_random.solution), 4.0 * o.tol);
  }
}

TEST(PeriodicProperty, IncrementsDecreaseAfterTransient) {
  LinearProblem p = example1({"0.01*sin(t)", "0"});
  p.r = {0.3, 0.2, 0.2, 0.3};
  const LinearSystemSpec s = p.system();
  const BoundarySpec b = p.boundary();
  SolverOptions o;
  o.operator_residual = false;
  o.initial = random_profile(2, 32, 9);
  SolveReport r = solve_linear_periodic(s, b, grid(32, 32), o);
  ASSERT_TRUE(r.converged);
  for (std::size_t k = 2; k < r.increments.size(); ++k) EXPECT_LT(r.increments[k], r.increments[k - 1]);
}

TEST(Quasilinear, LinearRightHandSideIsStationary) {
  QuasilinearSystemSpec q = quasilinear({"2 - x", "-(2 + sin(t))"},
                                        {"-2*sin(t)*u2 + 0.01*sin(t)", "sin(t)*u1 - 2*u2"});
  LinearProblem p = example1({"0.01*sin(t)", "0"});
  const BoundarySpec b = p.boundary();
  SolveReport r = solve_quasilinear(q, b, grid(32, 32));
  ASSERT_TRUE(r.converged) << r.message;
  EXPECT_LE(r.iterations, 2);
  SolverOptions o;
  o.tol = 1e-10;
  SolveReport lin = solve_linear_periodic(p.system(), b, grid(32, 32), o);
  EXPECT_LE(sup_distance(r.solution, lin.solution), 1e-8);
}

TEST(Quasilinear, ZeroFixedPoint) {
  QuasilinearSystemSpec q = quasilinear({"2 - x + u1", "-(2 + sin(t)) + u2"}, {"-2*sin(t)*u2", "sin(t)*u1 - 2*u2 + u1*u2"});
  SolveReport r = solve_quasilinear(q, example1().boundary(), grid(32, 32));
  ASSERT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.solution.sup_norm(), 0.0);
}

TEST(Quasilinear, SmallForcingContracts) {
  QuasilinearSystemSpec q = quasilinear({"2 - x + u1", "-(2 + sin(t)) + u2"},
                                        {"-2*sin(t)*u2 + 0.001*sin(t)", "sin(t)*u1 - 2*u2 + u1^2"});
  SolveReport r = solve_quasilinear(q, example1().boundary(), grid(32, 32));
  ASSERT_TRUE(r.converged) << r.message;
  ASSERT_FALSE(r.outer_contraction.empty());
  for (double rho : r.outer_contraction) EXPECT_LT(rho, 1.0);
  EXPECT_LE(r.solution.sup_norm(), 1e-2);
  EXPECT_LT(r.pde_residual, 1e-2);
  QuasilinearOptions o;
  o.initial = r.solution;
  SolveReport again = solve_quasilinear(q, example1().boundary(), grid(32, 32), o);
  EXPECT_EQ(again.iterations, 1);
}

TEST(Quasilinear, RadiusError) {
  QuasilinearSystemSpec q = quasilinear({"2 - x + u1", "-(2 + sin(t)) + u2"},
                                        {"-2*sin(t)*u2 + 0.5*sin(t)", "sin(t)*u1 - 2*u2"});
  SolveReport r = solve_quasilinear(q, example1().boundary(), grid(32, 32));
  EXPECT_FALSE(r.converged);
  EXPECT_NE(r.message.find("radius"), std::string::npos);
}

TEST(Quasilinear, FreezeExtractsCoefficients) {
  QuasilinearSystemSpec q = quasilinear({"2 - x + u1", "-(2 + sin(t))"}, {"-u1^2 + sin(t)", "-3*u2"});
  const Grid g{8, 8, kTwoPi};
  GridFunction u(g, 2);
  for (int l = 0; l < 8; ++l)
    for (int i = 0; i <= 8; ++i) u.at(l, i, 0) = 0.05;
  FrozenProblem fz = freeze(q, example1().boundary(), u);
  EXPECT_NEAR(fz.spec.speed(0).value(0.5, g.t(2)), 1.55, 1e-14);
  // B = -int_0^1 d_u(-u^2)(sigma u) d sigma = u.
  EXPECT_NEAR(fz.spec.coupling(0, 0).value(0.5, g.t(2)), 0.05, 1e-14);
  EXPECT_NEAR(fz.spec.coupling(1, 1).value(0.3, 1.0), 3.0, 0.0);
  EXPECT_NEAR(fz.spec.forcing(0).value(0.3, 1.0), std::sin(1.0), 1e-15);
}

TEST(Manufactured, Examples) {
  std::vector<Expression> a = parse_all({"1", "-1"});
  std::vector<Expression> b = parse_all({"0", "0", "0", "0"});
  ManufacturedData z = manufactured_setup(2, 1, a, b, {0, 0, 0, 0}, parse_all({"0", "0"}));
  for (const auto& e : z.f) EXPECT_EQ(max_abs(e, 8, 8, kTwoPi), 0.0);
  for (const auto& e : z.h) EXPECT_EQ(max_abs(e, 8, 8, kTwoPi), 0.0);

  ManufacturedData t = manufactured_setup(2, 1, a, b, {0, 0, 0, 0}, parse_all({"sin(t - x)", "0"}));
  EXPECT_LE(max_abs(t.f[0], 16, 16, kTwoPi), 1e-15);
  EXPECT_LE(max_abs(t.h[0] - parse_expression("sin(t)"), 16, 16, kTwoPi), 1e-15);

  // The manufactured data make u* an exact solution of the boundary condition.
  LinearProblem p = example1();
  std::vector<Expression> ustar = parse_all({"0.1*sin(t)*sin(pi*x)", "0.1*cos(t)*x*(1 - x) + 0.2"});
  ManufacturedData md = manufactured_setup(2, 1, p.a, p.b, p.r, ustar);
  for (double tt : {0.0, 1.0, 2.5}) {
    auto u = [&](int k, double x) { return evaluate(ustar[k], {{"x", x}, {"t", tt}}); };
    const double h1 = evaluate(md.h[0], {{"t", tt}});
    EXPECT_NEAR(u(0, 0.0), p.r[0] * u(0, 1.0) + p.r[1] * u(1, 0.0) + h1, 1e-15);
  }
}

TEST(Manufactured, StudyConverges) {
  LinearProblem p = example1();
  std::vector<Expression> ustar = parse_all({"0.1*sin(t)*sin(pi*x)", "0.1*cos(t)*x*(1 - x)"});
  MmsResult r = mms_study(p, ustar, {{24, 24}, {48, 48}, {96, 96}}, grid(24, 24));
  ASSERT_EQ(r.levels.size(), 3u);
  EXPECT_TRUE(r.monotone);
  for (std::size_t k = 1; k < 3; ++k) EXPECT_GE(r.levels[k].order, 0.9);
  for (const auto& l : r.levels) {
    EXPECT_TRUE(l.converged);
    EXPECT_LE(l.operator_residual, 10.0 * l.sup_error);
  }
  // Second differences in t stay bounded under refinement.
  EXPECT_LT(r.levels[2].d2t_max, 2.0 * r.levels[1].d2t_max);
}

TEST(Perturb, ZeroAmplitude) {
  LinearProblem p = example1({"0.01*sin(t)", "0"});
  PerturbResult r = perturb_study(p, grid(32, 32), 0.0, 3);
  EXPECT_TRUE(r.all_converged);
  ASSERT_EQ(r.samples.size(), 3u);
  for (const auto& s : r.samples) EXPECT_LE(s.deviation, 2.0 * 1e-8);
}

TEST(Perturb, LargeAmplitudeFailsValidation) {
  LinearProblem p = example1({"0.01*sin(t)", "0"});
  PerturbResult r = perturb_study(p, grid(16, 32), 5.0, 4);
  bool any_invalid = false;
  for (const auto& s : r.samples) {
    if (!s.valid) {
      any_invalid = true;
      EXPECT_FALSE(s.converged);
      EXPECT_FALSE(s.message.empty());
    }
  }
  EXPECT_TRUE(any_invalid);
  EXPECT_FALSE(r.all_converged);
}

TEST(Perturb, AmplitudeBoundAndDeterminism) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 20; ++k) {
    Expression e = perturbation(0.01, kTwoPi, {u(rng), u(rng), u(rng), u(rng)});
    EXPECT_LE(max_abs(e, 32, 64, kTwoPi), 0.01 + 1e-15);
    EXPECT_NEAR(evaluate(e, {{"x", 0.3}, {"t", 1.0 + kTwoPi}}), evaluate(e, {{"x", 0.3}, {"t", 1.0}}), 1e-15);
  }
  LinearProblem p = example1({"0.01*sin(t)", "0"});
  PerturbResult a = perturb_study(p, grid(16, 32), 1e-2, 2, 42);
  PerturbResult b = perturb_study(p, grid(16, 32), 1e-2, 2, 42);
  for (std::size_t k = 0; k < a.samples.size(); ++k) EXPECT_EQ(a.samples[k].deviation, b.samples[k].deviation);
  EXPECT_GT(a.max_deviation, 0.0);
}
