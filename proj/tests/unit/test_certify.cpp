#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "perihyp/certify.hpp"

using namespace perihyp;
using namespace perihyp::testing;

namespace {

void expect_matrix(const SquareMatrix& m, std::initializer_list<double> values, double tol) {
  int k = 0;
  for (double v : values) {
    EXPECT_NEAR(m.data[k], v, tol) << "entry " << k;
    ++k;
  }
}

CertifyOptions quick() {
  CertifyOptions o;
  o.nx = 32;
  o.nt = 64;
  o.boundary_nt = 128;
  o.gnorm_points = 128;
  o.trace.nx = 32;
  return o;
}

LyapunovSpec weights(const std::vector<std::string>& v) {
  LyapunovSpec l;
  for (const auto& s : v) l.V.push_back(make_field(s));
  return l;
}

}  // namespace

TEST(JMatrices, Examples) {
  BoundarySpec zero = BoundarySpec::zero(2);
  JMatrices J = build_J_matrices(zero, 2, 1);
  expect_matrix(J.J0, {0, 0, 0, 1}, 0.0);
  expect_matrix(J.J1, {1, 0, 0, 0}, 0.0);

  const double e3 = std::exp(-3.0);
  JMatrices E = build_J_matrices(example1().boundary(), 2, 1);
  expect_matrix(E.J0, {e3, e3 / 2, 0, 1}, 1e-17);
  expect_matrix(E.J1, {1, 0, e3, e3}, 1e-17);

  BoundarySpec id = BoundarySpec::zero(2);
  id.r = {1, 0, 0, 1};
  JMatrices I = build_J_matrices(id, 2, 1);
  expect_matrix(I.J0, {1, 0, 0, 1}, 0.0);
  expect_matrix(I.J1, {1, 0, 0, 1}, 0.0);
}

TEST(Lyapunov, ExampleInteriorMatrix) {
  LinearSystemSpec s = example1().system();
  LyapunovSpec V = LyapunovSpec::identity(2);
  for (double t : {0.0, 0.4, 1.9, 4.2})
    for (double x : {0.0, 0.3, 1.0}) {
      const double st = std::sin(t);
      expect_matrix(lyapunov_interior_matrix(s, V, x, t), {-1, -st, -st, -4}, 1e-14);
    }
}

TEST(Lyapunov, ExampleCertificate) {
  LinearProblem p = example1();
  CertifyOptions o;
  o.nx = 128;
  o.nt = 128;
  CertificationReport r = certify(p.system(), p.boundary(), LyapunovSpec::identity(2), o);
  EXPECT_TRUE(r.validation.pass());
  EXPECT_TRUE(r.lyapunov_pass);
  EXPECT_TRUE(r.dissipativity.pass);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.cond_ii.value, (-5.0 + std::sqrt(13.0)) / 2.0, 1e-6);
  EXPECT_NEAR(std::abs(std::sin(r.cond_ii.t)), 1.0, 1e-12);
  EXPECT_LT(r.cond_iii.value, 0.0);
  EXPECT_DOUBLE_EQ(r.cond_i_lower.value, 1.0);
  for (const auto& g : r.dissipativity.norms) {
    EXPECT_LT(g.value, 2.0 / std::numbers::e);
    EXPECT_NEAR(g.row_values[0], 1.5 * std::exp(-3.0), 1e-6);
  }
}

TEST(Lyapunov, TransportIsNotCertified) {
  LinearProblem p = constant_speed(1.0, -1.0);
  CertificationReport r = lyapunov_check(p.system(), p.boundary(), LyapunovSpec::identity(2), quick());
  EXPECT_EQ(r.cond_ii.value, 0.0);
  EXPECT_FALSE(r.cond_ii.pass);
  EXPECT_FALSE(r.lyapunov_pass);
}

TEST(Lyapunov, ExplicitMargins) {
  LinearProblem p = example1();
  LyapunovSpec V = LyapunovSpec::identity(2);
  V.margins = std::array<double, 4>{0.5, 2.0, 0.5, 0.5};
  EXPECT_TRUE(lyapunov_check(p.system(), p.boundary(), V, quick()).lyapunov_pass);
  V.margins = std::array<double, 4>{0.5, 2.0, 0.8, 0.5};
  CertificationReport r = lyapunov_check(p.system(), p.boundary(), V, quick());
  EXPECT_FALSE(r.cond_ii.pass);
  EXPECT_FALSE(r.lyapunov_pass);
}

TEST(Dissipativity, Examples) {
  LinearProblem zero = constant_speed(1.0, -1.0);
  DissipativityResult z = dissipativity_check(zero.system(), zero.boundary(), quick());
  EXPECT_TRUE(z.pass);
  for (const auto& g : z.norms) EXPECT_EQ(g.value, 0.0);
  LinearProblem big = constant_speed(1.0, -1.0, 0.0, 0.0, {0, 1.5, 0, 0});
  DissipativityResult b = dissipativity_check(big.system(), big.boundary(), quick());
  EXPECT_FALSE(b.pass);
  for (const auto& g : b.norms) EXPECT_NEAR(g.value, 1.5, 1e-14);
  CertificationReport r = certify(big.system(), big.boundary(), LyapunovSpec::identity(2), quick());
  EXPECT_FALSE(r.pass);
}

TEST(Certify, InvalidSystemSkipsChecks) {
  LinearProblem p = constant_speed(1.0, 1.0);
  CertificationReport r = certify(p.system(), p.boundary(), LyapunovSpec::identity(2), quick());
  EXPECT_FALSE(r.validation.pass());
  EXPECT_FALSE(r.pass);
}

TEST(Eigen, ClosedFormMatchesJacobi) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 500; ++k) {
    SquareMatrix m(2);
    m(0, 0) = u(rng);
    m(1, 1) = u(rng);
    m(0, 1) = m(1, 0) = k % 10 == 0 ? 0.0 : u(rng);
    std::vector<double> a = symmetric_eigenvalues(m);
    std::vector<double> b = jacobi_eigenvalues(m);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_NEAR(a[0], b[0], 1e-10);
    EXPECT_NEAR(a[1], b[1], 1e-10);
  }
}

TEST(Eigen, JacobiOnLargerMatrix) {
  // Tridiagonal (2, -1) matrix: eigenvalues 2 - 2 cos(k pi / (n + 1)).
  const int n = 6;
  SquareMatrix m(n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 2.0;
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = -1.0;
  }
  std::vector<double> ev = symmetric_eigenvalues(m);
  for (int k = 1; k <= n; ++k) EXPECT_NEAR(ev[k - 1], 2.0 - 2.0 * std::cos(k * std::numbers::pi / (n + 1)), 1e-10);
}

// d_x(V a) is assembled from symbolic derivatives; compare its diagonal with differences of V a.
TEST(LyapunovProperty, AssembledDerivativesMatchFiniteDifferences) {
  LinearProblem p = example1();
  p.a[0] = parse_expression("2 - x + 0.3*sin(t)*x^2");
  p.b[0] = parse_expression("0.2*cos(t)");
  LinearSystemSpec s = p.system();
  LyapunovSpec V = weights({"1 + 0.5*x*cos(t)", "exp(-x)*(2 + sin(t))"});
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ux(0.05, 0.95), ut(0, kTwoPi);
  const double h = 1e-6;
  for (int k = 0; k < 50; ++k) {
    const double x = ux(rng), t = ut(rng);
    SquareMatrix M = lyapunov_interior_matrix(s, V, x, t);
    for (int j = 0; j < 2; ++j) {
      auto va = [&](double xx, double tt) { return V.V[j]->value(xx, tt) * s.speed(j).value(xx, tt); };
      const double dx = (va(x + h, t) - va(x - h, t)) / (2 * h);
      const double dt = (V.V[j]->value(x, t + h) - V.V[j]->value(x, t - h)) / (2 * h);
      const double expected = dt + dx - 2.0 * V.V[j]->value(x, t) * s.coupling(j, j).value(x, t);
      EXPECT_NEAR(M(j, j), expected, 1e-5 * std::max(1.0, std::abs(expected)));
    }
    EXPECT_NEAR(M(0, 1), -V.V[0]->value(x, t) * s.coupling(0, 1).value(x, t) -
                             s.coupling(1, 0).value(x, t) * V.V[1]->value(x, t), 1e-14);
  }
}

TEST(LyapunovProperty, AssembledMatricesAreSymmetric) {
  LinearProblem p = example1();
  p.b = parse_all({"0.3", "2*sin(t) + x", "-sin(t)*x", "2"});
  p.r = {0.1, 0.3, -0.2, 0.05};
  LinearSystemSpec s = p.system();
  BoundarySpec b = p.boundary();
  LyapunovSpec V = weights({"1 + 0.5*x*cos(t)", "exp(-x)*(2 + sin(t))"});
  JMatrices J = build_J_matrices(b, 2, 1);
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> ux(0, 1), ut(0, kTwoPi);
  for (int k = 0; k < 50; ++k) {
    EXPECT_LE(lyapunov_interior_matrix(s, V, ux(rng), ut(rng)).asymmetry(), 1e-12);
    EXPECT_LE(lyapunov_boundary_matrix(s, V, J, ut(rng)).asymmetry(), 1e-12);
  }
}

TEST(LyapunovProperty, ScalingWeights) {
  std::vector<LinearProblem> problems = {example1(), constant_speed(1.0, -1.0), constant_speed(1.0, -2.0, 1.0, 1.0, {0.9, 0, 0, 0.9})};
  for (const auto& p : problems) {
    const LinearSystemSpec s = p.system();
    const BoundarySpec b = p.boundary();
    CertificationReport base = lyapunov_check(s, b, LyapunovSpec::identity(2), quick());
    for (double c : {0.01, 3.0, 250.0}) {
      LyapunovSpec scaled;
      scaled.V = {make_field(c), make_field(c)};
      CertificationReport r = lyapunov_check(s, b, scaled, quick());
      EXPECT_NEAR(r.cond_i_lower.margin, c * base.cond_i_lower.margin, 1e-12 * c);
      EXPECT_NEAR(r.cond_i_upper.margin, c * base.cond_i_upper.margin, 1e-12 * c);
      EXPECT_NEAR(r.cond_ii.margin, c * base.cond_ii.margin, 1e-12 * c);
      EXPECT_NEAR(r.cond_iii.margin, c * base.cond_iii.margin, 1e-12 * c);
      EXPECT_EQ(r.cond_ii.pass, base.cond_ii.pass);
      EXPECT_EQ(r.cond_iii.pass, base.cond_iii.pass);
      EXPECT_EQ(r.lyapunov_pass, base.lyapunov_pass);
    }
  }
}
