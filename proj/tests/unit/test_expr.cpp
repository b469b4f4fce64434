#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "perihyp/expr.hpp"

using namespace perihyp;

namespace {

double at(const std::string& text, std::map<std::string, double> b = {}) {
  return evaluate(parse_expression(text), b);
}

// Random expressions over x, t, u1, u2 whose every subterm stays inside the
// function domains: divisors and log arguments are kept >= 1.
class RandomExpr {
 public:
  explicit RandomExpr(unsigned seed) : rng_(seed) {}

  Expression make(int depth) {
    if (depth == 0 || pick(5) == 0) return leaf();
    switch (pick(10)) {
      case 0: return make(depth - 1) + make(depth - 1);
      case 1: return make(depth - 1) - make(depth - 1);
      case 2: return make(depth - 1) * make(depth - 1);
      case 3: return make(depth - 1) / (Expression::constant(2.0) + cos(make(depth - 1)));
      case 4: return sin(make(depth - 1));
      case 5: return cos(make(depth - 1));
      case 6: return exp(sin(make(depth - 1)));
      case 7: {
        Expression g = make(depth - 1);
        return ln(Expression::constant(1.0) + g * g);
      }
      case 8: return pow(make(depth - 1), Expression::constant(static_cast<double>(2 + pick(2))));
      default:
        return pow(Expression::constant(1.5) + sin(make(depth - 1)), cos(make(depth - 1)));
    }
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  Expression leaf() {
    static const int slots[] = {slot::x, slot::t, slot::u(0), slot::u(1)};
    if (pick(3) == 0) return Expression::constant(uniform(-2.0, 2.0));
    return Expression::variable(slots[pick(4)]);
  }
  std::mt19937_64 rng_;
};

Bindings random_bindings(RandomExpr& g) {
  Bindings b;
  b.set(slot::x, g.uniform(0.0, 1.0));
  b.set(slot::t, g.uniform(0.0, 2.0 * std::numbers::pi));
  b.set(slot::u(0), g.uniform(-1.0, 1.0));
  b.set(slot::u(1), g.uniform(-1.0, 1.0));
  return b;
}

}  // namespace

TEST(Expr, ArithmeticExamples) {
  EXPECT_DOUBLE_EQ(at("2 - x", {{"x", 0.25}}), 1.75);
  EXPECT_DOUBLE_EQ(at("-(2 + sin(t))", {{"t", std::numbers::pi / 2}}), -3.0);
  EXPECT_NEAR(at("exp(-3)/2"), 0.024893534183931972, 1e-17);
  EXPECT_EQ(at("3"), 3.0);
  EXPECT_NEAR(at("sin(t)^2 + cos(t)^2", {{"t", 0.7}}), 1.0, 1e-15);
  EXPECT_NEAR(at("2*sin(t)", {{"t", std::numbers::pi / 6}}), 1.0, 1e-15);
}

TEST(Expr, Precedence) {
  EXPECT_DOUBLE_EQ(at("-2^2"), -4.0);
  EXPECT_DOUBLE_EQ(at("2^3^2"), 64.0);
  EXPECT_DOUBLE_EQ(at("8/4/2"), 1.0);
  EXPECT_DOUBLE_EQ(at("1 - 2 - 3"), -4.0);
  EXPECT_DOUBLE_EQ(at("2 + 3*4"), 14.0);
  EXPECT_DOUBLE_EQ(at("1e-3*2"), 2e-3);
  EXPECT_NEAR(at("pi"), std::numbers::pi, 0.0);
}

TEST(Expr, TableDerivatives) {
  Expression d = parse_expression("2 + sin(t)").derivative(slot::t);
  EXPECT_EQ(d.to_string(), "cos(t)");
  EXPECT_EQ(parse_expression("2 - x").derivative(slot::t).constant_value(), 0.0);
  Expression e = parse_expression("exp(2*x)");
  const double dx = e.derivative(slot::x).evaluate(Bindings{{"x", 0.5}});
  const double h = 1e-6;
  const double fd = (e.evaluate(Bindings{{"x", 0.5 + h}}) - e.evaluate(Bindings{{"x", 0.5 - h}})) / (2 * h);
  EXPECT_NEAR(dx, 2.0 * std::numbers::e, 1e-12);
  EXPECT_NEAR(dx / fd, 1.0, 1e-6);
}

TEST(Expr, AbsAndSignConvention) {
  Expression e = parse_expression("abs(x)");
  Expression d = e.derivative(slot::x);
  EXPECT_EQ(d.evaluate(Bindings{{"x", -0.3}}), -1.0);
  EXPECT_EQ(d.evaluate(Bindings{{"x", 0.3}}), 1.0);
  EXPECT_EQ(d.evaluate(Bindings{{"x", 0.0}}), 0.0);
}

TEST(Expr, Errors) {
  EXPECT_THROW(parse_expression("2 +"), ParseError);
  EXPECT_THROW(parse_expression("foo(x)"), ParseError);
  EXPECT_THROW(parse_expression("y"), ParseError);
  EXPECT_THROW(parse_expression("(x"), ParseError);
  EXPECT_THROW(parse_expression(""), ParseError);
  try {
    parse_expression("1 + $");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
  EXPECT_THROW(at("ln(x)", {{"x", -1.0}}), DomainError);
  EXPECT_THROW(at("1/x", {{"x", 0.0}}), DomainError);
  EXPECT_THROW(at("x^0.5", {{"x", -2.0}}), DomainError);
  EXPECT_THROW(parse_expression("x + t").evaluate(Bindings{{"x", 1.0}}), UnboundVariableError);
}

TEST(Expr, CompiledMatchesChecked) {
  RandomExpr g(7);
  for (int k = 0; k < 200; ++k) {
    Expression e = g.make(5);
    CompiledExpression c(e);
    Bindings b = random_bindings(g);
    std::vector<double> slots(slot::u(2), 0.0);
    for (int s = 0; s < slot::u(2); ++s)
      if (b.bound(s)) slots[s] = b.get(s);
    const double v = e.evaluate(b);
    EXPECT_NEAR(c(slots), v, 1e-13 * std::max(1.0, std::abs(v)));
  }
}

TEST(Expr, SubstituteAndDependencies) {
  Expression e = parse_expression("x*u1 + t");
  EXPECT_TRUE(e.depends_on(slot::u(0)));
  EXPECT_FALSE(e.depends_on(slot::u(1)));
  Expression s = e.substitute(slot::u(0), parse_expression("2"));
  EXPECT_FALSE(s.depends_on(slot::u(0)));
  EXPECT_DOUBLE_EQ(s.evaluate(Bindings{{"x", 0.5}, {"t", 1.0}}), 2.0);
  EXPECT_EQ(e.free_slots(), (std::vector<int>{slot::x, slot::t, slot::u(0)}));
}

// Symbolic derivatives agree with central differences on random expressions.
TEST(ExprProperty, DerivativeMatchesFiniteDifference) {
  RandomExpr g(2024);
  const int slots[] = {slot::x, slot::t, slot::u(0), slot::u(1)};
  int checked = 0;
  for (int k = 0; k < 400; ++k) {
    Expression e = g.make(6);
    Bindings b = random_bindings(g);
    for (int s : slots) {
      const double h = 1e-6;
      Bindings lo = b, hi = b;
      lo.set(s, b.get(s) - h);
      hi.set(s, b.get(s) + h);
      const double fd = (e.evaluate(hi) - e.evaluate(lo)) / (2 * h);
      const double d = e.derivative(s).evaluate(b);
      const double scale = std::max({std::abs(d), std::abs(e.evaluate(b)), 1.0});
      EXPECT_NEAR(d, fd, 1e-5 * scale) << e.to_string() << " d/d" << slot_name(s);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 1600);
}

TEST(ExprProperty, PrintParseRoundTrip) {
  RandomExpr g(99);
  for (int k = 0; k < 100; ++k) {
    Expression e = g.make(6);
    Expression back = parse_expression(e.to_string());
    for (int trial = 0; trial < 100; ++trial) {
      Bindings b = random_bindings(g);
      const double v = e.evaluate(b);
      EXPECT_NEAR(back.evaluate(b), v, 1e-12 * std::max(1.0, std::abs(v))) << e.to_string();
    }
  }
}
