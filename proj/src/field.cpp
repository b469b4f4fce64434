#include "perihyp/field.hpp"

#include <algorithm>
#include <array>

namespace perihyp {

double ScalarField::dt(double x, double t) const {
  const double h = fd_step_t_;
  return (value(x, t + h) - value(x, t - h)) / (2.0 * h);
}

double ScalarField::dx(double x, double t) const {
  constexpr double h = 1e-6;
  double lo = std::max(0.0, x - h);
  double hi = std::min(1.0, x + h);
  return (value(hi, t) - value(lo, t)) / (hi - lo);
}

ExpressionField::ExpressionField(Expression e)
    : expr_(std::move(e)),
      value_(expr_),
      dt_(expr_.derivative(slot::t)),
      dx_(expr_.derivative(slot::x)) {
  for (int s : expr_.free_slots()) {
    if (s != slot::x && s != slot::t)
      throw std::invalid_argument("coefficient field may only depend on x and t, found '" +
                                  slot_name(s) + "' in " + expr_.to_string());
  }
}

double ExpressionField::value(double x, double t) const {
  const std::array<double, 2> slots{x, t};
  return value_(slots);
}

double ExpressionField::dt(double x, double t) const {
  const std::array<double, 2> slots{x, t};
  return dt_(slots);
}

double ExpressionField::dx(double x, double t) const {
  const std::array<double, 2> slots{x, t};
  return dx_(slots);
}

Field make_field(const Expression& e) { return std::make_shared<ExpressionField>(e); }

Field make_field(double constant) { return make_field(Expression::constant(constant)); }

Field make_field(std::string_view text) { return make_field(parse_expression(text)); }

}  // namespace perihyp
