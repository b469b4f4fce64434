#pragma once

#include <memory>
#include <vector>

#include "perihyp/expr.hpp"

namespace perihyp {

/// A scalar coefficient field over (x, t).
///
/// Boundary data h_j(t) uses the same interface and ignores x.
class ScalarField {
 public:
  virtual ~ScalarField() = default;

  virtual double value(double x, double t) const = 0;

  /// Partial derivatives. The defaults are central differences with step
  /// fd_step_t() in t and 1e-6 in x (one-sided at the ends of [0,1]).
  virtual double dt(double x, double t) const;
  virtual double dx(double x, double t) const;

  /// Backing expression in x and t, if the field has one.
  virtual const Expression* expression() const { return nullptr; }
  virtual bool is_constant() const { return false; }

  void set_fd_step_t(double h) { fd_step_t_ = h; }
  double fd_step_t() const { return fd_step_t_; }

 private:
  double fd_step_t_ = 1e-6;
};

using Field = std::shared_ptr<const ScalarField>;

/// Field backed by an expression in x and t with symbolic derivatives.
class ExpressionField final : public ScalarField {
 public:
  explicit ExpressionField(Expression e);

  double value(double x, double t) const override;
  double dt(double x, double t) const override;
  double dx(double x, double t) const override;
  const Expression* expression() const override { return &expr_; }
  bool is_constant() const override { return value_.is_constant(); }

 private:
  Expression expr_;
  CompiledExpression value_;
  CompiledExpression dt_;
  CompiledExpression dx_;
};

Field make_field(const Expression& e);
Field make_field(double constant);
/// Parses text and checks that it only uses x and t.
Field make_field(std::string_view text);

}  // namespace perihyp
