#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace perihyp {

/// Variable slots shared by every expression: x, t, q, then u1..un.
namespace slot {
inline constexpr int x = 0;
inline constexpr int t = 1;
inline constexpr int q = 2;
inline constexpr int u_base = 3;
/// Slot of the k-th solution component, k counted from 0.
constexpr int u(int k) { return u_base + k; }
}  // namespace slot

/// Name of a slot ("x", "t", "q", "u1", ...).
std::string slot_name(int s);
/// Slot for a variable name, or nullopt for an unknown identifier.
std::optional<int> slot_from_name(std::string_view name);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnboundVariableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Ln, Abs, Sign };

struct ExprNode;

/// Variable assignment for the checked evaluation path.
class Bindings {
 public:
  Bindings() = default;
  Bindings(std::initializer_list<std::pair<std::string_view, double>> values);

  Bindings& set(int s, double value);
  Bindings& set(std::string_view name, double value);
  bool bound(int s) const;
  double get(int s) const;

 private:
  std::vector<double> values_;
  std::vector<bool> bound_;
};

/// Immutable scalar expression over x, t, q and u1..un.
///
/// Nodes are shared; copying an Expression is cheap and thread safe.
class Expression {
 public:
  /// The constant 0.
  Expression();

  static Expression constant(double value);
  static Expression variable(int s);
  static Expression unary(Op op, Expression arg);
  static Expression binary(Op op, Expression lhs, Expression rhs);

  /// Checked evaluation; throws UnboundVariableError or DomainError.
  double evaluate(const Bindings& bindings) const;

  /// Exact symbolic derivative with respect to a slot, lightly simplified.
  /// d|e|/dv = sign(e)·de/dv with sign(0) = 0.
  Expression derivative(int s) const;

  /// Replace every occurrence of a variable.
  Expression substitute(int s, const Expression& replacement) const;

  /// Infix text that parses back to an equivalent expression.
  std::string to_string() const;

  bool depends_on(int s) const;
  /// Sorted list of slots referenced by the expression.
  std::vector<int> free_slots() const;
  /// Value if the expression has no free variables.
  std::optional<double> constant_value() const;

  const ExprNode& node() const { return *node_; }

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);

 private:
  explicit Expression(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  Op op = Op::Const;
  double value = 0.0;  // Const
  int slot = -1;       // Var
  std::vector<Expression> args;
};

Expression sin(const Expression& e);
Expression cos(const Expression& e);
Expression exp(const Expression& e);
Expression ln(const Expression& e);
Expression pow(const Expression& base, const Expression& exponent);

/// Parse infix text. Precedence: ^ above unary minus above * / above + -;
/// all binary operators associate to the left.
Expression parse_expression(std::string_view text);

/// Convenience wrapper around evaluate with named bindings.
double evaluate(const Expression& e, const std::map<std::string, double>& bindings);

/// Flat postfix program for the hot evaluation paths.
///
/// The caller provides a slot array covering every slot the expression uses;
/// domain errors are still raised.
class CompiledExpression {
 public:
  CompiledExpression() = default;
  explicit CompiledExpression(const Expression& e);

  double operator()(std::span<const double> slots) const;
  /// Number of slots the argument span must provide.
  int required_slots() const { return required_slots_; }
  bool is_constant() const { return constant_.has_value(); }

 private:
  struct Instr {
    Op op;
    double value;
    int slot;
  };
  std::vector<Instr> program_;
  std::optional<double> constant_;
  int required_slots_ = 0;
  int max_depth_ = 0;
};

}  // namespace perihyp
