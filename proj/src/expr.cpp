#include "perihyp/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

namespace perihyp {

std::string slot_name(int s) {
  switch (s) {
    case slot::x:
      return "x";
    case slot::t:
      return "t";
    case slot::q:
      return "q";
    default:
      return "u" + std::to_string(s - slot::u_base + 1);
  }
}

std::optional<int> slot_from_name(std::string_view name) {
  if (name == "x") return slot::x;
  if (name == "t") return slot::t;
  if (name == "q") return slot::q;
  if (name.size() >= 2 && name[0] == 'u') {
    int k = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
    if (ec == std::errc{} && ptr == name.data() + name.size() && k >= 1 && name[1] != '0') {
      return slot::u(k - 1);
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Bindings

Bindings::Bindings(std::initializer_list<std::pair<std::string_view, double>> values) {
  for (const auto& [name, v] : values) set(name, v);
}

Bindings& Bindings::set(int s, double value) {
  if (s < 0) throw std::invalid_argument("negative slot");
  if (static_cast<std::size_t>(s) >= values_.size()) {
    values_.resize(s + 1, 0.0);
    bound_.resize(s + 1, false);
  }
  values_[s] = value;
  bound_[s] = true;
  return *this;
}

Bindings& Bindings::set(std::string_view name, double value) {
  auto s = slot_from_name(name);
  if (!s) throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
  return set(*s, value);
}

bool Bindings::bound(int s) const {
  return s >= 0 && static_cast<std::size_t>(s) < bound_.size() && bound_[s];
}

double Bindings::get(int s) const {
  if (!bound(s)) throw UnboundVariableError("unbound variable '" + slot_name(s) + "'");
  return values_[s];
}

// ---------------------------------------------------------------------------
// Scalar kernels shared by the tree and the compiled evaluator

namespace {

double apply_unary(Op op, double a) {
  double r = 0.0;
  switch (op) {
    case Op::Neg:
      return -a;
    case Op::Sin:
      r = std::sin(a);
      break;
    case Op::Cos:
      r = std::cos(a);
      break;
    case Op::Exp:
      return std::exp(a);
    case Op::Ln:
      if (!(a > 0.0)) throw DomainError("ln of non-positive value " + std::to_string(a));
      return std::log(a);
    case Op::Abs:
      return std::abs(a);
    case Op::Sign:
      return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
    default:
      throw std::logic_error("not a unary op");
  }
  if (std::isnan(r)) throw DomainError("trigonometric function of non-finite value");
  return r;
}

double apply_binary(Op op, double a, double b) {
  switch (op) {
    case Op::Add:
      return a + b;
    case Op::Sub:
      return a - b;
    case Op::Mul:
      return a * b;
    case Op::Div:
      if (b == 0.0) throw DomainError("division by zero");
      return a / b;
    case Op::Pow: {
      if (a == 0.0 && b < 0.0) throw DomainError("zero raised to a negative power");
      if (a < 0.0 && b != std::nearbyint(b))
        throw DomainError("negative base raised to a non-integer power");
      return std::pow(a, b);
    }
    default:
      throw std::logic_error("not a binary op");
  }
}

bool is_unary(Op op) {
  return op == Op::Neg || op == Op::Sin || op == Op::Cos || op == Op::Exp || op == Op::Ln ||
         op == Op::Abs || op == Op::Sign;
}

const char* function_name(Op op) {
  switch (op) {
    case Op::Sin:
      return "sin";
    case Op::Cos:
      return "cos";
    case Op::Exp:
      return "exp";
    case Op::Ln:
      return "ln";
    case Op::Abs:
      return "abs";
    case Op::Sign:
      return "sign";
    default:
      return nullptr;
  }
}

std::string format_number(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

double eval_node(const ExprNode& n, const Bindings& b) {
  switch (n.op) {
    case Op::Const:
      return n.value;
    case Op::Var:
      return b.get(n.slot);
    default:
      break;
  }
  if (is_unary(n.op)) return apply_unary(n.op, eval_node(n.args[0].node(), b));
  double lhs = eval_node(n.args[0].node(), b);
  double rhs = eval_node(n.args[1].node(), b);
  return apply_binary(n.op, lhs, rhs);
}

void collect_slots(const ExprNode& n, std::set<int>& out) {
  if (n.op == Op::Var) out.insert(n.slot);
  for (const auto& a : n.args) collect_slots(a.node(), out);
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Expression::Expression() : node_(std::make_shared<ExprNode>()) {}

Expression Expression::constant(double value) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Const;
  n->value = value;
  return Expression(std::move(n));
}

Expression Expression::variable(int s) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Var;
  n->slot = s;
  return Expression(std::move(n));
}

Expression Expression::unary(Op op, Expression arg) {
  if (!is_unary(op)) throw std::invalid_argument("not a unary op");
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->args.push_back(std::move(arg));
  return Expression(std::move(n));
}

Expression Expression::binary(Op op, Expression lhs, Expression rhs) {
  if (op != Op::Add && op != Op::Sub && op != Op::Mul && op != Op::Div && op != Op::Pow)
    throw std::invalid_argument("not a binary op");
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->args.push_back(std::move(lhs));
  n->args.push_back(std::move(rhs));
  return Expression(std::move(n));
}

namespace {

std::optional<double> as_const(const Expression& e) {
  if (e.node().op == Op::Const) return e.node().value;
  return std::nullopt;
}

bool is_const(const Expression& e, double v) {
  auto c = as_const(e);
  return c && *c == v;
}

// Simplifying builders. Constant folding is skipped when it would raise.
Expression fold_or(Op op, const Expression& a, const Expression& b) {
  auto ca = as_const(a);
  auto cb = as_const(b);
  if (ca && cb) {
    try {
      return Expression::constant(apply_binary(op, *ca, *cb));
    } catch (const DomainError&) {
    }
  }
  return Expression::binary(op, a, b);
}

Expression make_neg(const Expression& a) {
  if (auto c = as_const(a)) return Expression::constant(-*c);
  if (a.node().op == Op::Neg) return a.node().args[0];
  return Expression::unary(Op::Neg, a);
}

Expression make_add(const Expression& a, const Expression& b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return fold_or(Op::Add, a, b);
}

Expression make_sub(const Expression& a, const Expression& b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return make_neg(b);
  return fold_or(Op::Sub, a, b);
}

Expression make_mul(const Expression& a, const Expression& b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return Expression::constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return make_neg(b);
  if (is_const(b, -1.0)) return make_neg(a);
  return fold_or(Op::Mul, a, b);
}

Expression make_div(const Expression& a, const Expression& b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return Expression::constant(0.0);
  return fold_or(Op::Div, a, b);
}

Expression make_pow(const Expression& a, const Expression& b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(b, 0.0)) return Expression::constant(1.0);
  return fold_or(Op::Pow, a, b);
}

Expression make_unary(Op op, const Expression& a) {
  if (op == Op::Neg) return make_neg(a);
  if (auto c = as_const(a)) {
    try {
      return Expression::constant(apply_unary(op, *c));
    } catch (const DomainError&) {
    }
  }
  return Expression::unary(op, a);
}

}  // namespace

Expression operator+(const Expression& a, const Expression& b) { return make_add(a, b); }
Expression operator-(const Expression& a, const Expression& b) { return make_sub(a, b); }
Expression operator*(const Expression& a, const Expression& b) { return make_mul(a, b); }
Expression operator/(const Expression& a, const Expression& b) { return make_div(a, b); }
Expression operator-(const Expression& a) { return make_neg(a); }

Expression sin(const Expression& e) { return make_unary(Op::Sin, e); }
Expression cos(const Expression& e) { return make_unary(Op::Cos, e); }
Expression exp(const Expression& e) { return make_unary(Op::Exp, e); }
Expression ln(const Expression& e) { return make_unary(Op::Ln, e); }
Expression pow(const Expression& base, const Expression& exponent) {
  return make_pow(base, exponent);
}

// ---------------------------------------------------------------------------
// Queries

double Expression::evaluate(const Bindings& bindings) const {
  return eval_node(*node_, bindings);
}

bool Expression::depends_on(int s) const {
  const ExprNode& n = *node_;
  if (n.op == Op::Var) return n.slot == s;
  return std::any_of(n.args.begin(), n.args.end(),
                     [s](const Expression& a) { return a.depends_on(s); });
}

std::vector<int> Expression::free_slots() const {
  std::set<int> out;
  collect_slots(*node_, out);
  return {out.begin(), out.end()};
}

std::optional<double> Expression::constant_value() const {
  if (!free_slots().empty()) return std::nullopt;
  return evaluate(Bindings{});
}

Expression Expression::substitute(int s, const Expression& replacement) const {
  const ExprNode& n = *node_;
  if (n.op == Op::Var) return n.slot == s ? replacement : *this;
  if (n.op == Op::Const) return *this;
  if (is_unary(n.op)) return make_unary(n.op, n.args[0].substitute(s, replacement));
  return fold_or(n.op, n.args[0].substitute(s, replacement),
                 n.args[1].substitute(s, replacement));
}

Expression Expression::derivative(int s) const {
  const ExprNode& n = *node_;
  switch (n.op) {
    case Op::Const:
      return constant(0.0);
    case Op::Var:
      return constant(n.slot == s ? 1.0 : 0.0);
    default:
      break;
  }
  const Expression& a = n.args[0];
  Expression da = a.derivative(s);
  switch (n.op) {
    case Op::Neg:
      return make_neg(da);
    case Op::Sin:
      return make_mul(cos(a), da);
    case Op::Cos:
      return make_mul(make_neg(sin(a)), da);
    case Op::Exp:
      return make_mul(*this, da);
    case Op::Ln:
      return make_div(da, a);
    case Op::Abs:
      return make_mul(make_unary(Op::Sign, a), da);
    case Op::Sign:
      return constant(0.0);
    default:
      break;
  }
  const Expression& b = n.args[1];
  Expression db = b.derivative(s);
  switch (n.op) {
    case Op::Add:
      return make_add(da, db);
    case Op::Sub:
      return make_sub(da, db);
    case Op::Mul:
      return make_add(make_mul(da, b), make_mul(a, db));
    case Op::Div:
      return make_sub(make_div(da, b), make_div(make_mul(a, db), make_mul(b, b)));
    case Op::Pow: {
      auto c = b.constant_value();
      if (c && *c == std::nearbyint(*c)) {
        return make_mul(make_mul(constant(*c), make_pow(a, constant(*c - 1.0))), da);
      }
      // a^b (b' ln a + b a'/a)
      Expression log_term = is_const(db, 0.0) ? constant(0.0) : make_mul(db, ln(a));
      return make_mul(*this, make_add(log_term, make_div(make_mul(b, da), a)));
    }
    default:
      throw std::logic_error("unhandled op in derivative");
  }
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const ExprNode& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Pow:
      return 4;
    case Op::Const:
      return (n.value < 0.0 || std::signbit(n.value)) ? 3 : 5;
    default:
      return 5;
  }
}

void print_node(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, int parent_prec, bool right, std::string& out) {
  int p = precedence(child);
  bool paren = p < parent_prec || (right && p == parent_prec);
  if (paren) out += '(';
  print_node(child, out);
  if (paren) out += ')';
}

void print_node(const ExprNode& n, std::string& out) {
  switch (n.op) {
    case Op::Const: {
      double v = n.value;
      if (std::isinf(v)) {
        out += v > 0 ? "(1/0)" : "(-1/0)";
      } else {
        out += format_number(v);
      }
      return;
    }
    case Op::Var:
      out += slot_name(n.slot);
      return;
    case Op::Neg:
      out += '-';
      print_child(n.args[0].node(), 3, false, out);
      return;
    default:
      break;
  }
  if (const char* fn = function_name(n.op)) {
    out += fn;
    out += '(';
    print_node(n.args[0].node(), out);
    out += ')';
    return;
  }
  int p = precedence(n);
  const char* sym = n.op == Op::Add   ? " + "
                    : n.op == Op::Sub ? " - "
                    : n.op == Op::Mul ? "*"
                    : n.op == Op::Div ? "/"
                                      : "^";
  print_child(n.args[0].node(), p, false, out);
  out += sym;
  print_child(n.args[1].node(), p, true, out);
}

}  // namespace

std::string Expression::to_string() const {
  std::string out;
  print_node(*node_, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    Expression e = parse_sum();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expression parse_sum() {
    Expression lhs = parse_product();
    while (true) {
      if (accept('+')) {
        lhs = Expression::binary(Op::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = Expression::binary(Op::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  Expression parse_product() {
    Expression lhs = parse_unary();
    while (true) {
      if (accept('*')) {
        lhs = Expression::binary(Op::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = Expression::binary(Op::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expression parse_unary() {
    if (accept('-')) return Expression::unary(Op::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expression parse_power() {
    Expression lhs = parse_primary();
    while (accept('^')) lhs = Expression::binary(Op::Pow, lhs, parse_exponent());
    return lhs;
  }

  Expression parse_exponent() {
    if (accept('-')) return Expression::unary(Op::Neg, parse_exponent());
    if (accept('+')) return parse_exponent();
    return parse_primary();
  }

  Expression parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression e = parse_sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expression parse_number() {
    std::size_t start = pos_;
    double v = 0.0;
    auto [ptr, ec] =
        std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v, std::chars_format::general);
    if (ec != std::errc{}) throw ParseError("malformed number", start);
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return Expression::constant(v);
  }

  Expression parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      static const std::map<std::string_view, Op> functions = {
          {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp},  {"ln", Op::Ln},
          {"abs", Op::Abs}, {"sign", Op::Sign}};
      auto it = functions.find(name);
      if (it == functions.end())
        throw ParseError("unknown function '" + std::string(name) + "'", start);
      ++pos_;
      Expression arg = parse_sum();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return Expression::unary(it->second, arg);
    }
    if (name == "pi") return Expression::constant(std::numbers::pi);
    if (name == "e") return Expression::constant(std::numbers::e);
    if (auto s = slot_from_name(name)) return Expression::variable(*s);
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expression(std::string_view text) { return Parser(text).parse(); }

double evaluate(const Expression& e, const std::map<std::string, double>& bindings) {
  Bindings b;
  for (const auto& [name, v] : bindings) b.set(name, v);
  return e.evaluate(b);
}

// ---------------------------------------------------------------------------
// Compiled evaluation

namespace {

struct CompileState {
  int depth = 0;
  int max_depth = 0;
  int max_slot = -1;
};

}  // namespace

CompiledExpression::CompiledExpression(const Expression& e) {
  if (e.free_slots().empty()) {
    constant_ = e.evaluate(Bindings{});
    required_slots_ = 0;
    return;
  }
  CompileState st;
  // Iterative post-order emission keeps deep trees off the call stack.
  struct Frame {
    const ExprNode* node;
    std::size_t next_child;
  };
  std::vector<Frame> stack{{&e.node(), 0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_child < f.node->args.size()) {
      const ExprNode* child = &f.node->args[f.next_child].node();
      ++f.next_child;
      stack.push_back({child, 0});
      continue;
    }
    const ExprNode& n = *f.node;
    program_.push_back({n.op, n.value, n.slot});
    if (n.op == Op::Const || n.op == Op::Var) {
      ++st.depth;
      if (n.op == Op::Var) st.max_slot = std::max(st.max_slot, n.slot);
    } else if (!is_unary(n.op)) {
      --st.depth;
    }
    st.max_depth = std::max(st.max_depth, st.depth);
    stack.pop_back();
  }
  max_depth_ = st.max_depth;
  required_slots_ = st.max_slot + 1;
}

double CompiledExpression::operator()(std::span<const double> slots) const {
  if (constant_) return *constant_;
  constexpr int kInline = 32;
  std::array<double, kInline> small{};
  std::vector<double> big;
  double* st = small.data();
  if (max_depth_ > kInline) {
    big.resize(max_depth_);
    st = big.data();
  }
  int top = -1;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::Const:
        st[++top] = in.value;
        break;
      case Op::Var:
        st[++top] = slots[in.slot];
        break;
      case Op::Add:
        st[top - 1] += st[top];
        --top;
        break;
      case Op::Sub:
        st[top - 1] -= st[top];
        --top;
        break;
      case Op::Mul:
        st[top - 1] *= st[top];
        --top;
        break;
      case Op::Div:
      case Op::Pow:
        st[top - 1] = apply_binary(in.op, st[top - 1], st[top]);
        --top;
        break;
      case Op::Neg:
        st[top] = -st[top];
        break;
      default:
        st[top] = apply_unary(in.op, st[top]);
        break;
    }
  }
  return st[0];
}

}  // namespace perihyp
