#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mos/errors.hpp"

namespace mos {

/// Immutable arithmetic expression tree over named variables.
///
/// Grammar: + - * / ^ (right associative), unary minus, parentheses,
/// sin cos tan exp log sqrt abs, constants pi and e, decimal literals.
class Expr {
 public:
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Call };
  enum class Fn { Sin, Cos, Tan, Exp, Log, Sqrt, Abs };

  using Ptr = std::shared_ptr<const Expr>;

  static Ptr constant(double v) { return make(Kind::Const, v, 0, {}, {}); }
  static Ptr variable(std::size_t index) {
    return make(Kind::Var, 0.0, index, {}, {});
  }
  static Ptr add(Ptr a, Ptr b);
  static Ptr sub(Ptr a, Ptr b);
  static Ptr mul(Ptr a, Ptr b);
  static Ptr div(Ptr a, Ptr b);
  static Ptr pow(Ptr a, Ptr b);
  static Ptr neg(Ptr a);
  static Ptr call(Fn fn, Ptr a);

  Kind kind() const { return kind_; }
  double value() const { return value_; }
  std::size_t var_index() const { return index_; }
  Fn fn() const { return fn_; }
  const Ptr& left() const { return left_; }
  const Ptr& right() const { return right_; }

  /// Evaluates with vars[i] bound to the i-th variable name given at parse.
  double eval(std::span<const double> vars) const {
    switch (kind_) {
      case Kind::Const: return value_;
      case Kind::Var: return vars[index_];
      case Kind::Add: return left_->eval(vars) + right_->eval(vars);
      case Kind::Sub: return left_->eval(vars) - right_->eval(vars);
      case Kind::Mul: return left_->eval(vars) * right_->eval(vars);
      case Kind::Div: return left_->eval(vars) / right_->eval(vars);
      case Kind::Pow: return std::pow(left_->eval(vars), right_->eval(vars));
      case Kind::Neg: return -left_->eval(vars);
      case Kind::Call: {
        const double a = left_->eval(vars);
        switch (fn_) {
          case Fn::Sin: return std::sin(a);
          case Fn::Cos: return std::cos(a);
          case Fn::Tan: return std::tan(a);
          case Fn::Exp: return std::exp(a);
          case Fn::Log: return std::log(a);
          case Fn::Sqrt: return std::sqrt(a);
          case Fn::Abs: return std::abs(a);
        }
      }
    }
    return 0.0;  // unreachable
  }

  double eval1(double x) const { return eval(std::span<const double>(&x, 1)); }

  /// Symbolic derivative with respect to variable `index`.
  Ptr derivative(std::size_t index) const;

  std::string str() const { return str_prec(0); }

  bool is_const(double v) const { return kind_ == Kind::Const && value_ == v; }

 private:
  static Ptr make(Kind k, double v, std::size_t idx, Ptr l, Ptr r) {
    auto e = std::make_shared<Expr>();
    e->kind_ = k;
    e->value_ = v;
    e->index_ = idx;
    e->left_ = std::move(l);
    e->right_ = std::move(r);
    return e;
  }
  static Ptr make_call(Fn fn, Ptr a) {
    auto e = std::make_shared<Expr>();
    e->kind_ = Kind::Call;
    e->fn_ = fn;
    e->left_ = std::move(a);
    return e;
  }

  std::string str_prec(int parent) const;

 public:
  Expr() = default;  // for make_shared; not part of the public interface

 private:
  Kind kind_ = Kind::Const;
  double value_ = 0.0;
  std::size_t index_ = 0;
  Fn fn_ = Fn::Sin;
  Ptr left_;
  Ptr right_;
};

inline Expr::Ptr Expr::add(Ptr a, Ptr b) {
  if (a->kind() == Kind::Const && b->kind() == Kind::Const)
    return constant(a->value() + b->value());
  if (a->is_const(0)) return b;
  if (b->is_const(0)) return a;
  return make(Kind::Add, 0, 0, std::move(a), std::move(b));
}

inline Expr::Ptr Expr::sub(Ptr a, Ptr b) {
  if (a->kind() == Kind::Const && b->kind() == Kind::Const)
    return constant(a->value() - b->value());
  if (b->is_const(0)) return a;
  if (a->is_const(0)) return neg(std::move(b));
  return make(Kind::Sub, 0, 0, std::move(a), std::move(b));
}

inline Expr::Ptr Expr::mul(Ptr a, Ptr b) {
  if (a->kind() == Kind::Const && b->kind() == Kind::Const)
    return constant(a->value() * b->value());
  if (a->is_const(0) || b->is_const(0)) return constant(0);
  if (a->is_const(1)) return b;
  if (b->is_const(1)) return a;
  return make(Kind::Mul, 0, 0, std::move(a), std::move(b));
}

inline Expr::Ptr Expr::div(Ptr a, Ptr b) {
  if (a->kind() == Kind::Const && b->kind() == Kind::Const && b->value() != 0)
    return constant(a->value() / b->value());
  if (a->is_const(0)) return constant(0);
  if (b->is_const(1)) return a;
  return make(Kind::Div, 0, 0, std::move(a), std::move(b));
}

inline Expr::Ptr Expr::pow(Ptr a, Ptr b) {
  if (a->kind() == Kind::Const && b->kind() == Kind::Const)
    return constant(std::pow(a->value(), b->value()));
  if (b->is_const(1)) return a;
  if (b->is_const(0)) return constant(1);
  return make(Kind::Pow, 0, 0, std::move(a), std::move(b));
}

inline Expr::Ptr Expr::neg(Ptr a) {
  if (a->kind() == Kind::Const) return constant(-a->value());
  return make(Kind::Neg, 0, 0, std::move(a), {});
}

inline Expr::Ptr Expr::call(Fn fn, Ptr a) {
  if (a->kind() == Kind::Const) {
    const double v = a->value();
    switch (fn) {
      case Fn::Sin: return constant(std::sin(v));
      case Fn::Cos: return constant(std::cos(v));
      case Fn::Tan: return constant(std::tan(v));
      case Fn::Exp: return constant(std::exp(v));
      case Fn::Log: return constant(std::log(v));
      case Fn::Sqrt: return constant(std::sqrt(v));
      case Fn::Abs: return constant(std::abs(v));
    }
  }
  return make_call(fn, std::move(a));
}

inline Expr::Ptr Expr::derivative(std::size_t index) const {
  switch (kind_) {
    case Kind::Const: return constant(0);
    case Kind::Var: return constant(index_ == index ? 1 : 0);
    case Kind::Add:
      return add(left_->derivative(index), right_->derivative(index));
    case Kind::Sub:
      return sub(left_->derivative(index), right_->derivative(index));
    case Kind::Mul:
      return add(mul(left_->derivative(index), right_),
                 mul(left_, right_->derivative(index)));
    case Kind::Div:
      return div(sub(mul(left_->derivative(index), right_),
                     mul(left_, right_->derivative(index))),
                 mul(right_, right_));
    case Kind::Pow: {
      if (right_->kind() == Kind::Const) {
        const double c = right_->value();
        return mul(mul(constant(c), pow(left_, constant(c - 1))),
                   left_->derivative(index));
      }
      // general case: (f^g)' = f^g * (g' log f + g f' / f)
      auto self = pow(left_, right_);
      auto t1 = mul(right_->derivative(index), call(Fn::Log, left_));
      auto t2 = div(mul(right_, left_->derivative(index)), left_);
      return mul(self, add(t1, t2));
    }
    case Kind::Neg: return neg(left_->derivative(index));
    case Kind::Call: {
      auto inner = left_->derivative(index);
      switch (fn_) {
        case Fn::Sin: return mul(call(Fn::Cos, left_), inner);
        case Fn::Cos: return neg(mul(call(Fn::Sin, left_), inner));
        case Fn::Tan:
          return div(inner, mul(call(Fn::Cos, left_), call(Fn::Cos, left_)));
        case Fn::Exp: return mul(call(Fn::Exp, left_), inner);
        case Fn::Log: return div(inner, left_);
        case Fn::Sqrt:
          return div(inner, mul(constant(2), call(Fn::Sqrt, left_)));
        case Fn::Abs:
          return mul(div(left_, call(Fn::Abs, left_)), inner);
      }
    }
  }
  return constant(0);  // unreachable
}

inline std::string Expr::str_prec(int parent) const {
  auto wrap = [&](int prec, std::string s) {
    return prec < parent ? "(" + std::move(s) + ")" : std::move(s);
  };
  switch (kind_) {
    case Kind::Const: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", value_);
      return std::string(buf);
    }
    case Kind::Var: return "$" + std::to_string(index_);
    case Kind::Add:
      return wrap(1, left_->str_prec(1) + " + " + right_->str_prec(1));
    case Kind::Sub:
      return wrap(1, left_->str_prec(1) + " - " + right_->str_prec(2));
    case Kind::Mul:
      return wrap(2, left_->str_prec(2) + "*" + right_->str_prec(2));
    case Kind::Div:
      return wrap(2, left_->str_prec(2) + "/" + right_->str_prec(3));
    case Kind::Pow:
      return wrap(4, left_->str_prec(5) + "^" + right_->str_prec(4));
    case Kind::Neg: return wrap(3, "-" + left_->str_prec(3));
    case Kind::Call: {
      static const char* names[] = {"sin", "cos", "tan", "exp",
                                    "log", "sqrt", "abs"};
      return std::string(names[static_cast<int>(fn_)]) + "(" +
             left_->str_prec(0) + ")";
    }
  }
  return {};
}

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view text, std::span<const std::string> vars)
      : text_(text), vars_(vars) {}

  Expr::Ptr parse() {
    auto e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  Expr::Ptr parse_expr() {
    auto e = parse_term();
    for (;;) {
      skip_ws();
      if (consume('+')) e = Expr::add(e, parse_term());
      else if (consume('-')) e = Expr::sub(e, parse_term());
      else return e;
    }
  }

  Expr::Ptr parse_term() {
    auto e = parse_unary();
    for (;;) {
      skip_ws();
      if (consume('*')) e = Expr::mul(e, parse_unary());
      else if (consume('/')) e = Expr::div(e, parse_unary());
      else return e;
    }
  }

  Expr::Ptr parse_unary() {
    skip_ws();
    if (consume('-')) return Expr::neg(parse_unary());
    return parse_power();
  }

  Expr::Ptr parse_power() {
    auto base = parse_primary();
    skip_ws();
    if (consume('^')) return Expr::pow(base, parse_unary());
    return base;
  }

  Expr::Ptr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (consume('(')) {
      auto e = parse_expr();
      skip_ws();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Expr::Ptr parse_number() {
    // strtod needs a terminated buffer; a literal never exceeds 63 chars.
    const std::string chunk(text_.substr(pos_, 63));
    char* end = nullptr;
    const double v = std::strtod(chunk.c_str(), &end);
    if (end == chunk.c_str()) throw ParseError("malformed number", pos_);
    pos_ += static_cast<std::size_t>(end - chunk.c_str());
    return Expr::constant(v);
  }

  Expr::Ptr parse_ident() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      auto arg = parse_expr();
      skip_ws();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      if (name == "sin") return Expr::call(Expr::Fn::Sin, arg);
      if (name == "cos") return Expr::call(Expr::Fn::Cos, arg);
      if (name == "tan") return Expr::call(Expr::Fn::Tan, arg);
      if (name == "exp") return Expr::call(Expr::Fn::Exp, arg);
      if (name == "log") return Expr::call(Expr::Fn::Log, arg);
      if (name == "sqrt") return Expr::call(Expr::Fn::Sqrt, arg);
      if (name == "abs") return Expr::call(Expr::Fn::Abs, arg);
      throw ParseError("unknown function '" + name + "'", start);
    }
    if (name == "pi") return Expr::constant(3.14159265358979323846);
    if (name == "e") return Expr::constant(2.71828182845904523536);
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return Expr::variable(i);
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string_view text_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text` over the given variable names; throws ParseError.
inline Expr::Ptr parse_expression(std::string_view text,
                                  std::span<const std::string> vars) {
  return detail::ExprParser(text, vars).parse();
}

inline Expr::Ptr parse_expression(std::string_view text,
                                  const std::string& var) {
  const std::string names[] = {var};
  return parse_expression(text, names);
}

}  // namespace mos
