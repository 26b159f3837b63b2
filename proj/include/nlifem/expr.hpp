#pragma once

// Minimal expression parser for custom problem definitions: one variable x,
// arithmetic + - * / ^, parentheses, unary minus, a handful of functions and
// the constants pi and e. Derivatives of parsed expressions are taken by
// five-point finite differences.

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include "nlifem/common.hpp"
#include "nlifem/field.hpp"

namespace nlifem {
namespace expr {

struct Node {
  virtual ~Node() = default;
  virtual double eval(double x) const = 0;
};
using NodePtr = std::shared_ptr<const Node>;

struct Num : Node {
  double v;
  explicit Num(double v) : v(v) {}
  double eval(double) const override { return v; }
};
struct Var : Node {
  double eval(double x) const override { return x; }
};
struct Bin : Node {
  char op;
  NodePtr l, r;
  Bin(char op, NodePtr l, NodePtr r) : op(op), l(l), r(r) {}
  double eval(double x) const override {
    double a = l->eval(x), b = r->eval(x);
    switch (op) {
      case '+': return a + b;
      case '-': return a - b;
      case '*': return a * b;
      case '/': return a / b;
      default: return std::pow(a, b);
    }
  }
};
struct Neg : Node {
  NodePtr c;
  explicit Neg(NodePtr c) : c(c) {}
  double eval(double x) const override { return -c->eval(x); }
};
struct Call : Node {
  double (*fn)(double);
  NodePtr c;
  Call(double (*fn)(double), NodePtr c) : fn(fn), c(c) {}
  double eval(double x) const override { return fn(c->eval(x)); }
};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = sum();
    skip_ws();
    require(pos_ == s_.size(), "expr: trailing input at '" + s_.substr(pos_) + "'");
    return e;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    NodePtr e = term();
    for (;;) {
      if (accept('+')) e = std::make_shared<Bin>('+', e, term());
      else if (accept('-')) e = std::make_shared<Bin>('-', e, term());
      else return e;
    }
  }
  NodePtr term() {
    NodePtr e = unary();
    for (;;) {
      if (accept('*')) e = std::make_shared<Bin>('*', e, unary());
      else if (accept('/')) e = std::make_shared<Bin>('/', e, unary());
      else return e;
    }
  }
  NodePtr unary() {
    if (accept('-')) return std::make_shared<Neg>(unary());
    return power();
  }
  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return std::make_shared<Bin>('^', base, unary());
    return base;
  }
  NodePtr atom() {
    skip_ws();
    require(pos_ < s_.size(), "expr: unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = sum();
      require(accept(')'), "expr: missing closing parenthesis");
      return e;
    }
    if (std::isdigit((unsigned char)c) || c == '.') {
      size_t used = 0;
      double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      return std::make_shared<Num>(v);
    }
    if (std::isalpha((unsigned char)c)) {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_'))
        ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return std::make_shared<Var>();
      if (name == "pi") return std::make_shared<Num>(M_PI);
      if (name == "e") return std::make_shared<Num>(std::exp(1.0));
      static const std::pair<const char*, double (*)(double)> fns[] = {
          {"sin", std::sin},   {"cos", std::cos},   {"tan", std::tan},
          {"exp", std::exp},   {"log", std::log},   {"sqrt", std::sqrt},
          {"abs", std::fabs},  {"sinh", std::sinh}, {"cosh", std::cosh},
      };
      for (auto& [fname, fp] : fns) {
        if (name == fname) {
          require(accept('('), "expr: expected '(' after " + name);
          NodePtr arg = sum();
          require(accept(')'), "expr: missing ')' after " + name);
          return std::make_shared<Call>(fp, arg);
        }
      }
      throw config_error("expr: unknown identifier '" + name + "'");
    }
    throw config_error(std::string("expr: unexpected character '") + c + "'");
  }
};

}  // namespace expr

// Compiles an expression of x to (f, f', f''); derivatives are five-point
// central differences, adequate for the convergence regimes studied here.
inline ScalarField::Piece compile_expression(const std::string& text, double lo,
                                             double hi) {
  expr::NodePtr ast = expr::Parser(text).parse();
  Fn f = [ast](double x) { return ast->eval(x); };
  Fn df = [ast](double x) {
    double h = 1e-5 * std::max(1.0, std::fabs(x));
    return (-ast->eval(x + 2 * h) + 8 * ast->eval(x + h) - 8 * ast->eval(x - h) +
            ast->eval(x - 2 * h)) /
           (12 * h);
  };
  Fn d2f = [ast](double x) {
    double h = 2e-4 * std::max(1.0, std::fabs(x));
    return (-ast->eval(x + 2 * h) + 16 * ast->eval(x + h) - 30 * ast->eval(x) +
            16 * ast->eval(x - h) - ast->eval(x - 2 * h)) /
           (12 * h * h);
  };
  return {lo, hi, std::move(f), std::move(df), std::move(d2f)};
}

}  // namespace nlifem
