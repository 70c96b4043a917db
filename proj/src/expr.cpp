#include "pconvex/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

#include "pconvex/error.hpp"

namespace pconvex {

enum class Op {
  constant,
  variable,
  norm,
  norm2,
  neg,
  add,
  sub,
  mul,
  div,
  pow,
  sin,
  cos,
  exp,
  sqrt,
  log
};

struct ExprNode {
  Op op = Op::constant;
  double c = 0.0;
  std::size_t var = 0;
  std::shared_ptr<const ExprNode> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_const(double c) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::constant;
  n->c = c;
  return n;
}

NodePtr make_node(Op op, NodePtr a, NodePtr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

class Parser {
public:
  Parser(std::string_view s, std::size_t n) : s_(s), n_(n) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size())
      fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(msg + " at column " + std::to_string(pos_ + 1) + " in \"" +
                     std::string(s_) + "\"");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool eat(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat("+"))
        lhs = make_node(Op::add, lhs, term());
      else if (eat("-"))
        lhs = make_node(Op::sub, lhs, term());
      else
        return lhs;
    }
  }

  bool eat_times() {
    skip();
    // '**' is a power, not a product
    if (s_.substr(pos_, 2) == "**")
      return false;
    return eat("*") || eat("·");
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat_times())
        lhs = make_node(Op::mul, lhs, unary());
      else if (eat("/"))
        lhs = make_node(Op::div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (eat("-"))
      return make_node(Op::neg, unary());
    if (eat("+"))
      return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (eat("^") || eat("**"))
      return make_node(Op::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size())
      fail("unexpected end of input");
    const char ch = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.')
      return number();
    if (eat("(")) {
      NodePtr e = expr();
      if (!eat(")"))
        fail("expected ')'");
      return e;
    }
    if (eat("|x|")) {
      auto n = std::make_shared<ExprNode>();
      n->op = Op::norm;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)))
      return identifier();
    fail("unexpected '" + std::string(1, ch) + "'");
  }

  NodePtr number() {
    const char *begin = s_.data() + pos_;
    char *end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin)
      fail("bad number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_const(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    if (id == "pi")
      return make_const(std::numbers::pi);
    if (id == "e")
      return make_const(std::numbers::e);
    if (id == "r2") {
      auto n = std::make_shared<ExprNode>();
      n->op = Op::norm2;
      return n;
    }
    if (id.size() > 1 && id[0] == 'x' &&
        id.find_first_not_of("0123456789", 1) == std::string::npos) {
      const std::size_t k = std::stoul(id.substr(1));
      if (k < 1 || k > n_) {
        pos_ = start;
        fail("variable " + id + " outside x1..x" + std::to_string(n_));
      }
      auto n = std::make_shared<ExprNode>();
      n->op = Op::variable;
      n->var = k - 1;
      return n;
    }
    static const std::pair<const char *, Op> fns[] = {
        {"sin", Op::sin}, {"cos", Op::cos},   {"exp", Op::exp},
        {"sqrt", Op::sqrt}, {"log", Op::log}};
    for (const auto &[name, op] : fns) {
      if (id == name) {
        if (!eat("("))
          fail("expected '(' after " + id);
        NodePtr arg = expr();
        if (!eat(")"))
          fail("expected ')'");
        return make_node(op, arg);
      }
    }
    pos_ = start;
    fail("unknown identifier '" + id + "'");
  }

  std::string_view s_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

double eval(const ExprNode &e, std::span<const double> x) {
  switch (e.op) {
  case Op::constant:
    return e.c;
  case Op::variable:
    return x[e.var];
  case Op::norm:
    return norm(x);
  case Op::norm2:
    return dot(x, x);
  case Op::neg:
    return -eval(*e.lhs, x);
  case Op::add:
    return eval(*e.lhs, x) + eval(*e.rhs, x);
  case Op::sub:
    return eval(*e.lhs, x) - eval(*e.rhs, x);
  case Op::mul:
    return eval(*e.lhs, x) * eval(*e.rhs, x);
  case Op::div:
    return eval(*e.lhs, x) / eval(*e.rhs, x);
  case Op::pow:
    return std::pow(eval(*e.lhs, x), eval(*e.rhs, x));
  case Op::sin:
    return std::sin(eval(*e.lhs, x));
  case Op::cos:
    return std::cos(eval(*e.lhs, x));
  case Op::exp:
    return std::exp(eval(*e.lhs, x));
  case Op::sqrt:
    return std::sqrt(eval(*e.lhs, x));
  case Op::log:
    return std::log(eval(*e.lhs, x));
  }
  return 0.0;
}

// Second-order forward-mode value.
struct Dual2 {
  double v = 0.0;
  Vec g;
  SymMatrix h;
};

Dual2 constant(double c, std::size_t n) { return {c, Vec(n, 0.0), SymMatrix(n)}; }

// g(u) given g(u), g'(u), g''(u).
Dual2 chain(const Dual2 &u, double f0, double f1, double f2) {
  Dual2 r{f0, scaled(u.g, f1), f1 * u.h};
  if (f2 != 0.0)
    r.h += SymMatrix::outer(u.g, f2);
  return r;
}

Dual2 product(const Dual2 &a, const Dual2 &b) {
  Dual2 r{a.v * b.v, axpy(scaled(a.g, b.v), a.v, b.g), b.v * a.h};
  r.h += a.v * b.h;
  r.h += SymMatrix::sym_outer(a.g, b.g);
  return r;
}

Dual2 eval2(const ExprNode &e, std::span<const double> x) {
  const std::size_t n = x.size();
  switch (e.op) {
  case Op::constant:
    return constant(e.c, n);
  case Op::variable: {
    Dual2 r = constant(x[e.var], n);
    r.g[e.var] = 1.0;
    return r;
  }
  case Op::norm2:
    return {dot(x, x), scaled(x, 2.0), 2.0 * SymMatrix::identity(n)};
  case Op::norm: {
    const double r = norm(x);
    if (r == 0.0)
      throw EvaluationError("|x| is not differentiable at the origin");
    Dual2 out{r, scaled(x, 1.0 / r), (1.0 / r) * SymMatrix::identity(n)};
    out.h += SymMatrix::outer(x, -1.0 / (r * r * r));
    return out;
  }
  case Op::neg: {
    Dual2 a = eval2(*e.lhs, x);
    return {-a.v, scaled(a.g, -1.0), -1.0 * a.h};
  }
  case Op::add:
  case Op::sub: {
    Dual2 a = eval2(*e.lhs, x);
    Dual2 b = eval2(*e.rhs, x);
    const double s = e.op == Op::add ? 1.0 : -1.0;
    return {a.v + s * b.v, axpy(a.g, s, b.g), a.h + s * b.h};
  }
  case Op::mul:
    return product(eval2(*e.lhs, x), eval2(*e.rhs, x));
  case Op::div: {
    Dual2 b = eval2(*e.rhs, x);
    const double inv = 1.0 / b.v;
    return product(eval2(*e.lhs, x),
                   chain(b, inv, -inv * inv, 2.0 * inv * inv * inv));
  }
  case Op::pow: {
    Dual2 base = eval2(*e.lhs, x);
    if (e.rhs->op == Op::constant) {
      const double c = e.rhs->c;
      const double u = base.v;
      const double d1 = c == 0.0 ? 0.0 : c * std::pow(u, c - 1.0);
      const double d2 =
          (c == 0.0 || c == 1.0) ? 0.0 : c * (c - 1.0) * std::pow(u, c - 2.0);
      return chain(base, std::pow(u, c), d1, d2);
    }
    // a^b = exp(b log a)
    Dual2 la = chain(base, std::log(base.v), 1.0 / base.v,
                     -1.0 / (base.v * base.v));
    Dual2 ex = product(eval2(*e.rhs, x), la);
    const double ev = std::exp(ex.v);
    return chain(ex, ev, ev, ev);
  }
  case Op::sin: {
    Dual2 a = eval2(*e.lhs, x);
    return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v));
  }
  case Op::cos: {
    Dual2 a = eval2(*e.lhs, x);
    return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v));
  }
  case Op::exp: {
    Dual2 a = eval2(*e.lhs, x);
    const double ev = std::exp(a.v);
    return chain(a, ev, ev, ev);
  }
  case Op::sqrt: {
    Dual2 a = eval2(*e.lhs, x);
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
  }
  case Op::log: {
    Dual2 a = eval2(*e.lhs, x);
    return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
  }
  }
  return constant(0.0, n);
}

} // namespace

Expression Expression::parse(std::string_view text, std::size_t n) {
  if (n < 1)
    throw DimensionError("expression dimension must be positive");
  Expression e;
  e.n_ = n;
  e.text_ = std::string(text);
  e.root_ = Parser(text, n).parse();
  return e;
}

double Expression::value(std::span<const double> x) const {
  return eval(*root_, x);
}

Jet Expression::jet(std::span<const double> x, int order) const {
  Jet j;
  j.order = order;
  if (order == 0) {
    j.value = eval(*root_, x);
    return j;
  }
  Dual2 d = eval2(*root_, x);
  j.value = d.v;
  j.gradient = std::move(d.g);
  if (order >= 2)
    j.hessian = std::move(d.h);
  return j;
}

ScalarField Expression::field() const {
  Expression self = *this;
  return ScalarField(n_, [self](std::span<const double> x, int order) {
    return self.jet(x, order);
  });
}

} // namespace pconvex
