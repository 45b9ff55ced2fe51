#include "fracsys/forcing_expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "fracsys/errors.hpp"

namespace fracsys {

struct ForcingExpr::Node {
  enum Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Sin, Cos } kind = Const;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;

  bool constant() const {
    switch (kind) {
      case Const: return true;
      case Var: return false;
      default: return (!a || a->constant()) && (!b || b->constant());
    }
  }

  double eval(double t) const {
    switch (kind) {
      case Const: return value;
      case Var: return t;
      case Neg: return -a->eval(t);
      case Add: return a->eval(t) + b->eval(t);
      case Sub: return a->eval(t) - b->eval(t);
      case Mul: return a->eval(t) * b->eval(t);
      case Div: return a->eval(t) / b->eval(t);
      case Pow: return std::pow(a->eval(t), b->eval(t));
      case Exp: return std::exp(a->eval(t));
      case Sin: return std::sin(a->eval(t));
      case Cos: return std::cos(a->eval(t));
    }
    return NAN;
  }
};

namespace {

using NodePtr = std::shared_ptr<const ForcingExpr::Node>;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Validation,
                "forcing expression, column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(ForcingExpr::Node::Kind k, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<ForcingExpr::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (eat('+'))
        n = make(ForcingExpr::Node::Add, n, term());
      else if (eat('-'))
        n = make(ForcingExpr::Node::Sub, n, term());
      else
        return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (eat('*'))
        n = make(ForcingExpr::Node::Mul, n, unary());
      else if (eat('/'))
        n = make(ForcingExpr::Node::Div, n, unary());
      else
        return n;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(ForcingExpr::Node::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (!eat('^')) return base;
    const std::size_t at = pos_;
    NodePtr ex = unary();
    if (!ex->constant()) {
      pos_ = at;
      fail("exponent must be a constant");
    }
    return make(ForcingExpr::Node::Pow, base, ex);
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (ec != std::errc()) fail("malformed number");
      pos_ = static_cast<std::size_t>(ptr - s_.data());
      auto n = std::make_shared<ForcingExpr::Node>();
      n->value = v;
      return n;
    }
    if (eat('(')) {
      NodePtr n = expr();
      if (!eat(')')) fail("expected ')'");
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "t") {
        auto n = std::make_shared<ForcingExpr::Node>();
        n->kind = ForcingExpr::Node::Var;
        return n;
      }
      if (name == "pi") {
        auto n = std::make_shared<ForcingExpr::Node>();
        n->value = std::numbers::pi;
        return n;
      }
      ForcingExpr::Node::Kind k;
      if (name == "exp")
        k = ForcingExpr::Node::Exp;
      else if (name == "sin")
        k = ForcingExpr::Node::Sin;
      else if (name == "cos")
        k = ForcingExpr::Node::Cos;
      else {
        pos_ = start;
        fail("unknown name '" + name + "'");
      }
      if (!eat('(')) fail("expected '(' after " + name);
      NodePtr arg = expr();
      if (!eat(')')) fail("expected ')'");
      return make(k, arg);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
};

}  // namespace

ForcingExpr::ForcingExpr() : source_("0") {
  root_ = std::make_shared<Node>();
}

ForcingExpr ForcingExpr::parse(const std::string& text) {
  ForcingExpr e;
  std::string trimmed = text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.pop_back();
  if (trimmed.find_first_not_of(" \t") == std::string::npos) return e;
  Parser p(trimmed);
  e.root_ = p.run();
  e.source_ = trimmed;
  return e;
}

double ForcingExpr::operator()(double t) const { return root_->eval(t); }

bool ForcingExpr::is_zero() const { return root_->kind == Node::Const && root_->value == 0.0; }

}  // namespace fracsys
