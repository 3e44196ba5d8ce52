#include "pulshom/expression.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <vector>

namespace pulshom {

struct Expression::Node {
  enum class Op { constant, variable, add, sub, mul, div, pow, neg, call };
  Op op = Op::constant;
  double value = 0.0;
  int var = 0;  // 0:t 1:s 2:x1 3:x2 4:y1 5:y2
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> a, b;

  double eval(const Vars& v) const {
    switch (op) {
      case Op::constant: return value;
      case Op::variable:
        switch (var) {
          case 0: return v.t;
          case 1: return v.s;
          case 2: return v.x.x;
          case 3: return v.x.y;
          case 4: return v.y.x;
          default: return v.y.y;
        }
      case Op::add: return a->eval(v) + b->eval(v);
      case Op::sub: return a->eval(v) - b->eval(v);
      case Op::mul: return a->eval(v) * b->eval(v);
      case Op::div: return a->eval(v) / b->eval(v);
      case Op::pow: return std::pow(a->eval(v), b->eval(v));
      case Op::neg: return -a->eval(v);
      case Op::call: return fn(a->eval(v));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("expression error at position " + std::to_string(pos_) + ": " + why +
                      " in '" + s_ + "'");
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr make(Node::Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr expr() {
    NodePtr e = term();
    while (true) {
      if (eat('+'))
        e = make(Node::Op::add, e, term());
      else if (eat('-'))
        e = make(Node::Op::sub, e, term());
      else
        return e;
    }
  }

  NodePtr term() {
    NodePtr e = unary();
    while (true) {
      if (eat('*'))
        e = make(Node::Op::mul, e, unary());
      else if (eat('/'))
        e = make(Node::Op::div, e, unary());
      else
        return e;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Node::Op::neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (eat('^')) return make(Node::Op::pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (...) {
        fail("bad number");
      }
      pos_ += used;
      auto n = std::make_shared<Node>();
      n->op = Node::Op::constant;
      n->value = v;
      return n;
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t end = pos_;
      while (end < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
        ++end;
      const std::string name = s_.substr(pos_, end - pos_);
      pos_ = end;
      if (name == "pi") {
        auto n = std::make_shared<Node>();
        n->op = Node::Op::constant;
        n->value = kPi;
        return n;
      }
      static const std::vector<std::pair<std::string, int>> vars = {
          {"t", 0}, {"s", 1}, {"x1", 2}, {"x2", 3}, {"y1", 4}, {"y2", 5}};
      for (const auto& [vn, idx] : vars) {
        if (name == vn) {
          auto n = std::make_shared<Node>();
          n->op = Node::Op::variable;
          n->var = idx;
          return n;
        }
      }
      static const std::vector<std::pair<std::string, double (*)(double)>> fns = {
          {"sin", std::sin},  {"cos", std::cos},   {"tan", std::tan}, {"exp", std::exp},
          {"log", std::log},  {"sqrt", std::sqrt}, {"abs", std::fabs}};
      for (const auto& [fn_name, fn] : fns) {
        if (name == fn_name) {
          if (!eat('(')) fail("function '" + name + "' needs parentheses");
          NodePtr arg = expr();
          if (!eat(')')) fail("missing ')' after function argument");
          auto n = std::make_shared<Node>();
          n->op = Node::Op::call;
          n->fn = fn;
          n->a = arg;
          return n;
        }
      }
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& text) : text_(text) {
  root_ = Parser(text).parse();
}

double Expression::operator()(const Vars& v) const {
  if (!root_) return 0.0;
  return root_->eval(v);
}

bool Expression::is_zero_literal() const {
  if (!root_) return true;
  return root_->op == Node::Op::constant && root_->value == 0.0;
}

}  // namespace pulshom
