#pragma once

#include <memory>
#include <string>

#include "pulshom/common.hpp"

namespace pulshom {

// Arithmetic expression over the slice variables, used for config-supplied
// data functions.  Variables: t, s, x1, x2, y1, y2; constant pi; functions
// sin, cos, tan, exp, log, sqrt, abs.  Operators + - * / ^ and parentheses.
class Expression {
 public:
  struct Vars {
    double t = 0.0, s = 0.0;
    Vec2 x{0.0, 0.0};
    Vec2 y{0.0, 0.0};
  };

  Expression() = default;  // constant zero
  explicit Expression(const std::string& text);

  double operator()(const Vars& v) const;
  const std::string& text() const { return text_; }
  bool is_zero_literal() const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace pulshom
