#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gmopt/measures.hpp"

namespace gmopt {

/// Arithmetic expression over coordinates x1..xn with + - * / ^, unary
/// minus, abs/min/max, and numeric literals. Parsed once into a postfix
/// program, then evaluated per point.
///
/// Precedence: ^ (right-associative) > unary - > * / > + -; the binary
/// operators are left-associative. The exponent of ^ may itself carry a
/// unary minus, so 2^-3 parses as 2^(-3) and -x1^2 as -(x1^2).
class Expression {
 public:
  /// Parses `src`. Throws std::invalid_argument with the 1-based offset of
  /// the offending token on syntax errors and unknown identifiers.
  static Expression parse(const std::string& src);

  /// Evaluates at z, reading x_k from z[k-1]. Throws std::domain_error when
  /// a referenced coordinate exceeds z's dimension or any intermediate
  /// value is not finite.
  double evaluate(const GroundPoint& z) const;

  /// Highest coordinate index referenced (1-based); 0 for constants.
  std::size_t max_variable() const { return max_variable_; }

  const std::string& source() const { return source_; }

 private:
  enum class Op : unsigned char {
    PushConst,
    PushVar,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Abs,
    Min,
    Max,
  };
  struct Instr {
    Op op;
    double value = 0.0;     // PushConst payload
    std::size_t index = 0;  // PushVar payload, 1-based
  };

  Expression() = default;

  std::string source_;
  std::vector<Instr> program_;
  std::size_t max_variable_ = 0;

  friend class ExpressionParser;
};

}  // namespace gmopt
