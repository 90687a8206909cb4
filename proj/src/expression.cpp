#include "gmopt/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace gmopt {

namespace {

struct Token {
  enum class Type { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };
  Type type;
  double number = 0.0;
  std::string text;
  std::size_t pos = 0;  // 1-based offset in the source
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    current_.pos = i_ + 1;
    if (i_ >= src_.size()) {
      current_.type = Token::Type::End;
      return;
    }
    const char c = src_[i_];
    // U+2212 (minus sign) is accepted as '-' so pasted formulas work.
    if (static_cast<unsigned char>(c) == 0xE2 && i_ + 2 < src_.size() &&
        static_cast<unsigned char>(src_[i_ + 1]) == 0x88 &&
        static_cast<unsigned char>(src_[i_ + 2]) == 0x92) {
      current_.type = Token::Type::Minus;
      i_ += 3;
      return;
    }
    switch (c) {
      case '+': current_.type = Token::Type::Plus; ++i_; return;
      case '-': current_.type = Token::Type::Minus; ++i_; return;
      case '*': current_.type = Token::Type::Star; ++i_; return;
      case '/': current_.type = Token::Type::Slash; ++i_; return;
      case '^': current_.type = Token::Type::Caret; ++i_; return;
      case '(': current_.type = Token::Type::LParen; ++i_; return;
      case ')': current_.type = Token::Type::RParen; ++i_; return;
      case ',': current_.type = Token::Type::Comma; ++i_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
      const char* begin = src_.c_str() + i_;
      char* end = nullptr;
      current_.number = std::strtod(begin, &end);
      current_.type = Token::Type::Number;
      i_ += static_cast<std::size_t>(end - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) ++j;
      current_.type = Token::Type::Ident;
      current_.text = src_.substr(i_, j - i_);
      i_ = j;
      return;
    }
    throw std::invalid_argument("unexpected character '" + std::string(1, c) +
                                "' at position " + std::to_string(i_ + 1));
  }

  const std::string& src_;
  std::size_t i_ = 0;
  Token current_;
};

}  // namespace

class ExpressionParser {
 public:
  explicit ExpressionParser(const std::string& src) : lexer_(src) {}

  Expression run(const std::string& src) {
    Expression e;
    e.source_ = src;
    parse_sum(e);
    const Token& t = lexer_.peek();
    if (t.type != Token::Type::End) {
      throw std::invalid_argument("unexpected input at position " + std::to_string(t.pos));
    }
    e.max_variable_ = max_variable_;
    return e;
  }

 private:
  using Op = Expression::Op;

  void emit(Expression& e, Op op, double value = 0.0, std::size_t index = 0) {
    e.program_.push_back({op, value, index});
  }

  void parse_sum(Expression& e) {
    parse_product(e);
    while (true) {
      const Token::Type t = lexer_.peek().type;
      if (t == Token::Type::Plus) {
        lexer_.take();
        parse_product(e);
        emit(e, Op::Add);
      } else if (t == Token::Type::Minus) {
        lexer_.take();
        parse_product(e);
        emit(e, Op::Sub);
      } else {
        return;
      }
    }
  }

  void parse_product(Expression& e) {
    parse_factor(e);
    while (true) {
      const Token::Type t = lexer_.peek().type;
      if (t == Token::Type::Star) {
        lexer_.take();
        parse_factor(e);
        emit(e, Op::Mul);
      } else if (t == Token::Type::Slash) {
        lexer_.take();
        parse_factor(e);
        emit(e, Op::Div);
      } else {
        return;
      }
    }
  }

  // factor := '-' factor | power;  power := atom ('^' factor)?
  void parse_factor(Expression& e) {
    if (lexer_.peek().type == Token::Type::Minus) {
      lexer_.take();
      parse_factor(e);
      emit(e, Op::Neg);
      return;
    }
    parse_atom(e);
    if (lexer_.peek().type == Token::Type::Caret) {
      lexer_.take();
      parse_factor(e);
      emit(e, Op::Pow);
    }
  }

  void parse_atom(Expression& e) {
    Token t = lexer_.take();
    switch (t.type) {
      case Token::Type::Number:
        emit(e, Op::PushConst, t.number);
        return;
      case Token::Type::LParen: {
        parse_sum(e);
        expect(Token::Type::RParen, ")");
        return;
      }
      case Token::Type::Ident: {
        if (lexer_.peek().type == Token::Type::LParen) {
          parse_call(e, t);
          return;
        }
        emit(e, Op::PushVar, 0.0, variable_index(t));
        return;
      }
      default:
        throw std::invalid_argument("expected a value at position " + std::to_string(t.pos));
    }
  }

  void parse_call(Expression& e, const Token& name) {
    lexer_.take();  // '('
    std::size_t arity = 0;
    if (lexer_.peek().type != Token::Type::RParen) {
      parse_sum(e);
      arity = 1;
      while (lexer_.peek().type == Token::Type::Comma) {
        lexer_.take();
        parse_sum(e);
        ++arity;
      }
    }
    expect(Token::Type::RParen, ")");
    if (name.text == "abs") {
      if (arity != 1) {
        throw std::invalid_argument("abs expects 1 argument at position " +
                                    std::to_string(name.pos));
      }
      emit(e, Op::Abs);
      return;
    }
    if (name.text == "min" || name.text == "max") {
      if (arity < 2) {
        throw std::invalid_argument(name.text + " expects at least 2 arguments at position " +
                                    std::to_string(name.pos));
      }
      for (std::size_t k = 1; k < arity; ++k) {
        emit(e, name.text == "min" ? Op::Min : Op::Max);
      }
      return;
    }
    throw std::invalid_argument("unknown function '" + name.text + "' at position " +
                                std::to_string(name.pos));
  }

  std::size_t variable_index(const Token& t) {
    const std::string& s = t.text;
    if (s.size() >= 2 && s[0] == 'x' && s[1] != '0') {
      bool digits = true;
      for (std::size_t i = 1; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
          digits = false;
          break;
        }
      }
      if (digits) {
        const std::size_t idx = std::stoul(s.substr(1));
        max_variable_ = std::max(max_variable_, idx);
        return idx;
      }
    }
    throw std::invalid_argument("unknown identifier '" + s + "' at position " +
                                std::to_string(t.pos));
  }

  void expect(Token::Type type, const char* what) {
    Token t = lexer_.take();
    if (t.type != type) {
      throw std::invalid_argument("expected '" + std::string(what) + "' at position " +
                                  std::to_string(t.pos));
    }
  }

  Lexer lexer_;
  std::size_t max_variable_ = 0;
};

Expression Expression::parse(const std::string& src) {
  return ExpressionParser(src).run(src);
}

double Expression::evaluate(const GroundPoint& z) const {
  std::vector<double> stack;
  stack.reserve(8);
  auto pop = [&stack]() {
    const double v = stack.back();
    stack.pop_back();
    return v;
  };
  for (const Instr& ins : program_) {
    switch (ins.op) {
      case Op::PushConst:
        stack.push_back(ins.value);
        break;
      case Op::PushVar:
        if (ins.index > z.size()) {
          throw std::domain_error("expression references x" + std::to_string(ins.index) +
                                  " but the point has dimension " + std::to_string(z.size()));
        }
        stack.push_back(z[ins.index - 1]);
        break;
      case Op::Neg:
        stack.back() = -stack.back();
        break;
      case Op::Abs:
        stack.back() = std::abs(stack.back());
        break;
      case Op::Add: {
        const double b = pop();
        stack.back() += b;
        break;
      }
      case Op::Sub: {
        const double b = pop();
        stack.back() -= b;
        break;
      }
      case Op::Mul: {
        const double b = pop();
        stack.back() *= b;
        break;
      }
      case Op::Div: {
        const double b = pop();
        stack.back() /= b;
        break;
      }
      case Op::Pow: {
        const double b = pop();
        stack.back() = std::pow(stack.back(), b);
        break;
      }
      case Op::Min: {
        const double b = pop();
        stack.back() = std::min(stack.back(), b);
        break;
      }
      case Op::Max: {
        const double b = pop();
        stack.back() = std::max(stack.back(), b);
        break;
      }
    }
    if (!std::isfinite(stack.back())) {
      throw std::domain_error("expression '" + source_ + "' produced a non-finite value");
    }
  }
  return stack.back();
}

}  // namespace gmopt
