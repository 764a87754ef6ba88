#pragma once

#include <cctype>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gqw/cas/expr.hpp"
#include "gqw/errors.hpp"

namespace gqw {

namespace syntax {

enum class TokenKind { Number, Ident, Op, LParen, RParen, Comma, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  Rational number;
  std::size_t offset = 0;
};

/// Splits `src` into tokens. Decimal literals become exact rationals.
inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.offset = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::int64_t num = 0;
      std::int64_t den = 1;
      auto push_digit = [&](char d) {
        if (num > (INT64_MAX - 9) / 10) throw ParseError("numeric literal too large", t.offset);
        num = num * 10 + (d - '0');
      };
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) push_digit(src[i++]);
      if (i < src.size() && src[i] == '.') {
        ++i;
        if (i >= src.size() || !std::isdigit(static_cast<unsigned char>(src[i])))
          throw ParseError("malformed decimal literal", t.offset);
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
          push_digit(src[i++]);
          if (den > INT64_MAX / 10) throw ParseError("numeric literal too long", t.offset);
          den *= 10;
        }
      }
      t.kind = TokenKind::Number;
      t.number = Rational(num, den);
      t.text = std::string(src.substr(t.offset, i - t.offset));
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
        ++i;
      t.kind = TokenKind::Ident;
      t.text = std::string(src.substr(t.offset, i - t.offset));
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^' || c == '<' || c == '>') {
      t.kind = TokenKind::Op;
      t.text = std::string(1, c);
      ++i;
    } else if (c == '(') {
      t.kind = TokenKind::LParen;
      t.text = "(";
      ++i;
    } else if (c == ')') {
      t.kind = TokenKind::RParen;
      t.text = ")";
      ++i;
    } else if (c == ',') {
      t.kind = TokenKind::Comma;
      t.text = ",";
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.offset = src.size();
  out.push_back(end);
  return out;
}

enum class NodeKind { Number, Ident, Call, Neg, Binary };

/// Untyped syntax tree. Lowered either to an Expr or, by the exterior
/// calculus layer, to a differential form.
struct Node {
  NodeKind kind = NodeKind::Number;
  Rational number;
  std::string text;  // identifier, function name or operator
  std::vector<Node> children;
  std::size_t offset = 0;
};

/// Pratt parser. Binding powers: + - 10, * / 20, unary - 30, ^ 40 (right).
class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(tokenize(src)) {}

  Node parse_all() {
    if (peek().kind == TokenKind::End) throw ParseError("empty expression", peek().offset);
    Node n = parse(0);
    if (peek().kind != TokenKind::End) throw ParseError("unexpected '" + peek().text + "'", peek().offset);
    return n;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  static int infix_power(const Token& t) {
    if (t.kind != TokenKind::Op) return -1;
    switch (t.text[0]) {
      case '+':
      case '-': return 10;
      case '*':
      case '/': return 20;
      case '^': return 40;
      default: return -1;
    }
  }

  Node parse(int min_power) {
    Node lhs = prefix();
    for (;;) {
      const Token& op = peek();
      const int power = infix_power(op);
      if (power <= min_power) break;
      next();
      const int rbp = op.text == "^" ? power - 1 : power;
      Node rhs = parse(rbp);
      Node bin;
      bin.kind = NodeKind::Binary;
      bin.text = op.text;
      bin.offset = op.offset;
      bin.children.push_back(std::move(lhs));
      bin.children.push_back(std::move(rhs));
      lhs = std::move(bin);
    }
    return lhs;
  }

  Node prefix() {
    const Token& t = next();
    Node n;
    n.offset = t.offset;
    switch (t.kind) {
      case TokenKind::Number:
        n.kind = NodeKind::Number;
        n.number = t.number;
        return n;
      case TokenKind::Ident:
        n.text = t.text;
        if (peek().kind == TokenKind::LParen) {
          next();
          n.kind = NodeKind::Call;
          n.children.push_back(parse(0));
          while (peek().kind == TokenKind::Comma) {
            next();
            n.children.push_back(parse(0));
          }
          expect_rparen(t.offset);
        } else {
          n.kind = NodeKind::Ident;
        }
        return n;
      case TokenKind::LParen: {
        Node inner = parse(0);
        expect_rparen(t.offset);
        return inner;
      }
      case TokenKind::Op:
        if (t.text == "-") {
          n.kind = NodeKind::Neg;
          n.children.push_back(parse(30));
          return n;
        }
        if (t.text == "+") return parse(30);
        throw ParseError("unexpected operator '" + t.text + "'", t.offset);
      case TokenKind::End:
        throw ParseError("unexpected end of input", t.offset);
      default:
        throw ParseError("unexpected '" + t.text + "'", t.offset);
    }
  }

  void expect_rparen(std::size_t open_offset) {
    if (peek().kind != TokenKind::RParen) {
      if (peek().kind == TokenKind::End) throw ParseError("unclosed parenthesis", open_offset);
      throw ParseError("expected ')' but found '" + peek().text + "'", peek().offset);
    }
    next();
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

inline Node parse_tree(std::string_view src) { return Parser(src).parse_all(); }

}  // namespace syntax

/// Lowers a syntax tree to a canonical Expr over the given vocabulary.
inline Expr lower_expr(const syntax::Node& n, const std::set<std::string>& vocabulary) {
  using syntax::NodeKind;
  switch (n.kind) {
    case NodeKind::Number:
      return Expr(n.number);
    case NodeKind::Ident:
      if (n.text == "pi") return pi();
      if (n.text == "i") return imag_unit();
      if (n.text == "hbar") return hbar();
      if (!vocabulary.contains(n.text)) throw UnknownSymbolError(n.text);
      return symbol(n.text);
    case NodeKind::Call: {
      if (n.children.size() != 1)
        throw ParseError("function '" + n.text + "' takes one argument", n.offset);
      Expr a = lower_expr(n.children[0], vocabulary);
      if (n.text == "sin") return sin(a);
      if (n.text == "cos") return cos(a);
      if (n.text == "exp") return exp(a);
      if (n.text == "sqrt") return sqrt(a);
      throw ParseError("unknown function '" + n.text + "'", n.offset);
    }
    case NodeKind::Neg:
      return -lower_expr(n.children[0], vocabulary);
    case NodeKind::Binary: {
      Expr a = lower_expr(n.children[0], vocabulary);
      Expr b = lower_expr(n.children[1], vocabulary);
      switch (n.text[0]) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/':
          if (b.is_zero()) throw ParseError("division by zero", n.offset);
          return a / b;
        case '^':
          if (!b.is_number()) throw ParseError("exponent must be a rational constant", n.children[1].offset);
          if (a.is_zero() && b.value().is_negative()) throw ParseError("division by zero", n.offset);
          return pow(a, b.value());
        default:
          throw ParseError("comparison not allowed in an expression", n.offset);
      }
    }
  }
  throw ParseError("malformed syntax tree", n.offset);
}

/// Parses `text` in the expression grammar. Every free identifier must be in
/// `vocabulary`; pi, i and hbar are reserved constants.
inline Expr parse_expr(std::string_view text, const std::set<std::string>& vocabulary) {
  return lower_expr(syntax::parse_tree(text), vocabulary);
}

inline Expr parse_expr(std::string_view text, const std::vector<std::string>& vocabulary) {
  return parse_expr(text, std::set<std::string>(vocabulary.begin(), vocabulary.end()));
}

}  // namespace gqw
