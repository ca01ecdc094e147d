#include "cfnet/parser.hpp"

#include <cctype>
#include <charconv>

namespace cfnet {

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& message)
    : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"),
      kind_(kind),
      offset_(offset) {}

namespace {

class Parser {
 public:
  Parser(std::string_view text, int n, const PrimitiveRegistry& registry)
      : text_(text), n_(n), registry_(registry) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { fail_at(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) {
    throw ParseError(ParseError::Kind::Syntax, at, msg);
  }

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

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(-term());
      } else {
        break;
      }
    }
    if (terms.size() == 1) return simplify(terms.front());
    return simplify(Expr::sum(std::move(terms)));
  }

  Expr term() {
    std::vector<Expr> factors{unary()};
    while (accept('*')) factors.push_back(unary());
    if (factors.size() == 1) return factors.front();
    return Expr::product(std::move(factors));
  }

  Expr unary() {
    if (accept('-')) return -unary();
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (accept('^')) {
      skip_ws();
      const std::size_t at = pos_;
      const long e = integer("exponent must be a non-negative integer literal");
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '^') {
        fail("chained '^' is ambiguous; parenthesize the base");
      }
      if (e > 1'000'000) fail_at(at, "exponent too large");
      return Expr::power(std::move(base), static_cast<int>(e));
    }
    return base;
  }

  long integer(const char* what) {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail(what);
    // A decimal point or exponent makes this not an integer literal.
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      fail_at(start, what);
    }
    long v = 0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc()) fail_at(start, "integer literal out of range");
    return v;
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t s = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - s;
    };
    std::size_t mant = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mant += digits();
    }
    if (mant == 0) fail_at(start, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail_at(start, "malformed exponent in number");
    }
    double v = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) fail_at(start, "malformed number");
    return Expr::constant(v);
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    if (name.size() > 1 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      long idx = 0;
      auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (res.ec != std::errc() || idx < 1 || idx > n_) {
        throw ParseError(ParseError::Kind::VariableOutOfRange, start,
                         "variable '" + name + "' outside x1..x" + std::to_string(n_));
      }
      return Expr::var(static_cast<int>(idx));
    }
    auto spec = registry_.find(name);
    if (!spec) {
      throw ParseError(ParseError::Kind::UnknownPrimitive, start, "unknown primitive '" + name + "'");
    }
    int order = 0;
    if (accept('[')) {
      const long d = integer("derivative order must be a non-negative integer literal");
      if (d > 500) fail("derivative order too large");
      order = static_cast<int>(d);
      expect(']');
    }
    expect('(');
    Expr arg = expr();
    expect(')');
    return Expr::primitive(std::move(spec), order, std::move(arg));
  }

  std::string_view text_;
  int n_;
  const PrimitiveRegistry& registry_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, int n, const PrimitiveRegistry& registry) {
  if (n < 1) throw std::invalid_argument("parse_expr: state dimension must be >= 1");
  return simplify(Parser(text, n, registry).run());
}

}  // namespace cfnet
