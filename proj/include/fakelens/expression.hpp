#pragma once

// A small expression language over Q[chi]/I<K>:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | juxtaposition) unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' '-'? integer)?
//   primary := integer | '(' expr ')' | 'chi' | 'f' | 'fk(' integer ')' | 'fpk(' integer ')'
//
// A negative exponent inverts. U+2212 is accepted for '-' and U+00B7 for '*'.

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "fakelens/errors.hpp"
#include "fakelens/ring.hpp"

namespace fakelens {

namespace detail {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, int level) : text_(text), level_(level) {}

  RingElement parse() {
    RingElement v = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression: " + what + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  bool eat_minus() { return eat("-") || eat("−"); }
  bool eat_times() { return eat("*") || eat("·"); }

  bool starts_primary() {
    skip_space();
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || std::isalpha(static_cast<unsigned char>(c)) || c == '(';
  }

  mpz_class integer() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    return mpz_class(std::string(text_.substr(start, pos_ - start)));
  }

  std::uint64_t odd_argument() {
    if (!eat("(")) fail("expected '('");
    const mpz_class k = integer();
    if (!eat(")")) fail("expected ')'");
    if (!k.fits_ulong_p() || mpz_even_p(k.get_mpz_t())) fail("argument must be a positive odd integer");
    return k.get_ui();
  }

  RingElement expr() {
    RingElement v = term();
    for (;;) {
      if (eat("+"))
        v += term();
      else if (eat_minus())
        v -= term();
      else
        return v;
    }
  }

  RingElement term() {
    RingElement v = unary();
    for (;;) {
      if (eat_times())
        v *= unary();
      else if (starts_primary())
        v *= unary();
      else
        return v;
    }
  }

  RingElement unary() {
    if (eat_minus()) return -unary();
    return power();
  }

  RingElement power() {
    RingElement base = primary();
    if (!eat("^")) return base;
    const bool negative = eat_minus();
    const mpz_class e = integer();
    if (!e.fits_uint_p()) fail("exponent too large");
    RingElement v = base.pow(static_cast<unsigned>(e.get_ui()));
    return negative ? v.inverse() : v;
  }

  RingElement primary() {
    skip_space();
    if (eat("(")) {
      RingElement v = expr();
      if (!eat(")")) fail("expected ')'");
      return v;
    }
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      return RingElement::one(level_) * mpq_class(integer());
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "chi") return RingElement::chi_power(level_, 1);
    if (name == "f") return element_f(level_);
    if (name == "fk") return element_f_k(level_, odd_argument());
    if (name == "fpk") return element_f_prime(level_, odd_argument());
    pos_ = start;
    fail(name.empty() ? "expected a value" : "unknown name '" + std::string(name) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int level_;
};

}  // namespace detail

/// Evaluates an expression in Q[chi]/I<level>. Throws ParseError on bad
/// syntax and NotInvertible for a negative power of a non-unit.
inline RingElement parse_expression(std::string_view text, int level) {
  detail::check_level(level);
  return detail::ExpressionParser(text, level).parse();
}

}  // namespace fakelens
