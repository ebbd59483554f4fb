#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fakelens/errors.hpp"

namespace fakelens {

/// Univariate polynomial with arbitrary-precision integer coefficients.
///
/// Coefficient j multiplies x^j. Trailing zeros are always trimmed, so the
/// zero polynomial has an empty coefficient vector and degree -1.
class IntPolynomial {
 public:
  IntPolynomial() = default;

  explicit IntPolynomial(std::vector<mpz_class> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  IntPolynomial(std::initializer_list<long> coeffs) {
    coeffs_.reserve(coeffs.size());
    for (long c : coeffs) coeffs_.emplace_back(c);
    trim();
  }

  static IntPolynomial constant(const mpz_class& c) { return IntPolynomial(std::vector<mpz_class>{c}); }

  static IntPolynomial monomial(std::size_t degree, const mpz_class& c = 1) {
    std::vector<mpz_class> v(degree + 1);
    v[degree] = c;
    return IntPolynomial(std::move(v));
  }

  /// (a + b*x)^e.
  static IntPolynomial binomial_power(long a, long b, unsigned e) {
    IntPolynomial base{a, b};
    IntPolynomial r = constant(1);
    for (unsigned i = 0; i < e; ++i) r *= base;
    return r;
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<mpz_class>& coefficients() const { return coeffs_; }

  mpz_class coefficient(std::size_t j) const { return j < coeffs_.size() ? coeffs_[j] : mpz_class(0); }

  mpz_class leading() const { return coeffs_.empty() ? mpz_class(0) : coeffs_.back(); }

  bool is_monic() const { return !coeffs_.empty() && coeffs_.back() == 1; }

  mpz_class evaluate(const mpz_class& x) const {
    mpz_class acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  IntPolynomial& operator+=(const IntPolynomial& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) coeffs_[j] += o.coeffs_[j];
    trim();
    return *this;
  }

  IntPolynomial& operator-=(const IntPolynomial& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) coeffs_[j] -= o.coeffs_[j];
    trim();
    return *this;
  }

  IntPolynomial& operator*=(const IntPolynomial& o) {
    if (is_zero() || o.is_zero()) {
      coeffs_.clear();
      return *this;
    }
    std::vector<mpz_class> r(coeffs_.size() + o.coeffs_.size() - 1);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (coeffs_[i] == 0) continue;
      for (std::size_t j = 0; j < o.coeffs_.size(); ++j)
        mpz_addmul(r[i + j].get_mpz_t(), coeffs_[i].get_mpz_t(), o.coeffs_[j].get_mpz_t());
    }
    coeffs_ = std::move(r);
    trim();
    return *this;
  }

  IntPolynomial& operator*=(const mpz_class& s) {
    for (auto& c : coeffs_) c *= s;
    trim();
    return *this;
  }

  friend IntPolynomial operator+(IntPolynomial a, const IntPolynomial& b) { return a += b; }
  friend IntPolynomial operator-(IntPolynomial a, const IntPolynomial& b) { return a -= b; }
  friend IntPolynomial operator*(IntPolynomial a, const IntPolynomial& b) { return a *= b; }
  friend IntPolynomial operator*(IntPolynomial a, const mpz_class& s) { return a *= s; }
  friend IntPolynomial operator*(const mpz_class& s, IntPolynomial a) { return a *= s; }
  friend IntPolynomial operator-(IntPolynomial a) {
    for (auto& c : a.coeffs_) c = -c;
    return a;
  }
  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

  IntPolynomial pow(unsigned e) const {
    IntPolynomial r = constant(1);
    for (unsigned i = 0; i < e; ++i) r *= *this;
    return r;
  }

  /// Multiplies by x^shift.
  IntPolynomial shifted(std::size_t shift) const {
    if (is_zero()) return {};
    std::vector<mpz_class> v(shift);
    v.insert(v.end(), coeffs_.begin(), coeffs_.end());
    return IntPolynomial(std::move(v));
  }

  /// Exact quotient by (x - root). Throws InconsistencyError when the
  /// remainder is non-zero.
  IntPolynomial divided_by_linear(const mpz_class& root) const {
    if (is_zero()) return {};
    std::vector<mpz_class> q(coeffs_.size() - 1);
    mpz_class carry = 0;
    for (std::size_t j = coeffs_.size(); j-- > 0;) {
      carry = carry * root + coeffs_[j];
      if (j > 0) q[j - 1] = carry;
    }
    if (carry != 0) throw InconsistencyError("non-exact division by (x - " + root.get_str() + ")");
    return IntPolynomial(std::move(q));
  }

  /// Exact quotient by x. Throws InconsistencyError when the constant term is non-zero.
  IntPolynomial divided_by_x() const {
    if (is_zero()) return {};
    if (coeffs_[0] != 0) throw InconsistencyError("non-exact division by x");
    return IntPolynomial(std::vector<mpz_class>(coeffs_.begin() + 1, coeffs_.end()));
  }

  /// Human-readable form, highest degree first: "x^2 + 7", "28x^3 - x + 1".
  std::string to_string(const std::string& var = "x") const {
    if (is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (std::size_t j = coeffs_.size(); j-- > 0;) {
      const mpz_class& c = coeffs_[j];
      if (c == 0) continue;
      mpz_class mag = abs(c);
      if (first) {
        if (c < 0) out << "-";
      } else {
        out << (c < 0 ? " - " : " + ");
      }
      first = false;
      if (j == 0 || mag != 1) out << mag.get_str();
      if (j >= 1) out << var;
      if (j >= 2) out << "^" << j;
    }
    return out.str();
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }

  std::vector<mpz_class> coeffs_;
};

}  // namespace fakelens
