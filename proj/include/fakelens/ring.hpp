#pragma once

// Exact arithmetic in Q[chi]/I<K>, I<K> = <1 + chi + ... + chi^(N-1)>, N = 2^K,
// and in the level-l quotients Q[chi]/<1 + chi^(2^l)>.
//
// Elements are stored as an integer numerator vector over one positive common
// denominator, reduced so that the denominator and all numerators are coprime.
// That makes the stored form unique, so equality is plain member equality, and
// it lets the hot paths (multiplication by binomials, division by 1 - chi^j)
// run in O(N) big-integer operations instead of O(N^2) rational ones.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fakelens/errors.hpp"
#include "fakelens/int_polynomial.hpp"

namespace fakelens {

/// Largest supported level K (N = 2^K coefficients per element).
inline constexpr int kMaxLevel = 20;

namespace detail {

inline void check_level(int level) {
  if (level < 1 || level > kMaxLevel)
    throw std::invalid_argument("level K must lie in [1, " + std::to_string(kMaxLevel) +
                                "], got " + std::to_string(level));
}

inline void check_odd(std::uint64_t k) {
  if (k % 2 == 0) throw std::invalid_argument("k must be an odd positive integer, got " + std::to_string(k));
}

// Divides numerators and denominator by their common gcd. Returns early as soon
// as the running gcd reaches 1, which is the common case.
inline void reduce_fraction(std::vector<mpz_class>& num, mpz_class& den) {
  if (den == 1) return;
  mpz_class g = den;
  for (const auto& c : num) {
    if (c == 0) continue;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g == 1) return;
  }
  for (auto& c : num)
    if (c != 0) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
  mpz_divexact(den.get_mpz_t(), den.get_mpz_t(), g.get_mpz_t());
}

// Turns a cyclic vector of length N (a class in Q[chi]/(chi^N - 1)) into the
// canonical length N-1 representative modulo the norm element.
inline void drop_norm_component(std::vector<mpz_class>& cyc) {
  const mpz_class top = cyc.back();
  cyc.pop_back();
  if (top != 0)
    for (auto& c : cyc) c -= top;
}

inline std::string rational_to_string(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline mpq_class parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  auto is_int = [](std::string_view s) {
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
    if (s.empty()) return false;
    for (char ch : s)
      if (ch < '0' || ch > '9') return false;
    return true;
  };
  const auto slash = text.find('/');
  std::string_view p = slash == std::string_view::npos ? text : text.substr(0, slash);
  std::string_view q = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!is_int(p) || !is_int(q) || q.front() == '-' || q.front() == '+')
    throw ParseError("malformed rational '" + std::string(text) + "'");
  mpz_class num(std::string(p.front() == '+' ? p.substr(1) : p));
  mpz_class den{std::string(q)};
  if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace detail

/// An element of Q[chi]/I<K> in canonical form: the unique representative of
/// degree < N - 1.
class RingElement {
 public:
  static RingElement zero(int level) {
    detail::check_level(level);
    return RingElement(level, std::vector<mpz_class>((std::size_t{1} << level) - 1), 1);
  }

  static RingElement one(int level) { return chi_power(level, 0); }

  /// chi^j, reduced.
  static RingElement chi_power(int level, std::uint64_t j) {
    detail::check_level(level);
    const std::size_t n = std::size_t{1} << level;
    std::vector<mpz_class> cyc(n);
    cyc[j & (n - 1)] = 1;
    detail::drop_norm_component(cyc);
    return RingElement(level, std::move(cyc), 1);
  }

  /// (numerators / denominator) for an integer coefficient list of any length.
  static RingElement from_fraction(int level, std::span<const mpz_class> numerators, mpz_class denominator) {
    detail::check_level(level);
    if (denominator == 0) throw std::invalid_argument("zero denominator");
    const std::size_t n = std::size_t{1} << level;
    std::vector<mpz_class> cyc(n);
    for (std::size_t j = 0; j < numerators.size(); ++j) cyc[j & (n - 1)] += numerators[j];
    detail::drop_norm_component(cyc);
    if (denominator < 0) {
      denominator = -denominator;
      for (auto& c : cyc) c = -c;
    }
    return RingElement(level, std::move(cyc), std::move(denominator));
  }

  static RingElement from_integers(int level, std::span<const mpz_class> raw) {
    return from_fraction(level, raw, 1);
  }

  static RingElement from_polynomial(int level, const IntPolynomial& p) {
    return from_integers(level, p.coefficients());
  }

  int level() const { return level_; }
  /// N = 2^K.
  std::size_t order() const { return std::size_t{1} << level_; }
  /// Number of canonical coefficients, N - 1.
  std::size_t size() const { return num_.size(); }

  const std::vector<mpz_class>& numerators() const { return num_; }
  const mpz_class& denominator() const { return den_; }

  mpq_class coefficient(std::size_t j) const {
    mpq_class q(num_.at(j), den_);
    q.canonicalize();
    return q;
  }

  std::vector<mpq_class> coefficients() const {
    std::vector<mpq_class> out;
    out.reserve(num_.size());
    for (std::size_t j = 0; j < num_.size(); ++j) out.push_back(coefficient(j));
    return out;
  }

  bool is_zero() const {
    for (const auto& c : num_)
      if (c != 0) return false;
    return true;
  }

  /// All canonical coefficients are integers, i.e. the element lies in R = Z[chi]/I<K>.
  bool is_integral() const { return den_ == 1; }

  friend bool operator==(const RingElement&, const RingElement&) = default;

  friend RingElement operator+(const RingElement& a, const RingElement& b) { return combine(a, b, 1); }
  friend RingElement operator-(const RingElement& a, const RingElement& b) { return combine(a, b, -1); }

  friend RingElement operator-(RingElement a) {
    for (auto& c : a.num_) c = -c;
    return a;
  }

  RingElement& operator+=(const RingElement& o) { return *this = *this + o; }
  RingElement& operator-=(const RingElement& o) { return *this = *this - o; }
  RingElement& operator*=(const RingElement& o) { return *this = *this * o; }

  friend RingElement operator*(const RingElement& a, const RingElement& b) {
    if (a.level_ != b.level_) throw LevelMismatch(a.level_, b.level_);
    const std::size_t n = a.order();
    const std::size_t mask = n - 1;
    auto support = [](const RingElement& e) {
      std::vector<std::size_t> idx;
      for (std::size_t j = 0; j < e.num_.size(); ++j)
        if (e.num_[j] != 0) idx.push_back(j);
      return idx;
    };
    const auto sa = support(a);
    const auto sb = support(b);
    std::vector<mpz_class> acc(n);
    for (std::size_t i : sa)
      for (std::size_t j : sb)
        mpz_addmul(acc[(i + j) & mask].get_mpz_t(), a.num_[i].get_mpz_t(), b.num_[j].get_mpz_t());
    detail::drop_norm_component(acc);
    return RingElement(a.level_, std::move(acc), a.den_ * b.den_);
  }

  friend RingElement operator*(RingElement a, const mpq_class& s) {
    for (auto& c : a.num_) c *= s.get_num();
    a.den_ *= s.get_den();
    if (a.den_ < 0) {
      a.den_ = -a.den_;
      for (auto& c : a.num_) c = -c;
    }
    a.normalize();
    return a;
  }
  friend RingElement operator*(const mpq_class& s, RingElement a) { return std::move(a) * s; }

  RingElement pow(unsigned e) const {
    RingElement result = one(level_);
    RingElement base = *this;
    while (e > 0) {
      if (e & 1u) result = result * base;
      e >>= 1;
      if (e > 0) base = base * base;
    }
    return result;
  }

  /// this * chi^j.
  RingElement times_chi_power(std::uint64_t j) const {
    const std::size_t n = order();
    const std::size_t mask = n - 1;
    std::vector<mpz_class> cyc(n);
    for (std::size_t i = 0; i < num_.size(); ++i) cyc[(i + j) & mask] = num_[i];
    detail::drop_norm_component(cyc);
    return RingElement(level_, std::move(cyc), den_);
  }

  /// this * (1 + sign * chi^shift), in O(N).
  RingElement times_binomial(std::uint64_t shift, int sign) const {
    const std::size_t n = order();
    const std::size_t mask = n - 1;
    std::vector<mpz_class> cyc(n);
    for (std::size_t i = 0; i < num_.size(); ++i) cyc[i] = num_[i];
    for (std::size_t i = 0; i < num_.size(); ++i) {
      if (num_[i] == 0) continue;
      if (sign >= 0)
        cyc[(i + shift) & mask] += num_[i];
      else
        cyc[(i + shift) & mask] -= num_[i];
    }
    detail::drop_norm_component(cyc);
    return RingElement(level_, std::move(cyc), den_);
  }

  /// this * (1 - chi)^e.
  RingElement times_one_minus_chi_power(unsigned e) const {
    RingElement r = *this;
    for (unsigned i = 0; i < e; ++i) r = r.times_binomial(1, -1);
    return r;
  }

  /// this / (1 - chi^j) for odd j, in O(N).
  ///
  /// 1 - chi^j is a unit exactly when j is odd: then chi^j generates the cyclic
  /// group and the equation y - chi^j y = x becomes a running sum along the
  /// orbit 0, j, 2j, ... once x is shifted by a multiple of the norm element
  /// so that its coefficient sum vanishes.
  RingElement divided_by_one_minus_chi_power(std::uint64_t j) const {
    detail::check_odd(j);
    const std::size_t n = order();
    const std::size_t mask = n - 1;
    mpz_class total = 0;
    for (const auto& c : num_) total += c;
    std::vector<mpz_class> y(n);
    mpz_class acc = 0, scaled;
    const std::size_t step = j & mask;
    std::size_t idx = 0;
    for (std::size_t t = 1; t < n; ++t) {
      idx = (idx + step) & mask;
      if (idx < num_.size()) {
        mpz_mul_2exp(scaled.get_mpz_t(), num_[idx].get_mpz_t(), static_cast<mp_bitcnt_t>(level_));
        acc += scaled;
      }
      acc -= total;
      y[idx] = acc;
    }
    detail::drop_norm_component(y);
    mpz_class den;
    mpz_mul_2exp(den.get_mpz_t(), den_.get_mpz_t(), static_cast<mp_bitcnt_t>(level_));
    return RingElement(level_, std::move(y), std::move(den));
  }

  /// this / (1 - chi)^e.
  RingElement divided_by_one_minus_chi_power_of(unsigned e) const {
    RingElement r = *this;
    for (unsigned i = 0; i < e; ++i) r = r.divided_by_one_minus_chi_power(1);
    return r;
  }

  /// Multiplicative inverse via the extended Euclidean algorithm over Q
  /// against 1 + chi + ... + chi^(N-1). Throws NotInvertible.
  RingElement inverse() const;

  /// Substitutes chi -> chi^(N-1) (complex conjugation of characters).
  RingElement conjugate() const {
    const std::size_t n = order();
    const std::size_t mask = n - 1;
    std::vector<mpz_class> cyc(n);
    for (std::size_t i = 0; i < num_.size(); ++i) cyc[(n - i) & mask] = num_[i];
    detail::drop_norm_component(cyc);
    return RingElement(level_, std::move(cyc), den_);
  }

  /// `K=<K>; c0,c1,...` with each coefficient as p/q in lowest terms.
  std::string to_string() const {
    std::ostringstream out;
    out << "K=" << level_ << ";";
    for (std::size_t j = 0; j < num_.size(); ++j) out << (j == 0 ? " " : ",") << detail::rational_to_string(coefficient(j));
    return out.str();
  }

 private:
  friend class LevelProjection;

  RingElement(int level, std::vector<mpz_class> num, mpz_class den)
      : level_(level), num_(std::move(num)), den_(std::move(den)) {
    normalize();
  }

  void normalize() { detail::reduce_fraction(num_, den_); }

  static RingElement combine(const RingElement& a, const RingElement& b, int sign) {
    if (a.level_ != b.level_) throw LevelMismatch(a.level_, b.level_);
    std::vector<mpz_class> num(a.num_.size());
    if (a.den_ == b.den_) {
      for (std::size_t j = 0; j < num.size(); ++j) num[j] = sign > 0 ? mpz_class(a.num_[j] + b.num_[j]) : mpz_class(a.num_[j] - b.num_[j]);
      return RingElement(a.level_, std::move(num), a.den_);
    }
    for (std::size_t j = 0; j < num.size(); ++j) {
      num[j] = a.num_[j] * b.den_;
      if (sign > 0)
        mpz_addmul(num[j].get_mpz_t(), b.num_[j].get_mpz_t(), a.den_.get_mpz_t());
      else
        mpz_submul(num[j].get_mpz_t(), b.num_[j].get_mpz_t(), a.den_.get_mpz_t());
    }
    return RingElement(a.level_, std::move(num), a.den_ * b.den_);
  }

  int level_ = 1;
  std::vector<mpz_class> num_;
  mpz_class den_ = 1;
};

/// Canonical reduction of an arbitrary rational coefficient list into Q[chi]/I<K>.
inline RingElement make_element(int level, std::span<const mpq_class> raw) {
  detail::check_level(level);
  mpz_class den = 1;
  for (const auto& q : raw) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
  std::vector<mpz_class> num;
  num.reserve(raw.size());
  for (const auto& q : raw) num.push_back(q.get_num() * (den / q.get_den()));
  return RingElement::from_fraction(level, num, den);
}

inline RingElement make_element(int level, std::initializer_list<long> raw) {
  std::vector<mpz_class> v;
  for (long c : raw) v.emplace_back(c);
  return RingElement::from_integers(level, v);
}

namespace detail {

using RatPoly = std::vector<mpq_class>;

inline void trim(RatPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

// Long division over Q; `a` becomes the remainder.
inline RatPoly divmod(RatPoly& a, const RatPoly& b) {
  RatPoly q;
  trim(a);
  if (a.size() < b.size()) return q;
  q.assign(a.size() - b.size() + 1, 0);
  const mpq_class lead = b.back();
  while (!a.empty() && a.size() >= b.size()) {
    const std::size_t shift = a.size() - b.size();
    const mpq_class factor = a.back() / lead;
    q[shift] = factor;
    for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] -= factor * b[j];
    a.back() = 0;
    trim(a);
  }
  return q;
}

inline RatPoly poly_mul(const RatPoly& a, const RatPoly& b) {
  if (a.empty() || b.empty()) return {};
  RatPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

inline RatPoly poly_sub(RatPoly a, const RatPoly& b) {
  if (b.size() > a.size()) a.resize(b.size(), 0);
  for (std::size_t j = 0; j < b.size(); ++j) a[j] -= b[j];
  trim(a);
  return a;
}

}  // namespace detail

inline RingElement RingElement::inverse() const {
  using detail::RatPoly;
  RatPoly r0(order(), 1);  // 1 + chi + ... + chi^(N-1)
  RatPoly r1;
  for (std::size_t j = 0; j < num_.size(); ++j) r1.emplace_back(num_[j], den_);
  for (auto& c : r1) c.canonicalize();
  detail::trim(r1);
  if (r1.empty()) throw NotInvertible("zero is not invertible");
  RatPoly s0, s1{mpq_class(1)};
  while (!r1.empty()) {
    RatPoly rem = r0;
    RatPoly q = detail::divmod(rem, r1);
    RatPoly s2 = detail::poly_sub(s0, detail::poly_mul(q, s1));
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (r0.size() != 1) throw NotInvertible("element shares a factor with the norm element");
  const mpq_class scale = 1 / r0[0];
  std::vector<mpq_class> coeffs;
  for (auto& c : s0) coeffs.push_back(c * scale);
  return make_element(level_, coeffs);
}

/// Parses the `K=<K>; c0,c1,...` form. Exactly N - 1 coefficients are required.
inline RingElement parse_ring_element(std::string_view text) {
  const auto semi = text.find(';');
  if (text.substr(0, 2) != "K=" || semi == std::string_view::npos)
    throw ParseError("expected 'K=<int>; c0,c1,...'");
  const std::string level_text(text.substr(2, semi - 2));
  int level = 0;
  try {
    std::size_t used = 0;
    level = std::stoi(level_text, &used);
    if (used != level_text.size()) throw ParseError("bad level");
  } catch (const std::logic_error&) {
    throw ParseError("bad level '" + level_text + "'");
  }
  detail::check_level(level);
  std::vector<mpq_class> coeffs;
  std::string_view rest = text.substr(semi + 1);
  while (true) {
    const auto comma = rest.find(',');
    coeffs.push_back(detail::parse_rational(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  const std::size_t expected = (std::size_t{1} << level) - 1;
  if (coeffs.size() != expected)
    throw ParseError("expected " + std::to_string(expected) + " coefficients at K=" + std::to_string(level) +
                     ", got " + std::to_string(coeffs.size()));
  return make_element(level, coeffs);
}

/// f = (1 + chi) / (1 - chi).
inline RingElement element_f(int level) {
  return RingElement::one(level).times_binomial(1, 1).divided_by_one_minus_chi_power(1);
}

/// f_k = (1 + chi^k) / (1 - chi^k), k odd.
inline RingElement element_f_k(int level, std::uint64_t k) {
  detail::check_odd(k);
  return RingElement::one(level).times_binomial(k, 1).divided_by_one_minus_chi_power(k);
}

/// 1 - chi + chi^2 - ... + chi^(k-1) as an integer polynomial.
inline IntPolynomial alternating_sum(std::uint64_t k) {
  std::vector<mpz_class> c(k);
  for (std::uint64_t i = 0; i < k; ++i) c[i] = (i % 2 == 0) ? 1 : -1;
  return IntPolynomial(std::move(c));
}

/// f'_k = (1 - chi + ... + chi^(k-1)) / (1 + chi + ... + chi^(k-1)), k odd.
/// Uses 1 + chi + ... + chi^(k-1) = (1 - chi^k) / (1 - chi).
inline RingElement element_f_prime(int level, std::uint64_t k) {
  detail::check_odd(k);
  detail::check_level(level);
  const std::uint64_t reduced = k & ((std::uint64_t{1} << level) - 1);
  return RingElement::from_polynomial(level, alternating_sum(reduced))
      .times_binomial(1, -1)
      .divided_by_one_minus_chi_power(reduced);
}

enum class Eigenspace { kPlus, kMinus };

/// Membership in the (+1) or (-1) eigenspace of conjugation. For integral
/// elements the plus test additionally requires p(-1) to be even, which is
/// what separates R^+ from the conjugation-fixed integral elements.
inline bool eigenspace_test(const RingElement& a, Eigenspace sign) {
  const RingElement c = a.conjugate();
  if (sign == Eigenspace::kMinus) return c == -a;
  if (c != a) return false;
  if (!a.is_integral()) return true;
  mpz_class at_minus_one = 0;
  for (std::size_t j = 0; j < a.size(); ++j) at_minus_one += (j % 2 == 0) ? a.numerators()[j] : -a.numerators()[j];
  return mpz_even_p(at_minus_one.get_mpz_t()) != 0;
}

/// Exact membership in 4 * Z[chi]/I<K>.
inline bool is_in_4Z(const RingElement& a) {
  if (!a.is_integral()) return false;
  for (const auto& c : a.numerators())
    if (!mpz_divisible_2exp_p(c.get_mpz_t(), 2)) return false;
  return true;
}

/// The natural surjection Q[chi]/I<K> -> Q[chi]/I<target>, target <= K.
inline RingElement reduce_to_level(const RingElement& a, int target) {
  detail::check_level(target);
  if (target > a.level()) throw std::invalid_argument("cannot reduce to a higher level");
  return RingElement::from_fraction(target, a.numerators(), a.denominator());
}

/// An element of Q[chi]/<1 + chi^(2^l)>, stored like RingElement.
class LevelProjection {
 public:
  static LevelProjection zero(int level) { return from_fraction(level, {}, 1); }

  /// Negacyclic fold of an arbitrary-length coefficient list.
  static LevelProjection from_fraction(int level, std::span<const mpz_class> numerators, mpz_class denominator) {
    if (level < 0 || level > kMaxLevel) throw std::invalid_argument("projection level out of range");
    if (denominator == 0) throw std::invalid_argument("zero denominator");
    const std::size_t m = std::size_t{1} << level;
    std::vector<mpz_class> v(m);
    for (std::size_t j = 0; j < numerators.size(); ++j) {
      if (((j >> level) & 1u) == 0)
        v[j & (m - 1)] += numerators[j];
      else
        v[j & (m - 1)] -= numerators[j];
    }
    if (denominator < 0) {
      denominator = -denominator;
      for (auto& c : v) c = -c;
    }
    return LevelProjection(level, std::move(v), std::move(denominator));
  }

  static LevelProjection from_polynomial(int level, const IntPolynomial& p) {
    return from_fraction(level, p.coefficients(), 1);
  }

  static LevelProjection from_rationals(int level, std::span<const mpq_class> raw) {
    mpz_class den = 1;
    for (const auto& q : raw) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
    std::vector<mpz_class> num;
    for (const auto& q : raw) num.push_back(q.get_num() * (den / q.get_den()));
    return from_fraction(level, num, den);
  }

  int level() const { return level_; }
  std::size_t size() const { return num_.size(); }
  const std::vector<mpz_class>& numerators() const { return num_; }
  const mpz_class& denominator() const { return den_; }

  mpq_class coefficient(std::size_t j) const {
    mpq_class q(num_.at(j), den_);
    q.canonicalize();
    return q;
  }

  std::vector<mpq_class> coefficients() const {
    std::vector<mpq_class> out;
    for (std::size_t j = 0; j < num_.size(); ++j) out.push_back(coefficient(j));
    return out;
  }

  bool is_zero() const {
    for (const auto& c : num_)
      if (c != 0) return false;
    return true;
  }

  bool is_integral() const { return den_ == 1; }

  /// Lies in 4 * Z[chi]/<1 + chi^(2^l)>.
  bool is_in_4Z() const {
    if (den_ != 1) return false;
    for (const auto& c : num_)
      if (!mpz_divisible_2exp_p(c.get_mpz_t(), 2)) return false;
    return true;
  }

  friend bool operator==(const LevelProjection&, const LevelProjection&) = default;

  friend LevelProjection operator+(const LevelProjection& a, const LevelProjection& b) {
    check_same(a, b);
    std::vector<mpz_class> v(a.num_.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = a.num_[j] * b.den_ + b.num_[j] * a.den_;
    return LevelProjection(a.level_, std::move(v), a.den_ * b.den_);
  }

  friend LevelProjection operator-(const LevelProjection& a, const LevelProjection& b) {
    check_same(a, b);
    std::vector<mpz_class> v(a.num_.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = a.num_[j] * b.den_ - b.num_[j] * a.den_;
    return LevelProjection(a.level_, std::move(v), a.den_ * b.den_);
  }

  friend LevelProjection operator*(const LevelProjection& a, const LevelProjection& b) {
    check_same(a, b);
    const std::size_t m = a.num_.size();
    std::vector<mpz_class> v(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (a.num_[i] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (i + j < m)
          mpz_addmul(v[i + j].get_mpz_t(), a.num_[i].get_mpz_t(), b.num_[j].get_mpz_t());
        else
          mpz_submul(v[i + j - m].get_mpz_t(), a.num_[i].get_mpz_t(), b.num_[j].get_mpz_t());
      }
    }
    return LevelProjection(a.level_, std::move(v), a.den_ * b.den_);
  }

  std::string to_string() const {
    std::ostringstream out;
    out << "l=" << level_ << ";";
    for (std::size_t j = 0; j < num_.size(); ++j) out << (j == 0 ? " " : ",") << detail::rational_to_string(coefficient(j));
    return out.str();
  }

 private:
  LevelProjection(int level, std::vector<mpz_class> num, mpz_class den)
      : level_(level), num_(std::move(num)), den_(std::move(den)) {
    detail::reduce_fraction(num_, den_);
  }

  static void check_same(const LevelProjection& a, const LevelProjection& b) {
    if (a.level_ != b.level_) throw LevelMismatch(a.level_, b.level_);
  }

  int level_ = 0;
  std::vector<mpz_class> num_;
  mpz_class den_ = 1;
};

/// pr_l : Q[chi]/I<K> -> Q[chi]/<1 + chi^(2^l)>, 0 <= l <= K-1.
inline LevelProjection project(const RingElement& a, int l) {
  if (l < 0 || l >= a.level())
    throw std::out_of_range("projection level l=" + std::to_string(l) + " outside [0, " +
                            std::to_string(a.level() - 1) + "]");
  return LevelProjection::from_fraction(l, a.numerators(), a.denominator());
}

/// Rebuilds g from its projections pr_0(g), ..., pr_{K-1}(g) by
///   g = sum_l 2^(l-K) * g_l * (1 - chi) * prod_{r != l} (1 + chi^(2^r)),
/// where g_l is the degree < 2^l lift of the l-th part.
inline RingElement crt_reconstruct(std::span<const LevelProjection> parts) {
  const int level = static_cast<int>(parts.size());
  detail::check_level(level);
  for (int l = 0; l < level; ++l)
    if (parts[l].level() != l)
      throw std::invalid_argument("part " + std::to_string(l) + " has level " + std::to_string(parts[l].level()));
  RingElement sum = RingElement::zero(level);
  for (int l = 0; l < level; ++l) {
    mpz_class den;
    mpz_mul_2exp(den.get_mpz_t(), parts[l].denominator().get_mpz_t(), static_cast<mp_bitcnt_t>(level - l));
    RingElement term = RingElement::from_fraction(level, parts[l].numerators(), den).times_binomial(1, -1);
    for (int r = 0; r < level; ++r)
      if (r != l) term = term.times_binomial(std::uint64_t{1} << r, 1);
    sum += term;
  }
  return sum;
}

/// Which factor multiplies q(f^2) in evaluate_at_f_squared.
struct Prefactor {
  enum class Kind { kFPower, kFSquaredMinusOne };
  Kind kind = Kind::kFPower;
  int m = 1;

  /// 8 f'_k f^m q(f^2), m in {1, 2}; m = 1 is 8 f_k q(f^2).
  static Prefactor f_power(int m) {
    if (m != 1 && m != 2) throw std::invalid_argument("m must be 1 or 2");
    return {Kind::kFPower, m};
  }
  /// 8 f'_k (f^2 - 1) q(f^2).
  static Prefactor f_squared_minus_one() { return {Kind::kFSquaredMinusOne, 0}; }
};

/// Computes 8 f'_k f^m q(f^2) or 8 f'_k (f^2 - 1) q(f^2) exactly.
///
/// With n = deg q, q(f^2) = P(chi) / (1 - chi)^(2n) where
/// P = sum_j q_j (1 + chi)^(2j) (1 - chi)^(2(n-j)) is a small integer
/// polynomial, and f'_k = A_k (1 - chi) / (1 - chi^k) with A_k the
/// alternating sum. Everything then reduces to one short integer numerator
/// followed by O(n) unit divisions, each O(N).
inline RingElement evaluate_at_f_squared(const IntPolynomial& q, int level, std::uint64_t k, Prefactor pre) {
  detail::check_odd(k);
  detail::check_level(level);
  if (q.is_zero()) return RingElement::zero(level);
  const auto n = static_cast<unsigned>(q.degree());
  const std::uint64_t k_reduced = k & ((std::uint64_t{1} << level) - 1);

  IntPolynomial numerator;
  for (unsigned j = 0; j <= n; ++j) {
    if (q.coefficient(j) == 0) continue;
    numerator += q.coefficient(j) * (IntPolynomial::binomial_power(1, 1, 2 * j) *
                                     IntPolynomial::binomial_power(1, -1, 2 * (n - j)));
  }
  numerator *= alternating_sum(k_reduced);
  unsigned unit_divisions = 0;
  if (pre.kind == Prefactor::Kind::kFPower) {
    numerator *= IntPolynomial::binomial_power(1, 1, static_cast<unsigned>(pre.m));
    numerator *= mpz_class(8);
    unit_divisions = 2 * n + static_cast<unsigned>(pre.m) - 1;
  } else {
    numerator = numerator.shifted(1) * mpz_class(32);  // f^2 - 1 = 4 chi / (1 - chi)^2
    unit_divisions = 2 * n + 1;
  }
  return RingElement::from_polynomial(level, numerator)
      .divided_by_one_minus_chi_power_of(unit_divisions)
      .divided_by_one_minus_chi_power(k_reduced);
}

}  // namespace fakelens
