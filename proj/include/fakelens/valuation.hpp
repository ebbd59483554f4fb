#pragma once

// The w_l valuations on Q[chi]/I<K> and the membership criteria built on them.
//
// w_l(g) looks only at pr_l(g) in Q[chi]/<1 + chi^(2^l)>. There 1 - chi has
// 2-adic weight 1/2^l, and w_l(g) = a + b/2^l is read off the expansion of a
// cleared integer representative in powers of (1 - chi).

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fakelens/errors.hpp"
#include "fakelens/int_polynomial.hpp"
#include "fakelens/ring.hpp"

namespace fakelens {

/// a + b/2^l with 0 <= b < 2^l, or infinity.
class Valuation {
 public:
  static Valuation infinity() { return Valuation(); }

  static Valuation finite(long long a, std::uint64_t b, int level) {
    if (level < 0 || level > kMaxLevel) throw std::invalid_argument("valuation level out of range");
    if (b >= (std::uint64_t{1} << level))
      throw std::invalid_argument("b=" + std::to_string(b) + " not below 2^" + std::to_string(level));
    Valuation v;
    v.infinite_ = false;
    v.a_ = a;
    v.b_ = b;
    v.level_ = level;
    return v;
  }

  bool is_infinite() const { return infinite_; }
  long long a() const { return a_; }
  std::uint64_t b() const { return b_; }
  int level() const { return level_; }

  /// Exact rational value; throws for infinity.
  mpq_class value() const {
    if (infinite_) throw std::domain_error("infinite valuation has no rational value");
    mpq_class v(mpz_class(static_cast<long>(b_)), mpz_class(1) << level_);
    v.canonicalize();
    return mpq_class(mpz_class(static_cast<long>(a_))) + v;
  }

  friend bool operator==(const Valuation& x, const Valuation& y) {
    if (x.infinite_ || y.infinite_) return x.infinite_ == y.infinite_;
    return x.value() == y.value();
  }

  friend std::strong_ordering operator<=>(const Valuation& x, const Valuation& y) {
    if (x.infinite_ || y.infinite_) return x.infinite_ <=> y.infinite_;
    const int c = cmp(x.value(), y.value());
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

  /// Compares against an exact rational; infinity exceeds every rational.
  int compare(const mpq_class& q) const {
    if (infinite_) return 1;
    const int c = cmp(value(), q);
    return (c > 0) - (c < 0);
  }

  friend Valuation operator+(const Valuation& x, const Valuation& y) {
    if (x.infinite_ || y.infinite_) return infinity();
    if (x.level_ != y.level_) throw LevelMismatch(x.level_, y.level_);
    const std::uint64_t scale = std::uint64_t{1} << x.level_;
    std::uint64_t b = x.b_ + y.b_;
    long long a = x.a_ + y.a_;
    if (b >= scale) {
      b -= scale;
      ++a;
    }
    return finite(a, b, x.level_);
  }

  /// j * (a + b/2^l).
  Valuation times(std::uint64_t j) const {
    if (infinite_) return j == 0 ? finite(0, 0, level_) : infinity();
    const std::uint64_t scale = std::uint64_t{1} << level_;
    const unsigned __int128 total = static_cast<unsigned __int128>(b_) * j;
    const auto carry = static_cast<long long>(total / scale);
    return finite(a_ * static_cast<long long>(j) + carry, static_cast<std::uint64_t>(total % scale), level_);
  }

  /// `inf` or `a+b/2^l`.
  std::string to_string() const {
    if (infinite_) return "inf";
    return std::to_string(a_) + "+" + std::to_string(b_) + "/2^" + std::to_string(level_);
  }

  static Valuation parse(std::string_view text) {
    if (text == "inf") return infinity();
    const auto plus = text.find('+', 1);
    const auto slash = text.find("/2^");
    if (plus == std::string_view::npos || slash == std::string_view::npos || slash < plus)
      throw ParseError("expected 'inf' or 'a+b/2^l', got '" + std::string(text) + "'");
    try {
      std::size_t used = 0;
      const std::string a_text(text.substr(0, plus));
      const std::string b_text(text.substr(plus + 1, slash - plus - 1));
      const std::string l_text(text.substr(slash + 3));
      const long long a = std::stoll(a_text, &used);
      if (used != a_text.size()) throw ParseError("a");
      const unsigned long long b = std::stoull(b_text, &used);
      if (used != b_text.size() || b_text.front() == '-') throw ParseError("b");
      const int l = std::stoi(l_text, &used);
      if (used != l_text.size()) throw ParseError("l");
      return finite(a, b, l);
    } catch (const std::logic_error&) {
      throw ParseError("malformed valuation '" + std::string(text) + "'");
    }
  }

 private:
  Valuation() = default;

  bool infinite_ = true;
  long long a_ = 0;
  std::uint64_t b_ = 0;
  int level_ = 0;
};

/// How the denominator of pr_l(g) is cleared before the basis change.
enum class ClearingStrategy {
  kLcm,      ///< w = lcm of the coefficient denominators.
  kProduct,  ///< w = product of the distinct coefficient denominators (generally larger).
};

/// pr_l(g) = (2^a / u) * ((1 - chi)^b * v1(chi) + 2 * v2(chi)), u and v1(1) odd.
struct NormalForm {
  long long a = 0;
  std::uint64_t b = 0;
  mpz_class u = 1;
  IntPolynomial v1;
  IntPolynomial v2;
};

namespace detail {

inline long long two_adic_order(const mpz_class& x) {
  return static_cast<long long>(mpz_scan1(x.get_mpz_t(), 0));
}

struct ClearedExpansion {
  long long a1 = 0;
  mpz_class u = 1;
  std::vector<mpz_class> digits;  // z = sum_m digits[m] (1 - chi)^m
};

inline ClearedExpansion expand_cleared(const LevelProjection& p, ClearingStrategy strategy) {
  if (p.is_zero()) throw std::domain_error("normal form of zero projection");
  mpz_class w = p.denominator();
  if (strategy == ClearingStrategy::kProduct) {
    std::vector<mpz_class> seen;
    w = 1;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const mpz_class d = p.coefficient(j).get_den();
      bool dup = false;
      for (const auto& s : seen) dup = dup || s == d;
      if (!dup) {
        seen.push_back(d);
        w *= d;
      }
    }
  }
  ClearedExpansion out;
  out.a1 = two_adic_order(w);
  mpz_class two_part = mpz_class(1) << out.a1;
  out.u = w / two_part;

  const mpz_class factor = w / p.denominator();
  std::vector<mpz_class> cur(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) cur[j] = p.numerators()[j] * factor;

  // Repeated synthetic division: z_m = cur(1), cur <- (cur - z_m) / (1 - chi).
  out.digits.resize(cur.size());
  std::size_t len = cur.size();
  while (len > 0 && cur[len - 1] == 0) --len;
  for (std::size_t m = 0; m < out.digits.size() && len > 0; ++m) {
    mpz_class at_one = 0;
    for (std::size_t j = 0; j < len; ++j) at_one += cur[j];
    out.digits[m] = at_one;
    mpz_class carry = 0;
    for (std::size_t j = len; j-- > 1;) {
      carry += cur[j];
      cur[j] = -carry;  // quotient coefficient of chi^(j-1), stored one slot high
    }
    // Shift the quotient down one slot.
    for (std::size_t j = 0; j + 1 < len; ++j) cur[j] = cur[j + 1];
    cur[len - 1] = 0;
    --len;
    while (len > 0 && cur[len - 1] == 0) --len;
  }
  return out;
}

}  // namespace detail

/// The (a, b) part of the normal form; avoids building v1, v2.
inline std::pair<long long, std::uint64_t> normal_form_exponents(const LevelProjection& p,
                                                                 ClearingStrategy strategy = ClearingStrategy::kLcm) {
  const auto ex = detail::expand_cleared(p, strategy);
  long long a2 = -1;
  std::uint64_t b = 0;
  for (std::size_t m = 0; m < ex.digits.size(); ++m) {
    if (ex.digits[m] == 0) continue;
    const long long v = detail::two_adic_order(ex.digits[m]);
    if (a2 < 0 || v < a2) {
      a2 = v;
      b = m;
    }
  }
  return {a2 - ex.a1, b};
}

inline NormalForm normal_form(const LevelProjection& p, ClearingStrategy strategy = ClearingStrategy::kLcm) {
  const auto ex = detail::expand_cleared(p, strategy);
  const auto [a, b] = normal_form_exponents(p, strategy);
  const long long a2 = a + ex.a1;
  NormalForm nf;
  nf.a = a;
  nf.b = b;
  nf.u = ex.u;
  const mpz_class unit = mpz_class(1) << a2;
  for (std::size_t m = 0; m < ex.digits.size(); ++m) {
    if (ex.digits[m] == 0) continue;
    if (m >= b) {
      nf.v1 += IntPolynomial::binomial_power(1, -1, static_cast<unsigned>(m - b)) * mpz_class(ex.digits[m] / unit);
    } else {
      nf.v2 += IntPolynomial::binomial_power(1, -1, static_cast<unsigned>(m)) * mpz_class(ex.digits[m] / (unit * 2));
    }
  }
  return nf;
}

inline Valuation w_l(const LevelProjection& p, ClearingStrategy strategy = ClearingStrategy::kLcm) {
  if (p.is_zero()) return Valuation::infinity();
  const auto [a, b] = normal_form_exponents(p, strategy);
  return Valuation::finite(a, b, p.level());
}

inline Valuation w_l(const RingElement& g, int l) { return w_l(project(g, l)); }

/// w_l((1 - chi)^j) = j / 2^l.
inline Valuation w_l_of_one_minus_chi_power(std::uint64_t j, int l) {
  const Valuation one_minus_chi = l == 0 ? Valuation::finite(1, 0, 0) : Valuation::finite(0, 1, l);
  return one_minus_chi.times(j);
}

/// 2 + K - l - 2^(-l).
inline mpq_class membership_bound(int level, int l) {
  mpq_class bound(mpz_class(2 + level - l) * (mpz_class(1) << l) - 1, mpz_class(1) << l);
  bound.canonicalize();
  return bound;
}

enum class Verdict { kProvesMembership, kProvesNonMembership, kInconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kProvesMembership:
      return "proves-membership";
    case Verdict::kProvesNonMembership:
      return "proves-non-membership";
    case Verdict::kInconclusive:
      break;
  }
  return "inconclusive";
}

/// pr_l(g) lies in 4 Z[chi]/<1 + chi^(2^l)> for every 0 <= l <= K-1.
inline bool projections_in_4Z(const RingElement& g) {
  for (int l = 0; l < g.level(); ++l)
    if (!project(g, l).is_in_4Z()) return false;
  return true;
}

/// Sufficient criterion: w_l(g) >= 2 + K - l - 2^(-l) at every level.
inline Verdict criterion_sufficient(const RingElement& g) {
  if (!projections_in_4Z(g)) return Verdict::kInconclusive;
  for (int l = 0; l < g.level(); ++l)
    if (w_l(g, l).compare(membership_bound(g.level(), l)) < 0) return Verdict::kInconclusive;
  return Verdict::kProvesMembership;
}

namespace detail {

inline Verdict necessary_from_valuations(int level, const std::vector<Valuation>& wg, const std::vector<Valuation>& wh,
                                         int l_star) {
  for (int l = 0; l < level; ++l) {
    const int c = (wg[l] + wh[l]).compare(membership_bound(level, l));
    if (l == l_star ? c >= 0 : c < 0) return Verdict::kInconclusive;
  }
  return Verdict::kProvesNonMembership;
}

inline std::vector<Valuation> all_levels(const RingElement& g) {
  std::vector<Valuation> out;
  for (int l = 0; l < g.level(); ++l) out.push_back(w_l(g, l));
  return out;
}

}  // namespace detail

/// Necessary criterion with a caller-supplied integral witness h.
inline Verdict criterion_necessary(const RingElement& g, const RingElement& h, int l_star) {
  if (g.level() != h.level()) throw LevelMismatch(g.level(), h.level());
  if (!h.is_integral()) throw std::invalid_argument("witness h must have integer coefficients");
  if (l_star < 0 || l_star >= g.level()) throw std::out_of_range("l_star outside [0, K-1]");
  if (!projections_in_4Z(g)) return Verdict::kInconclusive;
  return detail::necessary_from_valuations(g.level(), detail::all_levels(g), detail::all_levels(h), l_star);
}

struct NecessaryWitness {
  std::uint64_t exponent = 0;  ///< h = (1 - chi)^exponent
  int l_star = 0;
};

/// Tries h = (1 - chi)^j for 0 <= j <= N and every l'. Incomplete by design:
/// a failure to find a witness says nothing about membership.
inline std::optional<NecessaryWitness> search_necessary_witness(const RingElement& g) {
  if (!projections_in_4Z(g)) return std::nullopt;
  const auto wg = detail::all_levels(g);
  const std::uint64_t n = g.order();
  for (std::uint64_t j = 0; j <= n; ++j) {
    std::vector<Valuation> wh;
    for (int l = 0; l < g.level(); ++l) wh.push_back(w_l_of_one_minus_chi_power(j, l));
    for (int l_star = 0; l_star < g.level(); ++l_star)
      if (detail::necessary_from_valuations(g.level(), wg, wh, l_star) == Verdict::kProvesNonMembership)
        return NecessaryWitness{j, l_star};
  }
  return std::nullopt;
}

/// x_0 = -chi, x_m = chi^(2^(m-1)) + 2 x_{m-1} (1 + chi^(2^(m-1)) + x_{m-1}).
inline IntPolynomial auxiliary_x(unsigned m) {
  IntPolynomial x{0, -1};
  for (unsigned i = 1; i <= m; ++i) {
    const IntPolynomial power = IntPolynomial::monomial(std::size_t{1} << (i - 1));
    x = power + mpz_class(2) * x * (IntPolynomial{1} + power + x);
  }
  return x;
}

}  // namespace fakelens
