#pragma once

// The polynomial families p_k, q_n, r^-_n, r^+_n and the lattices A_K^k(d),
// B_K(d) of polynomials q with 8 f'_k f^m q(f^2) (odd d) or
// 8 f'_k (f^2 - 1) q(f^2) (even d) in 4 Z[chi]/I<K>.

#include <gmpxx.h>

#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fakelens/errors.hpp"
#include "fakelens/int_polynomial.hpp"
#include "fakelens/ring.hpp"

namespace fakelens {

/// p_1 = x + 1, p_{k+1}(x) = p_k((x+1)^2 / 4x) * (4x)^(2^(k-1)).
inline IntPolynomial p_k(unsigned k) {
  if (k == 0) throw std::invalid_argument("p_k needs k >= 1");
  IntPolynomial p{1, 1};
  const IntPolynomial square{1, 2, 1};  // (x+1)^2
  const IntPolynomial four_x{0, 4};
  for (unsigned step = 1; step < k; ++step) {
    // Horner in y = (x+1)^2 / 4x, carrying the value as num / (4x)^e.
    IntPolynomial num;
    unsigned e = 0;
    for (int j = p.degree(); j >= 0; --j) {
      num = num * square + IntPolynomial::constant(p.coefficient(static_cast<std::size_t>(j))) * four_x.pow(e + 1);
      ++e;
    }
    // num / (4x)^e with e = deg + 1; the target multiplies by (4x)^deg.
    const auto deg = static_cast<unsigned>(p.degree());
    IntPolynomial result = num;
    for (unsigned i = deg; i < e; ++i) {
      result = result.divided_by_x();
      for (const auto& c : result.coefficients())
        if (!mpz_divisible_ui_p(c.get_mpz_t(), 4)) throw InconsistencyError("p_k recursion left a non-integral term");
      std::vector<mpz_class> scaled;
      for (const auto& c : result.coefficients()) scaled.push_back(c / 4);
      result = IntPolynomial(std::move(scaled));
    }
    if (result.degree() != static_cast<int>(2 * deg) || !result.is_monic())
      throw InconsistencyError("p_" + std::to_string(step + 1) + " is not monic of degree 2^" + std::to_string(step));
    p = std::move(result);
  }
  return p;
}

/// n + 1 = 2^a + b with 0 <= b < 2^a.
struct Split {
  unsigned a = 0;
  std::uint64_t b = 0;
};

inline Split split_n(std::uint64_t n) {
  unsigned a = 0;
  while ((std::uint64_t{2} << a) <= n + 1) ++a;
  return {a, n + 1 - (std::uint64_t{1} << a)};
}

/// q_n = p_1 ... p_a(n) * (x - 1)^b(n).
inline IntPolynomial q_n(unsigned n) {
  const Split s = split_n(n);
  IntPolynomial q = IntPolynomial::constant(1);
  for (unsigned r = 1; r <= s.a; ++r) q *= p_k(r);
  return q * IntPolynomial::binomial_power(-1, 1, static_cast<unsigned>(s.b));
}

/// beta(q) = (x q(x) - q(1)) / (x - 1).
inline IntPolynomial beta(const IntPolynomial& q) {
  return (q.shifted(1) - IntPolynomial::constant(q.evaluate(1))).divided_by_linear(1);
}

/// beta^{-1}(q) = ((x - 1) q(x) + q(0)) / x.
inline IntPolynomial beta_inv(const IntPolynomial& q) {
  return (IntPolynomial{-1, 1} * q + IntPolynomial::constant(q.coefficient(0))).divided_by_x();
}

struct RMinusRecord {
  unsigned n = 0;
  IntPolynomial polynomial;
  std::vector<int> chosen_bits;  ///< a_l for 0 <= l < floor(n/2)
};

/// Largest n for which r^-_n can be searched: the search runs at level 2n + 2.
inline constexpr unsigned kMaxBestPolynomialIndex = (kMaxLevel - 2) / 2;

namespace detail {

inline bool odd_case_member(const IntPolynomial& q, int level, std::uint64_t k, int m) {
  return is_in_4Z(evaluate_at_f_squared(q, level, k, Prefactor::f_power(m)));
}

// All bit vectors (ascending binary order) whose candidate passes at level 2n + 2.
inline std::vector<std::uint64_t> r_minus_successes(unsigned n, const IntPolynomial& qn,
                                                    const std::vector<const IntPolynomial*>& lower, std::uint64_t k,
                                                    int m) {
  const unsigned width = n / 2;
  std::vector<std::uint64_t> hits;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << width); ++bits) {
    IntPolynomial candidate = qn;
    for (unsigned l = 0; l < width; ++l)
      if ((bits >> l) & 1u) candidate += (mpz_class(1) << (2 * (n - l) - 1)) * *lower[l];
    if (odd_case_member(candidate, static_cast<int>(2 * n + 2), k, m)) hits.push_back(bits);
  }
  return hits;
}

}  // namespace detail

/// Memoized p/q/r tables. Entries are built on first use and never move, so
/// returned references stay valid for the program lifetime.
class PolynomialTables {
 public:
  static PolynomialTables& instance() {
    static PolynomialTables tables;
    return tables;
  }

  const RMinusRecord& r_minus(unsigned n) {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    if (n > kMaxBestPolynomialIndex)
      throw std::out_of_range("r^-_n is limited to n <= " + std::to_string(kMaxBestPolynomialIndex));
    while (records_.size() <= n) build_next();
    return records_[n];
  }

  const IntPolynomial& r_plus(unsigned n) {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    while (plus_.size() <= n) plus_.push_back(beta(r_minus(static_cast<unsigned>(plus_.size())).polynomial));
    return plus_[n];
  }

 private:
  PolynomialTables() = default;

  void build_next() {
    const auto n = static_cast<unsigned>(records_.size());
    const IntPolynomial qn = q_n(n);
    std::vector<const IntPolynomial*> lower;
    for (unsigned l = 0; l < n / 2; ++l) lower.push_back(&records_[l].polynomial);

    std::optional<std::uint64_t> chosen;
    for (std::uint64_t k : {1, 3}) {
      for (int m : {1, 2}) {
        const auto hits = detail::r_minus_successes(n, qn, lower, k, m);
        const std::string where =
            "r^-_" + std::to_string(n) + " (k=" + std::to_string(k) + ", m=" + std::to_string(m) + ")";
        if (hits.size() != 1)
          throw InconsistencyError(where + ": " + std::to_string(hits.size()) + " bit vectors succeed, expected 1");
        if (chosen && *chosen != hits[0]) throw InconsistencyError(where + ": choice depends on (k, m)");
        chosen = hits[0];
      }
    }
    RMinusRecord rec;
    rec.n = n;
    rec.polynomial = qn;
    for (unsigned l = 0; l < n / 2; ++l) {
      const int bit = static_cast<int>((*chosen >> l) & 1u);
      rec.chosen_bits.push_back(bit);
      if (bit) rec.polynomial += (mpz_class(1) << (2 * (n - l) - 1)) * *lower[l];
    }
    records_.push_back(std::move(rec));
  }

  std::recursive_mutex mutex_;
  std::deque<RMinusRecord> records_;
  std::deque<IntPolynomial> plus_;
};

inline const RMinusRecord& r_minus(unsigned n) { return PolynomialTables::instance().r_minus(n); }
inline const IntPolynomial& r_plus(unsigned n) { return PolynomialTables::instance().r_plus(n); }

/// c = floor((d - 1) / 2).
inline unsigned ambient_rank(unsigned d) { return (d - 1) / 2; }

/// Membership of q in A_K^k(d). For odd d the prefactor is 8 f'_k f^m
/// (m = 1 unless given); for even d it is 8 f'_k (f^2 - 1).
inline bool membership_A(const IntPolynomial& q, int level, std::uint64_t k, unsigned d,
                         std::optional<int> m = std::nullopt) {
  detail::check_odd(k);
  if (d < 3) throw std::invalid_argument("d must be at least 3");
  const unsigned c = ambient_rank(d);
  if (q.degree() > static_cast<int>(c) - 1)
    throw std::invalid_argument("deg q = " + std::to_string(q.degree()) + " exceeds c - 1 = " + std::to_string(c - 1));
  Prefactor pre;
  if (d % 2 == 1) {
    pre = Prefactor::f_power(m.value_or(1));
  } else {
    if (m) throw std::invalid_argument("m applies only to odd d");
    pre = Prefactor::f_squared_minus_one();
  }
  return is_in_4Z(evaluate_at_f_squared(q, level, k, pre));
}

struct LatticeDescriptor {
  unsigned ambient_rank = 0;
  std::vector<IntPolynomial> basis;          ///< basis[n] has degree n
  std::vector<unsigned> scaling_exponents;   ///< basis[n] = 2^e * (monic of degree n)
  unsigned index_exponent = 0;               ///< log2 of the index in Z^c (equivalently in (Z_{2^K})^c)
};

/// max{K - 2n - 2, 0}.
inline unsigned b_scaling(int level, unsigned n) {
  const long s = static_cast<long>(level) - 2 * static_cast<long>(n) - 2;
  return s > 0 ? static_cast<unsigned>(s) : 0u;
}

namespace detail {

inline LatticeDescriptor scaled_basis(int level, unsigned c, bool plus) {
  LatticeDescriptor out;
  out.ambient_rank = c;
  for (unsigned n = 0; n < c; ++n) {
    const unsigned s = b_scaling(level, n);
    out.basis.push_back((mpz_class(1) << s) * (plus ? r_plus(n) : r_minus(n).polynomial));
    out.scaling_exponents.push_back(s);
    out.index_exponent += s;
  }
  return out;
}

}  // namespace detail

/// Basis {2^max{K-2n-2,0} r^-_n} (odd d) or with r^+_n (even d), n < c.
inline LatticeDescriptor b_basis(int level, unsigned d) {
  detail::check_level(level);
  if (d < 5) throw std::invalid_argument("B_K(d) is only available for d >= 5, got d=" + std::to_string(d));
  return detail::scaled_basis(level, ambient_rank(d), d % 2 == 0);
}

}  // namespace fakelens
