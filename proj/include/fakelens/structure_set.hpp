#pragma once

// Normal invariants, the [rho~] formulas, and the torsion/free description of
// the structure set of a fake lens space with fundamental group Z_{2^K}.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fakelens/best_polynomials.hpp"
#include "fakelens/errors.hpp"
#include "fakelens/lattice.hpp"
#include "fakelens/oracle.hpp"
#include "fakelens/ring.hpp"

namespace fakelens {

/// (t_4, ..., t_{4c}) in Z_{2^K} and (t_2, ..., t_{4c-2}) in Z_2.
struct NormalInvariantVector {
  unsigned d = 0;
  int level = 0;
  std::vector<mpz_class> t4;
  std::vector<mpz_class> t2;

  static NormalInvariantVector zero(unsigned d, int level) {
    NormalInvariantVector t;
    t.d = d;
    t.level = level;
    t.t4.assign(ambient_rank(d), 0);
    t.t2.assign(ambient_rank(d), 0);
    return t;
  }

  unsigned c() const { return ambient_rank(d); }

  /// Throws unless lengths match c; reduces entries into [0, 2^K) and [0, 2).
  void normalize() {
    detail::check_level(level);
    if (d < 3) throw std::invalid_argument("d must be at least 3");
    if (t4.size() != c() || t2.size() != c())
      throw std::invalid_argument("normal invariant vector needs " + std::to_string(c()) + " entries of each kind");
    const mpz_class modulus = mpz_class(1) << level;
    for (auto& v : t4) mpz_fdiv_r(v.get_mpz_t(), v.get_mpz_t(), modulus.get_mpz_t());
    for (auto& v : t2) mpz_fdiv_r_ui(v.get_mpz_t(), v.get_mpz_t(), 2);
  }

  friend bool operator==(const NormalInvariantVector&, const NormalInvariantVector&) = default;
};

namespace detail {

// Summand i (1-based) of the [rho~] formula with t_{4i} = 1.
inline RingElement rho_term(unsigned d, int level, std::uint64_t k, unsigned i) {
  const RingElement fp = element_f_prime(level, k);
  const RingElement f = element_f(level);
  const unsigned e = d / 2;
  if (d % 2 == 1 && i == e) return fp * f * mpq_class(8);
  const RingElement f2m1 = f * f - RingElement::one(level);
  return fp * f.pow(d - 2 * i - 2) * f2m1 * mpq_class(8);
}

}  // namespace detail

/// Canonical representative of [rho~](t), computed from the summation
/// formula by ring arithmetic. Only t4 enters; lifts are taken in [0, 2^K).
inline RingElement rho_bracket(NormalInvariantVector t, std::uint64_t k) {
  detail::check_odd(k);
  t.normalize();
  RingElement acc = RingElement::zero(t.level);
  for (unsigned i = 1; i <= t.c(); ++i) {
    if (t.t4[i - 1] == 0) continue;
    acc += detail::rho_term(t.d, t.level, k, i) * mpq_class(t.t4[i - 1]);
  }
  return acc;
}

/// The identification of (Z_{2^K})^c with Z_{2^K}[x] of degree < c, on lifts.
inline IntPolynomial t_to_polynomial(NormalInvariantVector t) {
  t.normalize();
  const unsigned c = t.c();
  std::vector<mpz_class> coeffs(c);
  if (t.d % 2 == 0) {
    for (unsigned j = 1; j <= c; ++j) coeffs[c - j] = t.t4[j - 1];
  } else {
    coeffs[c - 1] = t.t4[0];
    for (unsigned i = 1; i < c; ++i) coeffs[c - i - 1] = t.t4[i] - t.t4[i - 1];
  }
  return IntPolynomial(std::move(coeffs));
}

/// Inverse of t_to_polynomial modulo 2^K; t2 is left zero.
inline NormalInvariantVector polynomial_to_t(const IntPolynomial& q, unsigned d, int level) {
  NormalInvariantVector t = NormalInvariantVector::zero(d, level);
  const unsigned c = t.c();
  if (q.degree() >= static_cast<int>(c)) throw std::invalid_argument("polynomial degree exceeds c - 1");
  if (d % 2 == 0) {
    for (unsigned j = 1; j <= c; ++j) t.t4[j - 1] = q.coefficient(c - j);
  } else {
    t.t4[0] = q.coefficient(c - 1);
    for (unsigned i = 1; i < c; ++i) t.t4[i] = t.t4[i - 1] + q.coefficient(c - i - 1);
  }
  t.normalize();
  return t;
}

/// Free rank of the structure set: N/2 - 1 for odd d, N/2 for even d.
inline mpz_class free_rank(unsigned d, int level) {
  detail::check_level(level);
  if (d < 3) throw std::invalid_argument("d must be at least 3");
  const mpz_class half = mpz_class(1) << (level - 1);
  return d % 2 == 1 ? mpz_class(half - 1) : half;
}

struct TorsionSummand {
  std::string label;  ///< "r_{4i-2}" or "r_{4i}" with i substituted
  unsigned exponent;  ///< order is 2^exponent
  mpz_class order() const { return mpz_class(1) << exponent; }
};

struct StructureSetDescriptor {
  unsigned d = 0;
  int level = 0;
  mpz_class free_rank;
  std::vector<TorsionSummand> torsion;  ///< Z_2 summands first, then the r_{4i}
  mpz_class N() const { return mpz_class(1) << level; }
};

inline unsigned r4_exponent(int level, unsigned i) {
  return std::min(static_cast<unsigned>(level), 2 * i);
}

/// c summands of order 2 labelled r_{4i-2}, then r_{4i} of order 2^min{K, 2i}.
inline std::vector<TorsionSummand> t_bar(unsigned d, int level) {
  detail::check_level(level);
  if (d < 5) throw std::invalid_argument("torsion is only computed for d >= 5, got d=" + std::to_string(d));
  const unsigned c = ambient_rank(d);
  std::vector<TorsionSummand> out;
  for (unsigned i = 1; i <= c; ++i) out.push_back({"r_" + std::to_string(4 * i - 2), 1});
  for (unsigned i = 1; i <= c; ++i) out.push_back({"r_" + std::to_string(4 * i), r4_exponent(level, i)});
  return out;
}

inline StructureSetDescriptor structure_set(unsigned d, int level) {
  StructureSetDescriptor s;
  s.d = d;
  s.level = level;
  s.torsion = t_bar(d, level);
  s.free_rank = free_rank(d, level);
  return s;
}

struct KernelReport {
  unsigned d = 0;
  int level = 0;
  std::uint64_t k = 1;
  std::uint64_t members = 0;
  std::vector<unsigned> divisor_exponents;  ///< ascending, one per cyclic factor
  EchelonLattice subgroup{0};               ///< kernel lifts plus 2^K Z^c, in t4 coordinates
  std::uint64_t route_disagreements = 0;    ///< t where rho_bracket and membership_A disagree
};

/// Enumerates all t4 in (Z_{2^K})^c, keeps those with rho_bracket(t) in 4Z,
/// and reads the elementary divisors off |H[2^j]|. Each t is also checked
/// against membership_A(t_to_polynomial(t)).
inline KernelReport kernel_oracle(unsigned d, int level, std::uint64_t k, std::uint64_t budget = kDefaultBudget) {
  detail::check_level(level);
  detail::check_odd(k);
  if (d < 3) throw std::invalid_argument("d must be at least 3");
  const unsigned c = ambient_rank(d);
  check_budget(level, c, budget);

  KernelReport rep;
  rep.d = d;
  rep.level = level;
  rep.k = k;
  rep.subgroup = EchelonLattice(c);
  for (unsigned j = 0; j < c; ++j) {
    std::vector<mpz_class> v(c);
    v[j] = mpz_class(1) << level;
    rep.subgroup.insert(std::move(v));
  }

  std::vector<RingElement> terms;
  for (unsigned i = 1; i <= c; ++i) terms.push_back(detail::rho_term(d, level, k, i));

  // killed[j] counts members annihilated by 2^j.
  std::vector<std::uint64_t> killed(static_cast<std::size_t>(level) + 1, 0);
  const std::uint64_t total = *enumeration_size(level, c);
  const std::uint64_t mask = (std::uint64_t{1} << level) - 1;
  NormalInvariantVector t = NormalInvariantVector::zero(d, level);
  for (std::uint64_t code = 0; code < total; ++code) {
    RingElement rho = RingElement::zero(level);
    unsigned two_adic = static_cast<unsigned>(level);  // min v2 over entries
    for (unsigned i = 0; i < c; ++i) {
      const std::uint64_t v = (code >> (i * level)) & mask;
      t.t4[i] = static_cast<unsigned long>(v);
      if (v != 0) {
        rho += terms[i] * mpq_class(t.t4[i]);
        two_adic = std::min(two_adic, static_cast<unsigned>(__builtin_ctzll(v)));
      }
    }
    const bool in_kernel = is_in_4Z(rho);
    if (in_kernel != membership_A(t_to_polynomial(t), level, k, d)) ++rep.route_disagreements;
    if (!in_kernel) continue;
    ++rep.members;
    rep.subgroup.insert(t.t4);
    // Order of t is 2^(K - two_adic).
    for (unsigned j = static_cast<unsigned>(level) - two_adic; j <= static_cast<unsigned>(level); ++j) ++killed[j];
  }

  // The number of cyclic factors of order >= 2^j is log2(|H[2^j]| / |H[2^(j-1)]|).
  std::vector<unsigned> at_least(static_cast<std::size_t>(level) + 2, 0);
  for (int j = 1; j <= level; ++j) {
    const std::uint64_t ratio = killed[j] / killed[j - 1];
    if (ratio * killed[j - 1] != killed[j] || (ratio & (ratio - 1)) != 0)
      throw InconsistencyError("kernel is not a subgroup at 2-torsion step " + std::to_string(j));
    at_least[j] = static_cast<unsigned>(__builtin_ctzll(ratio));
  }
  for (int j = 1; j <= level; ++j)
    for (unsigned n = at_least[j] - at_least[j + 1]; n > 0; --n) rep.divisor_exponents.push_back(static_cast<unsigned>(j));
  return rep;
}

/// Invariants r_{4i-2} (= t_{4i-2}) and r_{4i} for t in T-bar.
struct RCoordinates {
  std::vector<mpz_class> r2;  ///< r_{4i-2} in Z_2
  std::vector<mpz_class> r4;  ///< r_{4i} in Z_{2^min{K,2i}}
};

/// Coordinates of t_to_polynomial(t) in the basis {2^max{K-2n-2,0} r^-+_n}
/// by back-substitution on degree. Throws std::domain_error if t is not in
/// the kernel of [rho~].
inline RCoordinates r_coordinates(NormalInvariantVector t, std::uint64_t k) {
  detail::check_odd(k);
  t.normalize();
  if (t.d < 5) throw std::invalid_argument("r-coordinates need d >= 5");
  if (!is_in_4Z(rho_bracket(t, k))) throw std::domain_error("t is not in the kernel of [rho~]");
  const LatticeDescriptor b = b_basis(t.level, t.d);
  const unsigned c = t.c();
  IntPolynomial rest = t_to_polynomial(t);
  RCoordinates out;
  out.r2 = t.t2;
  out.r4.assign(c, 0);
  for (unsigned n = c; n-- > 0;) {
    const mpz_class top = rest.coefficient(n);
    const mpz_class scale = mpz_class(1) << b.scaling_exponents[n];
    if (!mpz_divisible_p(top.get_mpz_t(), scale.get_mpz_t()))
      throw InconsistencyError("kernel element outside the r-basis lattice at degree " + std::to_string(n));
    const mpz_class coord = top / scale;
    rest -= coord * b.basis[n];
    const mpz_class modulus = mpz_class(1) << r4_exponent(t.level, n + 1);
    mpz_fdiv_r(out.r4[n].get_mpz_t(), coord.get_mpz_t(), modulus.get_mpz_t());
  }
  // What remains is a multiple of 2^K, which is zero in the coordinates.
  return out;
}

/// Builds a t in T-bar from coordinates: sum of r4[n] times the scaled basis,
/// pushed back through the identification; t2 = r2.
inline NormalInvariantVector reassemble(const RCoordinates& r, unsigned d, int level) {
  const LatticeDescriptor b = b_basis(level, d);
  if (r.r4.size() != b.ambient_rank || r.r2.size() != b.ambient_rank)
    throw std::invalid_argument("coordinate vector length differs from c");
  IntPolynomial q;
  for (unsigned n = 0; n < b.ambient_rank; ++n) q += r.r4[n] * b.basis[n];
  NormalInvariantVector t = polynomial_to_t(q, d, level);
  t.t2 = r.r2;
  t.normalize();
  return t;
}

}  // namespace fakelens
