#pragma once

// Independent checks of A_K^k(d) = B_K(d).
//
// brute_force_A enumerates (Z_{2^K})^c and knows nothing about r^-_n.
// halving_witnesses proves A <= B from B <= A: A/B is a finite 2-group, so it
// is non-trivial exactly when some v with 2v in B, v not in B, lies in A, and
// those v are represented by the 2^c - 1 non-empty half-sums of the basis.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fakelens/best_polynomials.hpp"
#include "fakelens/errors.hpp"
#include "fakelens/lattice.hpp"

namespace fakelens {

inline constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 20;

/// (2^K)^c, or nullopt if it exceeds 2^63.
inline std::optional<std::uint64_t> enumeration_size(int level, unsigned c) {
  const unsigned long bits = static_cast<unsigned long>(level) * c;
  if (bits >= 63) return std::nullopt;
  return std::uint64_t{1} << bits;
}

inline void check_budget(int level, unsigned c, std::uint64_t budget) {
  const auto size = enumeration_size(level, c);
  if (!size || *size > budget) throw BudgetExceeded(size.value_or(~std::uint64_t{0}), budget);
}

struct OracleLattice {
  EchelonLattice lattice{0};
  LatticeDescriptor descriptor;
  std::uint64_t members = 0;  ///< points of (Z_{2^K})^c in A
};

/// Enumerates every coefficient vector in (Z_{2^K})^c, tests membership_A on
/// its lift in [0, 2^K), and returns the lattice the members generate
/// together with 2^K Z^c.
inline OracleLattice brute_force_A(int level, std::uint64_t k, unsigned d, std::uint64_t budget = kDefaultBudget,
                                   std::optional<int> m = std::nullopt) {
  detail::check_level(level);
  detail::check_odd(k);
  const unsigned c = ambient_rank(d);
  if (c == 0) throw std::invalid_argument("d must be at least 3");
  check_budget(level, c, budget);
  const mpz_class modulus = mpz_class(1) << level;

  OracleLattice out;
  out.lattice = EchelonLattice(c);
  for (unsigned j = 0; j < c; ++j) {
    const IntPolynomial scaled = IntPolynomial::monomial(j, modulus);
    if (!membership_A(scaled, level, k, d, m))
      throw InconsistencyError("2^K x^" + std::to_string(j) + " is not in A at K=" + std::to_string(level));
    out.lattice.insert(scaled);
  }

  const std::uint64_t total = *enumeration_size(level, c);
  const std::uint64_t mask = (std::uint64_t{1} << level) - 1;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::vector<mpz_class> coeffs(c);
    for (unsigned j = 0; j < c; ++j) coeffs[j] = static_cast<unsigned long>((code >> (j * level)) & mask);
    const IntPolynomial q(coeffs);
    if (!membership_A(q, level, k, d, m)) continue;
    ++out.members;
    out.lattice.insert(q);
  }

  // The members are exactly L / 2^K Z^c, so |members| * [Z^c : L] = 2^(Kc).
  const mpz_class idx = out.lattice.index();
  if (idx * out.members != mpz_class(1) << (level * c))
    throw InconsistencyError("member count " + std::to_string(out.members) + " disagrees with index " + idx.get_str());

  out.descriptor.ambient_rank = c;
  out.descriptor.basis = out.lattice.basis();
  for (const auto& p : out.lattice.pivots()) {
    const auto e = static_cast<unsigned>(mpz_scan1(p.get_mpz_t(), 0));
    if (p != mpz_class(1) << e) throw InconsistencyError("oracle pivot " + p.get_str() + " is not a power of two");
    out.descriptor.scaling_exponents.push_back(e);
    out.descriptor.index_exponent += e;
  }
  return out;
}

/// Non-empty subsets S of {0..c-1} for which (sum_{n in S} basis[n]) / 2 is
/// integral and lies in A. Empty means A <= B (given B <= A).
inline std::vector<std::uint64_t> halving_witnesses(const LatticeDescriptor& b, int level, std::uint64_t k, unsigned d,
                                                    std::optional<int> m = std::nullopt) {
  std::vector<std::uint64_t> found;
  const unsigned c = b.ambient_rank;
  for (std::uint64_t subset = 1; subset < (std::uint64_t{1} << c); ++subset) {
    IntPolynomial sum;
    for (unsigned n = 0; n < c; ++n)
      if ((subset >> n) & 1u) sum += b.basis[n];
    bool even = true;
    for (const auto& coeff : sum.coefficients()) even = even && mpz_even_p(coeff.get_mpz_t());
    if (!even) continue;
    std::vector<mpz_class> half;
    for (const auto& coeff : sum.coefficients()) half.push_back(coeff / 2);
    if (membership_A(IntPolynomial(std::move(half)), level, k, d, m)) found.push_back(subset);
  }
  return found;
}

struct AEqualsBReport {
  int level = 0;
  std::uint64_t k = 1;
  unsigned d = 0;
  std::vector<bool> basis_in_A;                 ///< B <= A, per basis element
  std::vector<std::uint64_t> halving_failures;  ///< non-empty means A is strictly larger than B
  bool oracle_run = false;
  unsigned oracle_index_exponent = 0;
  unsigned b_index_exponent = 0;
  bool oracle_contains_B = false;
  bool B_contains_oracle = false;

  bool passed() const {
    for (bool in : basis_in_A)
      if (!in) return false;
    if (!halving_failures.empty()) return false;
    if (oracle_run)
      return oracle_index_exponent == b_index_exponent && oracle_contains_B && B_contains_oracle;
    return true;
  }
};

/// Checks B <= A by direct membership, A <= B by the halving argument, and,
/// when the enumeration fits the budget, compares against brute_force_A.
inline AEqualsBReport verify_A_equals_B(int level, std::uint64_t k, unsigned d, std::uint64_t budget = kDefaultBudget,
                                        bool require_oracle = true) {
  AEqualsBReport rep;
  rep.level = level;
  rep.k = k;
  rep.d = d;
  const LatticeDescriptor b = b_basis(level, d);
  rep.b_index_exponent = b.index_exponent;
  for (const auto& p : b.basis) rep.basis_in_A.push_back(membership_A(p, level, k, d));
  rep.halving_failures = halving_witnesses(b, level, k, d);

  const auto size = enumeration_size(level, b.ambient_rank);
  if (require_oracle || (size && *size <= budget)) {
    const OracleLattice oracle = brute_force_A(level, k, d, budget);
    EchelonLattice b_lattice = EchelonLattice::from_polynomials(b.ambient_rank, b.basis);
    rep.oracle_run = true;
    rep.oracle_index_exponent = oracle.descriptor.index_exponent;
    rep.oracle_contains_B = oracle.lattice.contains(b_lattice);
    rep.B_contains_oracle = b_lattice.contains(oracle.lattice);
  }
  return rep;
}

struct ShapeReport {
  unsigned n = 0;
  int level = 0;
  std::uint64_t k = 1;
  bool span_in_A = false;                  ///< every 2^max{2(n-l)+1,0} r^-_l passes
  std::vector<std::uint64_t> extra_points; ///< halving witnesses outside the span
  bool holds() const { return span_in_A && extra_points.empty(); }
};

/// Tests the claim that every degree <= n polynomial q with
/// 8 f_k q(f^2) in 4 Z[chi]/I<2n+3> lies in the span of
/// {2^max{2(n-l)+1,0} r^-_l : l <= n}.
inline ShapeReport shape_check(unsigned n, std::uint64_t k = 1) {
  ShapeReport rep;
  rep.n = n;
  rep.level = static_cast<int>(2 * n + 3);
  rep.k = k;
  const unsigned d = 2 * n + 3;  // c = n + 1
  const LatticeDescriptor span = detail::scaled_basis(rep.level, n + 1, false);
  rep.span_in_A = true;
  for (const auto& p : span.basis) rep.span_in_A = rep.span_in_A && membership_A(p, rep.level, k, d);
  rep.extra_points = halving_witnesses(span, rep.level, k, d);
  return rep;
}

}  // namespace fakelens
