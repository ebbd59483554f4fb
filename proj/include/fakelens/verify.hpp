#pragma once

// Verification suites shared by `fakelens verify` and the acceptance binary.
// Every check is exact; a result records how many checks ran and the first
// failure.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fakelens/best_polynomials.hpp"
#include "fakelens/oracle.hpp"
#include "fakelens/ring.hpp"
#include "fakelens/sampling.hpp"
#include "fakelens/structure_set.hpp"
#include "fakelens/valuation.hpp"

namespace fakelens {

struct CheckResult {
  CheckResult() = default;
  explicit CheckResult(std::string n) : name(std::move(n)) {}

  std::string name;
  bool passed = true;
  std::uint64_t checks = 0;
  std::uint64_t skipped = 0;
  std::string detail;  ///< first failure

  // The message is only built on failure.
  bool expect(bool ok, const std::function<std::string()>& what) {
    ++checks;
    if (!ok && passed) {
      passed = false;
      detail = what();
    }
    return ok;
  }
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> results;
  bool passed() const {
    for (const auto& r : results)
      if (!r.passed) return false;
    return true;
  }
};

struct VerifyOptions {
  std::uint64_t budget = kDefaultBudget;
  std::uint64_t seed = kDefaultSeed;
};

namespace detail {

inline mpq_class dyadic(long num, int exp) {
  mpq_class q(num, mpz_class(1) << exp);
  q.canonicalize();
  return q;
}

inline bool valued(const Valuation& v, const mpq_class& q) { return !v.is_infinite() && v.value() == q; }

inline std::string where(std::initializer_list<std::pair<const char*, long>> kv) {
  std::string s;
  for (const auto& [k, v] : kv) s += std::string(s.empty() ? "" : " ") + k + "=" + std::to_string(v);
  return s;
}

inline bool ladder_member(const IntPolynomial& q, int level, std::uint64_t k, int m, unsigned shift) {
  return is_in_4Z(evaluate_at_f_squared(q, level, k, Prefactor::f_power(m)).times_one_minus_chi_power(shift));
}

}  // namespace detail

/// The six worked w_l examples for K <= 6, all l < K, k in {1,3,5,7}.
inline CheckResult check_worked_examples() {
  CheckResult r{"worked-examples"};
  for (int level = 1; level <= 6; ++level) {
    const RingElement one = RingElement::one(level);
    const RingElement f = element_f(level);
    const RingElement f2 = f * f;
    for (int l = 0; l < level; ++l) {
      const auto at = [&](const char* what) {
        return [=] { return std::string(what) + " at " + detail::where({{"K", level}, {"l", l}}); };
      };
      for (int a = -3; a <= 5; ++a) {
        const mpq_class two_a = a >= 0 ? mpq_class(mpz_class(1) << a) : detail::dyadic(1, -a);
        r.expect(detail::valued(w_l(one * two_a, l), a), at("w_l(2^a)"));
      }
      const Valuation wf = w_l(f, l);
      r.expect(l == 0 ? wf.is_infinite() : detail::valued(wf, 0), at("w_l(f)"));
      r.expect(detail::valued(w_l(f + one, l), 1 - detail::dyadic(1, l)), at("w_l(f+1)"));
      r.expect(detail::valued(w_l(f - one, l), 1 - detail::dyadic(1, l)), at("w_l(f-1)"));
      r.expect(detail::valued(w_l(f2 - one, l), 2 - detail::dyadic(2, l)), at("w_l(f^2-1)"));
      const Valuation wp = w_l(f2 + one, l);
      r.expect(l == 1 ? wp.is_infinite() : detail::valued(wp, l == 0 ? 0 : 1), at("w_l(f^2+1)"));
      for (std::uint64_t k : {1, 3, 5, 7})
        r.expect(detail::valued(w_l(element_f_prime(level, k), l), 0), at("w_l(f'_k)"));
    }
  }
  return r;
}

/// p_k(f^2) (1 - chi)^(2^k) = 2^(2^k - 1) (1 + chi^(2^k)) for k <= 4, k < K <= 6.
inline CheckResult check_p_identities() {
  CheckResult r{"p-identities"};
  for (unsigned k = 1; k <= 4; ++k) {
    const IntPolynomial pk = p_k(k);
    for (int level = static_cast<int>(k) + 1; level <= 6; ++level) {
      const RingElement f = element_f(level);
      const RingElement f2 = f * f;
      RingElement at = RingElement::zero(level);
      for (int j = pk.degree(); j >= 0; --j)
        at = at * f2 + RingElement::one(level) * mpq_class(pk.coefficient(static_cast<std::size_t>(j)));
      const std::uint64_t two_k = std::uint64_t{1} << k;
      const RingElement lhs = at.times_one_minus_chi_power(static_cast<unsigned>(two_k));
      const RingElement rhs = RingElement::one(level).times_binomial(two_k, 1) * mpq_class(mpz_class(1) << (two_k - 1));
      r.expect(lhs == rhs, [&] { return "identity fails at " + detail::where({{"k", k}, {"K", level}}); });
    }
  }
  return r;
}

/// Membership ladder of 8 f'_k f^m q_n(f^2) for n <= 5, k in {1,3}, m in {1,2}.
inline CheckResult check_q_ladder() {
  CheckResult r{"q-ladder"};
  for (unsigned n = 0; n <= 5; ++n) {
    const Split s = split_n(n);
    const IntPolynomial q = q_n(n);
    const int lo = static_cast<int>(2 * n);
    for (std::uint64_t k : {1, 3}) {
      for (int m : {1, 2}) {
        const auto at = [&](const char* what) {
          return [=] {
            return std::string(what) + " at " + detail::where({{"n", n}, {"k", static_cast<long>(k)}, {"m", m}});
          };
        };
        r.expect(detail::ladder_member(q, lo + 1, k, m, 0), at("not in 4Z at 2n+1"));
        r.expect(detail::ladder_member(q, lo + 2, k, m, 0) == (s.b == 0), at("membership at 2n+2 differs from b(n)=0"));
        r.expect(!detail::ladder_member(q, lo + 3, k, m, 0), at("in 4Z at 2n+3"));
        if (s.b > 0)
          r.expect(detail::ladder_member(q, lo + 2, k, m, static_cast<unsigned>(2 * s.b - 1)),
                   at("(1-chi)^(2b-1) multiple not in 4Z at 2n+2"));
        for (unsigned sh : {1u, 2u}) {
          const unsigned e = 2 * n + 1 + (1u << s.a) * ((1u << sh) - 2);
          r.expect(detail::ladder_member(q, lo + 2 + static_cast<int>(sh), k, m, e),
                   at(sh == 1 ? "shifted multiple not in 4Z at 2n+3" : "shifted multiple not in 4Z at 2n+4"));
        }
        r.expect(!detail::ladder_member(q, lo + 3, k, m, 2 * n), at("(1-chi)^(2n) multiple in 4Z at 2n+3"));
      }
    }
  }
  return r;
}

/// The search reproduces r^-_0 .. r^-_4 and is unique for n <= 6 and every (k, m).
inline CheckResult check_r_table() {
  CheckResult r{"r-uniqueness"};
  const std::vector<IntPolynomial> expected = {q_n(0), q_n(1), q_n(2) + mpz_class(8) * q_n(0), q_n(3),
                                                q_n(4) + mpz_class(128) * q_n(0)};
  try {
    // PolynomialTables throws unless exactly one bit vector succeeds and it is the same for all (k, m).
    for (unsigned n = 0; n <= 6; ++n) r.expect(r_minus(n).chosen_bits.size() == n / 2, [&] { return "bit count"; });
    for (unsigned n = 0; n < expected.size(); ++n)
      r.expect(r_minus(n).polynomial == expected[n],
               [&] { return "r^-_" + std::to_string(n) + " = " + r_minus(n).polynomial.to_string(); });
    // Redo the search explicitly to count the successes.
    for (unsigned n = 0; n <= 6; ++n) {
      std::vector<const IntPolynomial*> lower;
      for (unsigned l = 0; l < n / 2; ++l) lower.push_back(&r_minus(l).polynomial);
      for (std::uint64_t k : {1, 3})
        for (int m : {1, 2}) {
          const auto hits = detail::r_minus_successes(n, q_n(n), lower, k, m);
          r.expect(hits.size() == 1, [&] {
            return std::to_string(hits.size()) + " successes at " +
                   detail::where({{"n", n}, {"k", static_cast<long>(k)}, {"m", m}});
          });
        }
    }
  } catch (const InconsistencyError& e) {
    r.expect(false, [&] { return std::string(e.what()); });
  }
  return r;
}

/// brute_force_A equals B_K(d) for K <= 4, k in {1,3,5}, d in 5..9 within the budget.
inline CheckResult check_a_equals_b(const VerifyOptions& opt = {}) {
  CheckResult r{"a-eq-b"};
  for (int level = 1; level <= 4; ++level)
    for (std::uint64_t k : {1, 3, 5})
      for (unsigned d = 5; d <= 9; ++d) {
        const auto size = enumeration_size(level, ambient_rank(d));
        if (!size || *size > opt.budget) {
          ++r.skipped;
          continue;
        }
        const AEqualsBReport rep = verify_A_equals_B(level, k, d, opt.budget);
        r.expect(rep.passed(), [&] {
          return "A != B at " + detail::where({{"K", level}, {"k", static_cast<long>(k)}, {"d", d}}) +
                 " (oracle index 2^" + std::to_string(rep.oracle_index_exponent) + ", B index 2^" +
                 std::to_string(rep.b_index_exponent) + ")";
        });
      }
  return r;
}

/// Elementary divisors of ker[rho~] equal 2^min{K,2i} for d <= 9, K <= 3,
/// k in {1,3}, and the two membership routes agree pointwise.
inline CheckResult check_kernel(const VerifyOptions& opt = {}) {
  CheckResult r{"kernel"};
  for (unsigned d = 3; d <= 9; ++d)
    for (int level = 1; level <= 3; ++level)
      for (std::uint64_t k : {1, 3}) {
        const auto size = enumeration_size(level, ambient_rank(d));
        if (!size || *size > opt.budget) {
          ++r.skipped;
          continue;
        }
        const KernelReport rep = kernel_oracle(d, level, k, opt.budget);
        std::vector<unsigned> expected;
        for (unsigned i = 1; i <= ambient_rank(d); ++i) expected.push_back(r4_exponent(level, i));
        std::sort(expected.begin(), expected.end());
        const auto at = detail::where({{"d", d}, {"K", level}, {"k", static_cast<long>(k)}});
        r.expect(rep.divisor_exponents == expected, [&] { return "elementary divisors differ at " + at; });
        r.expect(rep.route_disagreements == 0, [&] {
          return std::to_string(rep.route_disagreements) + " rho/membership disagreements at " + at;
        });
      }
  return r;
}

/// Random-input properties: w_l rules, CRT, criterion soundness, injectivity
/// of f on the minus part, beta round-trip, auxiliary x_k identity.
inline CheckResult check_properties(const VerifyOptions& opt = {}) {
  CheckResult r{"properties"};
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> pick(0, 31), shape(0, 3), power(0, 12);
  for (int level = 1; level <= 5; ++level) {
    for (int i = 0; i < 500; ++i) {
      const RingElement g1 = random_element(level, rng);
      const RingElement g2 = (i % 4 == 0) ? g1.times_chi_power(pick(rng)) * mpq_class(2 * pick(rng) + 1)
                                          : random_element(level, rng);
      for (int l = 0; l < level; ++l) {
        const Valuation w1 = w_l(g1, l), w2 = w_l(g2, l);
        const auto at = [&](const char* rule) {
          return [=] { return std::string(rule) + " rule fails at " + detail::where({{"K", level}, {"l", l}, {"i", i}}); };
        };
        r.expect(w_l(g1 * g2, l) == w1 + w2, at("product"));
        const Valuation ws = w_l(g1 + g2, l);
        if (w1 != w2)
          r.expect(ws == std::min(w1, w2), at("minimum"));
        else if (!w1.is_infinite())
          r.expect(ws > w1, at("strict increase"));
      }
    }
    for (int i = 0; i < 100; ++i) {
      const RingElement g = random_element(level, rng);
      std::vector<LevelProjection> parts;
      for (int l = 0; l < level; ++l) parts.push_back(project(g, l));
      r.expect(crt_reconstruct(parts) == g, [&] { return "CRT round trip fails for " + g.to_string(); });
    }
    for (int i = 0; i < 500; ++i) {
      RingElement g = random_integral(level, rng, 3);
      switch (shape(rng)) {
        case 0: g = g * mpq_class(4); break;
        case 1: g = (g * mpq_class(mpz_class(1) << power(rng))).divided_by_one_minus_chi_power_of(power(rng) % 5); break;
        case 2: g = (g * element_f(level) * mpq_class(8)).times_one_minus_chi_power(power(rng)); break;
        default: g = g * mpq_class(mpz_class(1) << power(rng)); break;
      }
      const bool exact = is_in_4Z(g);
      const auto unsound = [&](const char* which) {
        return [=] { return std::string(which) + " verdict contradicts exact test for " + g.to_string(); };
      };
      if (criterion_sufficient(g) == Verdict::kProvesMembership) r.expect(exact, unsound("sufficient"));
      if (search_necessary_witness(g)) r.expect(!exact, unsound("necessary"));
      const RingElement h = RingElement::one(level).times_one_minus_chi_power(power(rng));
      for (int l = 0; l < level; ++l)
        if (criterion_necessary(g, h, l) == Verdict::kProvesNonMembership) r.expect(!exact, unsound("necessary"));
    }
    for (int i = 0; i < 100; ++i) {
      const RingElement a = random_integral(level, rng);
      const RingElement z = a - a.conjugate();
      r.expect((element_f(level) * z).is_zero() == z.is_zero(), [&] { return "f z = 0 for " + z.to_string(); });
    }
  }
  std::uniform_int_distribution<long> coeff(-50, 50);
  std::uniform_int_distribution<int> degree(0, 8);
  for (int i = 0; i < 200; ++i) {
    std::vector<mpz_class> c;
    for (int j = 0, dg = degree(rng); j <= dg; ++j) c.emplace_back(coeff(rng));
    const IntPolynomial q(c);
    r.expect(beta_inv(beta(q)) == q && beta(beta_inv(q)) == q,
             [&] { return "beta round trip fails for " + q.to_string(); });
  }
  for (unsigned k = 0; k <= 5; ++k) {
    const IntPolynomial lhs = IntPolynomial::binomial_power(1, -1, 1u << k);
    const IntPolynomial rhs =
        mpz_class(2) * auxiliary_x(k) + IntPolynomial{1} + IntPolynomial::monomial(std::size_t{1} << k);
    r.expect(lhs == rhs, [&] { return "x_k identity fails at k=" + std::to_string(k); });
  }
  return r;
}

/// One (d, K) case of the structure-set check: closed formulas, and for
/// K <= 3 the kernel oracle's divisors.
inline void check_structure_set_case(unsigned d, int level, const VerifyOptions& opt, CheckResult& r) {
  const StructureSetDescriptor s = structure_set(d, level);
  const unsigned c = (d - 1) / 2;
  const long n = 1L << level;
  const auto at = detail::where({{"d", d}, {"K", level}});
  r.expect(s.free_rank == (d % 2 ? n / 2 - 1 : n / 2), [&] { return "free rank at " + at; });
  bool shape = s.torsion.size() == 2 * c;
  for (unsigned i = 1; shape && i <= c; ++i) {
    const long expected = 1L << std::min(level, static_cast<int>(2 * i));
    shape = s.torsion[i - 1].order() == 2 && s.torsion[i - 1].label == "r_" + std::to_string(4 * i - 2) &&
            s.torsion[c + i - 1].order() == expected && s.torsion[c + i - 1].label == "r_" + std::to_string(4 * i);
  }
  r.expect(shape, [&] { return "torsion at " + at; });
  if (level > 3) return;
  if (!enumeration_size(level, c) || *enumeration_size(level, c) > opt.budget) {
    ++r.skipped;
    return;
  }
  std::vector<unsigned> from_descriptor;
  for (unsigned i = c; i < 2 * c; ++i) from_descriptor.push_back(s.torsion[i].exponent);
  std::sort(from_descriptor.begin(), from_descriptor.end());
  r.expect(kernel_oracle(d, level, 1, opt.budget).divisor_exponents == from_descriptor,
           [&] { return "descriptor disagrees with kernel oracle at " + at; });
}

inline CheckResult check_structure_sets(const VerifyOptions& opt = {}) {
  CheckResult r{"structure-set"};
  for (unsigned d = 5; d <= 9; ++d)
    for (int level = 1; level <= 6; ++level) check_structure_set_case(d, level, opt, r);
  return r;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"wl-rules", "p-identities", "q-ladder", "r-uniqueness",
                                                 "a-eq-b",   "kernel",       "all"};
  return names;
}

/// Runs a named suite; throws std::invalid_argument for unknown names.
inline SuiteReport run_suite(const std::string& name, const VerifyOptions& opt = {}) {
  SuiteReport rep{name, {}};
  const bool all = name == "all";
  bool known = all;
  const auto want = [&](const char* s) {
    const bool hit = all || name == s;
    known = known || hit;
    return hit;
  };
  if (want("wl-rules")) {
    rep.results.push_back(check_worked_examples());
    rep.results.push_back(check_properties(opt));
  }
  if (want("p-identities")) rep.results.push_back(check_p_identities());
  if (want("q-ladder")) rep.results.push_back(check_q_ladder());
  if (want("r-uniqueness")) rep.results.push_back(check_r_table());
  if (want("a-eq-b")) rep.results.push_back(check_a_equals_b(opt));
  if (want("kernel")) {
    rep.results.push_back(check_kernel(opt));
    rep.results.push_back(check_structure_sets(opt));
  }
  if (!known) throw std::invalid_argument("unknown suite '" + name + "'");
  return rep;
}

}  // namespace fakelens
