#include <gtest/gtest.h>

#include <random>

#include "fakelens/structure_set.hpp"
#include "test_support.hpp"

using namespace fakelens;
using fakelens::testing::kSeed;

namespace {

NormalInvariantVector make_t(unsigned d, int level, std::vector<long> t4, std::vector<long> t2 = {}) {
  NormalInvariantVector t = NormalInvariantVector::zero(d, level);
  for (std::size_t i = 0; i < t4.size(); ++i) t.t4[i] = t4[i];
  for (std::size_t i = 0; i < t2.size(); ++i) t.t2[i] = t2[i];
  return t;
}

NormalInvariantVector random_t(unsigned d, int level, std::mt19937_64& rng) {
  NormalInvariantVector t = NormalInvariantVector::zero(d, level);
  std::uniform_int_distribution<long> res(0, (1L << level) - 1), bit(0, 1);
  for (auto& v : t.t4) v = res(rng);
  for (auto& v : t.t2) v = bit(rng);
  return t;
}

std::vector<unsigned> orders(const std::vector<TorsionSummand>& s) {
  std::vector<unsigned> out;
  for (const auto& x : s) out.push_back(static_cast<unsigned>(x.order().get_ui()));
  return out;
}

std::vector<unsigned> formula_exponents(unsigned d, int level) {
  std::vector<unsigned> out;
  for (unsigned i = 1; i <= ambient_rank(d); ++i) out.push_back(r4_exponent(level, i));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(RhoBracket, ZeroAndLastSummand) {
  EXPECT_TRUE(rho_bracket(NormalInvariantVector::zero(7, 2), 1).is_zero());
  EXPECT_EQ(rho_bracket(make_t(7, 2, {0, 0, 1}), 1), element_f(2) * mpq_class(8));
  EXPECT_THROW(rho_bracket(make_t(7, 2, {0, 0, 1}), 2), std::invalid_argument);
}

TEST(RhoBracket, IgnoresT2AndIsAdditive) {
  std::mt19937_64 rng(kSeed + 40);
  for (unsigned d : {5u, 6u, 7u, 8u}) {
    for (int level = 1; level <= 4; ++level) {
      for (int i = 0; i < 10; ++i) {
        NormalInvariantVector a = random_t(d, level, rng), b = random_t(d, level, rng);
        NormalInvariantVector a2 = a;
        a2.t2 = b.t2;
        EXPECT_EQ(rho_bracket(a, 3), rho_bracket(a2, 3));
        // Sum of lifts without reduction is exactly additive.
        RingElement sum = RingElement::zero(level);
        for (unsigned j = 1; j <= ambient_rank(d); ++j)
          sum += detail::rho_term(d, level, 3, j) * mpq_class(a.t4[j - 1] + b.t4[j - 1]);
        EXPECT_EQ(sum, rho_bracket(a, 3) + rho_bracket(b, 3));
      }
    }
  }
}

TEST(RhoBracket, MatchesFastPath) {
  std::mt19937_64 rng(kSeed + 41);
  for (unsigned d : {5u, 6u, 7u, 8u, 9u}) {
    for (int level = 1; level <= 5; ++level) {
      const NormalInvariantVector t = random_t(d, level, rng);
      const Prefactor pre = d % 2 ? Prefactor::f_power(1) : Prefactor::f_squared_minus_one();
      EXPECT_EQ(rho_bracket(t, 5), evaluate_at_f_squared(t_to_polynomial(t), level, 5, pre)) << d << " " << level;
    }
  }
}

TEST(TToPolynomial, Examples) {
  EXPECT_EQ(t_to_polynomial(make_t(8, 3, {1, 0, 0})), IntPolynomial::monomial(2));
  EXPECT_EQ(t_to_polynomial(make_t(3, 3, {5})), (IntPolynomial{5}));
  EXPECT_EQ(t_to_polynomial(make_t(5, 3, {1, 1})), IntPolynomial::monomial(1));
  EXPECT_EQ(t_to_polynomial(make_t(5, 3, {-1, 9})), (IntPolynomial{-6, 7}));
}

TEST(TToPolynomial, InverseModN) {
  std::mt19937_64 rng(kSeed + 42);
  for (unsigned d : {5u, 6u, 7u, 8u, 9u}) {
    for (int i = 0; i < 20; ++i) {
      NormalInvariantVector t = random_t(d, 4, rng);
      t.t2.assign(t.c(), 0);
      EXPECT_EQ(polynomial_to_t(t_to_polynomial(t), d, 4), t);
    }
  }
}

TEST(TBar, Examples) {
  EXPECT_EQ(orders(t_bar(5, 3)), (std::vector<unsigned>{2, 2, 4, 8}));
  EXPECT_EQ(orders(t_bar(7, 1)), (std::vector<unsigned>(6, 2)));
  EXPECT_EQ(orders(t_bar(6, 4)), (std::vector<unsigned>{2, 2, 4, 16}));
  EXPECT_EQ(t_bar(7, 3)[0].label, "r_2");
  EXPECT_EQ(t_bar(7, 3)[2].label, "r_10");
  EXPECT_EQ(t_bar(7, 3)[3].label, "r_4");
  EXPECT_EQ(t_bar(7, 3)[5].label, "r_12");
  EXPECT_THROW(t_bar(4, 3), std::invalid_argument);
}

TEST(StructureSet, Examples) {
  const auto a = structure_set(5, 3);
  EXPECT_EQ(a.free_rank, 3);
  EXPECT_EQ(orders(a.torsion), (std::vector<unsigned>{2, 2, 4, 8}));
  const auto b = structure_set(6, 2);
  EXPECT_EQ(b.free_rank, 2);
  EXPECT_EQ(orders(b.torsion), (std::vector<unsigned>{2, 2, 4, 4}));
  const auto c = structure_set(5, 1);
  EXPECT_EQ(c.free_rank, 0);
  EXPECT_EQ(orders(c.torsion), (std::vector<unsigned>(4, 2)));
  EXPECT_EQ(free_rank(4, 3), 4);
  EXPECT_EQ(free_rank(3, 3), 3);
  EXPECT_THROW(structure_set(3, 2), std::invalid_argument);
}

TEST(KernelOracle, Examples) {
  const KernelReport full = kernel_oracle(7, 1, 1);
  EXPECT_EQ(full.members, 8u);
  EXPECT_EQ(full.divisor_exponents, (std::vector<unsigned>{1, 1, 1}));
  EXPECT_EQ(kernel_oracle(5, 2, 1).divisor_exponents, (std::vector<unsigned>{2, 2}));
  const KernelReport r = kernel_oracle(7, 3, 3);
  EXPECT_EQ(r.divisor_exponents, (std::vector<unsigned>{2, 3, 3}));
  EXPECT_EQ(r.route_disagreements, 0u);
  EXPECT_THROW(kernel_oracle(9, 6, 1, 1000), BudgetExceeded);
}

TEST(KernelOracle, MatchesFormulaAndIsKIndependent) {
  for (unsigned d = 5; d <= 9; ++d) {
    for (int level = 1; level <= 3; ++level) {
      const KernelReport base = kernel_oracle(d, level, 1);
      EXPECT_EQ(base.divisor_exponents, formula_exponents(d, level)) << d << " " << level;
      EXPECT_EQ(base.route_disagreements, 0u);
      for (std::uint64_t k : {3, 5}) {
        const KernelReport other = kernel_oracle(d, level, k);
        EXPECT_EQ(other.subgroup, base.subgroup) << d << " " << level << " k=" << k;
        EXPECT_EQ(other.route_disagreements, 0u);
      }
    }
  }
}

TEST(RCoordinates, ZeroAndUnitVectors) {
  const RCoordinates z = r_coordinates(NormalInvariantVector::zero(7, 3), 1);
  EXPECT_EQ(z.r4, (std::vector<mpz_class>(3, 0)));
  for (unsigned d : {7u, 8u}) {
    const int level = 3;
    const LatticeDescriptor b = b_basis(level, d);
    for (unsigned n = 0; n < b.ambient_rank; ++n) {
      NormalInvariantVector t = polynomial_to_t(b.basis[n], d, level);
      const RCoordinates r = r_coordinates(t, 1);
      for (unsigned j = 0; j < b.ambient_rank; ++j) EXPECT_EQ(r.r4[j], j == n ? 1 : 0) << d << " " << n << " " << j;
    }
  }
}

TEST(RCoordinates, RejectsNonKernel) {
  EXPECT_THROW(r_coordinates(make_t(7, 3, {0, 0, 1}), 1), std::domain_error);
}

TEST(RCoordinates, RoundTrip) {
  // Random kernel elements from random coordinates, then coordinates back.
  std::mt19937_64 rng(kSeed + 43);
  const unsigned d = 7;
  const int level = 3;
  for (int i = 0; i < 100; ++i) {
    RCoordinates r;
    for (unsigned n = 1; n <= 3; ++n) {
      std::uniform_int_distribution<long> res(0, (1L << r4_exponent(level, n)) - 1), bit(0, 1);
      r.r4.emplace_back(res(rng));
      r.r2.emplace_back(bit(rng));
    }
    const NormalInvariantVector t = reassemble(r, d, level);
    EXPECT_TRUE(is_in_4Z(rho_bracket(t, 1)));
    const RCoordinates back = r_coordinates(t, 1);
    EXPECT_EQ(back.r4, r.r4);
    EXPECT_EQ(back.r2, r.r2);
    // Same coset of A: the difference of the polynomials lies in A.
    const IntPolynomial diff = t_to_polynomial(reassemble(back, d, level)) - t_to_polynomial(t);
    EXPECT_TRUE(membership_A(diff, level, 1, d));
  }
}

TEST(RCoordinates, LiftIndependence) {
  std::mt19937_64 rng(kSeed + 44);
  const KernelReport ker = kernel_oracle(8, 3, 1);
  for (const auto& row : ker.subgroup.basis()) {
    NormalInvariantVector t = NormalInvariantVector::zero(8, 3);
    for (unsigned i = 0; i < t.c(); ++i) t.t4[i] = row.coefficient(i);
    NormalInvariantVector shifted = t;
    for (auto& v : shifted.t4) v += 8 * static_cast<long>(rng() % 5);
    EXPECT_EQ(r_coordinates(t, 1).r4, r_coordinates(shifted, 1).r4);
  }
}
