#include <gtest/gtest.h>

#include "fakelens/oracle.hpp"

using namespace fakelens;

TEST(EchelonLattice, InsertAndIndex) {
  EchelonLattice lat(2);
  EXPECT_FALSE(lat.is_full_rank());
  lat.insert(IntPolynomial{4, 0});
  lat.insert(IntPolynomial{0, 6});
  lat.insert(IntPolynomial{2, 3});
  EXPECT_TRUE(lat.is_full_rank());
  // (4,0) = 2(2,3) - (0,6), so the lattice is spanned by (2,3) and (0,6).
  EXPECT_EQ(lat.index(), 12);
  EXPECT_TRUE(lat.contains(IntPolynomial{2, 3}));
  EXPECT_TRUE(lat.contains(IntPolynomial{0, 6}));
  EXPECT_FALSE(lat.contains(IntPolynomial{1, 0}));
  EXPECT_FALSE(lat.contains(IntPolynomial{0, 3}));
}

TEST(EchelonLattice, GcdCombination) {
  EchelonLattice lat(1);
  lat.insert(IntPolynomial{6});
  lat.insert(IntPolynomial{10});
  EXPECT_EQ(lat.index(), 2);
  EXPECT_EQ(lat.pivots(), (std::vector<mpz_class>{2}));
}

TEST(EchelonLattice, CanonicalForm) {
  const auto a = EchelonLattice::from_polynomials(3, {IntPolynomial{1, 1, 1}, IntPolynomial{0, 2}, IntPolynomial{4}});
  const auto b = EchelonLattice::from_polynomials(
      3, {IntPolynomial{4}, IntPolynomial{1, 3, 1}, IntPolynomial{0, 2}, IntPolynomial{5, 7, 1}});
  EXPECT_EQ(a, b);
  EXPECT_TRUE(a.contains(b));
  EXPECT_TRUE(b.contains(a));
  EXPECT_EQ(a.coordinates(a.to_vector(IntPolynomial{5, 3, 1})).has_value(), true);
  EXPECT_FALSE(a.contains(IntPolynomial{3, 5, 1}));
  EXPECT_THROW(a.to_vector(IntPolynomial::monomial(3)), std::invalid_argument);
}

TEST(Oracle, LevelOneIsEverything) {
  for (unsigned d : {5u, 7u, 8u}) {
    const OracleLattice o = brute_force_A(1, 1, d);
    EXPECT_EQ(o.descriptor.index_exponent, 0u) << d;
    EXPECT_EQ(o.members, std::uint64_t{1} << ambient_rank(d));
  }
}

TEST(Oracle, MatchesBAtSmallLevels) {
  struct Case {
    int level;
    std::uint64_t k;
    unsigned d;
  };
  for (const Case& c : {Case{3, 1, 7}, Case{4, 3, 6}, Case{2, 1, 5}, Case{3, 5, 8}}) {
    const OracleLattice o = brute_force_A(c.level, c.k, c.d);
    const LatticeDescriptor b = b_basis(c.level, c.d);
    EXPECT_EQ(o.descriptor.index_exponent, b.index_exponent) << c.level << " " << c.d;
    EXPECT_EQ(o.lattice, EchelonLattice::from_polynomials(b.ambient_rank, b.basis)) << c.level << " " << c.d;
  }
  EXPECT_EQ(b_basis(3, 7).index_exponent, 1u);
}

TEST(Oracle, Budget) {
  EXPECT_THROW(brute_force_A(5, 1, 9, 1000), BudgetExceeded);
  EXPECT_FALSE(enumeration_size(20, 4).has_value());
  try {
    check_budget(4, 4, 10);
    FAIL();
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.needed(), std::uint64_t{1} << 16);
    EXPECT_EQ(e.budget(), 10u);
  }
}

TEST(AEqualsB, SmallCases) {
  const AEqualsBReport a = verify_A_equals_B(1, 1, 7);
  EXPECT_TRUE(a.passed());
  const AEqualsBReport b = verify_A_equals_B(4, 1, 7);
  EXPECT_TRUE(b.passed());
  EXPECT_EQ(b.oracle_index_exponent, 2u);
  const AEqualsBReport c = verify_A_equals_B(4, 5, 9);
  EXPECT_TRUE(c.passed());
  EXPECT_EQ(c.oracle_index_exponent, verify_A_equals_B(4, 1, 9).oracle_index_exponent);
}

TEST(AEqualsB, HalvingWithoutOracleAtLargeLevel) {
  for (int level : {8, 10}) {
    const AEqualsBReport r = verify_A_equals_B(level, 3, 9, kDefaultBudget, false);
    EXPECT_FALSE(r.oracle_run);
    EXPECT_TRUE(r.passed()) << level;
  }
}

TEST(AEqualsB, HalvingDetectsTooSmallLattice) {
  // Doubling one basis element gives a proper sublattice of A; the halving test must see it.
  LatticeDescriptor b = b_basis(4, 7);
  b.basis[1] = mpz_class(2) * b.basis[1];
  EXPECT_EQ(halving_witnesses(b, 4, 1, 7), (std::vector<std::uint64_t>{2}));
}

TEST(Shape, SmallN) {
  for (unsigned n = 0; n <= 3; ++n)
    for (std::uint64_t k : {1, 3}) {
      const ShapeReport r = shape_check(n, k);
      EXPECT_TRUE(r.span_in_A) << n;
      EXPECT_TRUE(r.holds()) << "n=" << n << " k=" << k;
    }
}
