#include <gtest/gtest.h>

#include <random>

#include "fakelens/best_polynomials.hpp"
#include "fakelens/valuation.hpp"
#include "test_support.hpp"

using namespace fakelens;
using fakelens::testing::kSeed;
using fakelens::testing::random_element;
using fakelens::testing::random_integral;

namespace {

mpq_class dyadic(long num, int exp) {
  mpq_class q(num, mpz_class(1) << exp);
  q.canonicalize();
  return q;
}

bool has_value(const Valuation& v, const mpq_class& q) { return !v.is_infinite() && v.value() == q; }

RingElement scalar(int level, const mpq_class& q) { return RingElement::one(level) * q; }

}  // namespace

TEST(ValuationType, OrderingAndEquality) {
  EXPECT_EQ(Valuation::finite(1, 0, 1), Valuation::finite(1, 0, 3));
  EXPECT_EQ(Valuation::finite(0, 2, 2), Valuation::finite(0, 1, 1));
  EXPECT_LT(Valuation::finite(0, 3, 2), Valuation::finite(1, 0, 2));
  EXPECT_LT(Valuation::finite(100, 0, 0), Valuation::infinity());
  EXPECT_EQ(Valuation::infinity(), Valuation::infinity());
  EXPECT_THROW(Valuation::finite(0, 4, 2), std::invalid_argument);
}

TEST(ValuationType, AdditionCarriesAndAbsorbs) {
  EXPECT_EQ(Valuation::finite(1, 3, 2) + Valuation::finite(0, 2, 2), Valuation::finite(2, 1, 2));
  EXPECT_TRUE((Valuation::finite(1, 3, 2) + Valuation::infinity()).is_infinite());
  EXPECT_THROW(Valuation::finite(0, 0, 1) + Valuation::finite(0, 0, 2), LevelMismatch);
  EXPECT_EQ(Valuation::finite(0, 1, 3).times(19), Valuation::finite(2, 3, 3));
}

TEST(ValuationType, TextFormat) {
  EXPECT_EQ(Valuation::finite(-1, 3, 2).to_string(), "-1+3/2^2");
  EXPECT_EQ(Valuation::infinity().to_string(), "inf");
  for (const char* s : {"inf", "0+0/2^0", "-3+5/2^3", "7+1/2^1"}) EXPECT_EQ(Valuation::parse(s).to_string(), s);
  EXPECT_THROW(Valuation::parse("1/2"), ParseError);
  EXPECT_THROW(Valuation::parse("1+4/2^2"), std::invalid_argument);
}

TEST(NormalForm, PowersOfTwo) {
  for (int l = 0; l <= 4; ++l) {
    for (int a = -3; a <= 5; ++a) {
      const mpq_class two_a = a >= 0 ? mpq_class(mpz_class(1) << a) : dyadic(1, -a);
      const NormalForm nf = normal_form(project(scalar(6, two_a), l));
      EXPECT_EQ(nf.a, a);
      EXPECT_EQ(nf.b, 0u);
    }
  }
}

TEST(NormalForm, FMinusOneAndF) {
  for (int level = 2; level <= 6; ++level) {
    const RingElement f = element_f(level);
    for (int l = 1; l < level; ++l) {
      const NormalForm nf = normal_form(project(f - RingElement::one(level), l));
      EXPECT_EQ(nf.a, 0);
      EXPECT_EQ(nf.b, (1u << l) - 1);
      const NormalForm nf_f = normal_form(project(f, l));
      EXPECT_EQ(nf_f.a, 0);
      EXPECT_EQ(nf_f.b, 0u);
    }
  }
}

TEST(NormalForm, WitnessReassemblesProjection) {
  std::mt19937_64 rng(kSeed + 20);
  for (int level = 1; level <= 5; ++level) {
    for (int i = 0; i < 30; ++i) {
      const RingElement g = random_element(level, rng);
      for (int l = 0; l < level; ++l) {
        const LevelProjection p = project(g, l);
        if (p.is_zero()) continue;
        for (auto strategy : {ClearingStrategy::kLcm, ClearingStrategy::kProduct}) {
          const NormalForm nf = normal_form(p, strategy);
          EXPECT_TRUE(mpz_odd_p(nf.u.get_mpz_t()));
          EXPECT_TRUE(mpz_odd_p(nf.v1.evaluate(1).get_mpz_t()));
          const IntPolynomial body =
              IntPolynomial::binomial_power(1, -1, static_cast<unsigned>(nf.b)) * nf.v1 + mpz_class(2) * nf.v2;
          mpq_class scale = nf.a >= 0 ? mpq_class(mpz_class(1) << nf.a) : dyadic(1, static_cast<int>(-nf.a));
          scale /= nf.u;
          std::vector<mpq_class> coeffs;
          for (const auto& c : body.coefficients()) coeffs.push_back(scale * c);
          EXPECT_EQ(LevelProjection::from_rationals(l, coeffs), p);
        }
      }
    }
  }
}

TEST(NormalForm, ExponentsIndependentOfClearing) {
  std::mt19937_64 rng(kSeed + 21);
  for (int level = 1; level <= 5; ++level) {
    for (int i = 0; i < 100; ++i) {
      const RingElement g = random_element(level, rng) * random_element(level, rng);
      for (int l = 0; l < level; ++l) {
        const LevelProjection p = project(g, l);
        if (p.is_zero()) continue;
        EXPECT_EQ(normal_form_exponents(p, ClearingStrategy::kLcm), normal_form_exponents(p, ClearingStrategy::kProduct));
      }
    }
  }
}

TEST(NormalForm, ZeroInputThrows) {
  EXPECT_THROW(normal_form(LevelProjection::zero(2)), std::domain_error);
}

TEST(WorkedExamples, AllLevelsAndK) {
  for (int level = 1; level <= 6; ++level) {
    const RingElement one = RingElement::one(level);
    const RingElement f = element_f(level);
    const RingElement f2 = f * f;
    for (int l = 0; l < level; ++l) {
      for (int a = 0; a <= 4; ++a) EXPECT_TRUE(has_value(w_l(scalar(level, mpz_class(1) << a), l), a));
      if (l == 0)
        EXPECT_TRUE(w_l(f, l).is_infinite());
      else
        EXPECT_TRUE(has_value(w_l(f, l), 0));
      EXPECT_TRUE(has_value(w_l(f + one, l), 1 - dyadic(1, l)));
      EXPECT_TRUE(has_value(w_l(f - one, l), 1 - dyadic(1, l)));
      EXPECT_TRUE(has_value(w_l(f2 - one, l), 2 - dyadic(2, l)));
      if (l == 1)
        EXPECT_TRUE(w_l(f2 + one, l).is_infinite());
      else
        EXPECT_TRUE(has_value(w_l(f2 + one, l), l == 0 ? 0 : 1));
      for (std::uint64_t k : {1, 3, 5, 7}) EXPECT_TRUE(has_value(w_l(element_f_prime(level, k), l), 0));
    }
  }
}

TEST(Rules, ProductMinimumAndStrictIncrease) {
  std::mt19937_64 rng(kSeed + 22);
  std::uniform_int_distribution<int> pick(0, 31);
  for (int level = 1; level <= 5; ++level) {
    for (int i = 0; i < 500; ++i) {
      const RingElement g1 = random_element(level, rng);
      const RingElement g2 = (i % 4 == 0) ? g1.times_chi_power(pick(rng)) * mpq_class(2 * pick(rng) + 1)
                                          : random_element(level, rng);
      for (int l = 0; l < level; ++l) {
        const Valuation w1 = w_l(g1, l), w2 = w_l(g2, l);
        EXPECT_EQ(w_l(g1 * g2, l), w1 + w2);
        const Valuation ws = w_l(g1 + g2, l);
        if (w1 != w2) {
          EXPECT_EQ(ws, std::min(w1, w2));
        } else if (!w1.is_infinite()) {
          EXPECT_GT(ws, w1);
        }
      }
    }
  }
}

TEST(Rules, OneMinusChiPowerShortcut) {
  for (int level = 1; level <= 5; ++level)
    for (std::uint64_t j = 0; j <= (1u << level); ++j)
      for (int l = 0; l < level; ++l)
        EXPECT_EQ(w_l(RingElement::one(level).times_one_minus_chi_power(static_cast<unsigned>(j)), l),
                  w_l_of_one_minus_chi_power(j, l));
}

TEST(AuxiliaryPolynomials, IdentityUpToFive) {
  for (unsigned k = 0; k <= 5; ++k) {
    const IntPolynomial lhs = IntPolynomial::binomial_power(1, -1, 1u << k);
    const IntPolynomial rhs = mpz_class(2) * auxiliary_x(k) + IntPolynomial{1} + IntPolynomial::monomial(std::size_t{1} << k);
    EXPECT_EQ(lhs, rhs) << "k=" << k;
  }
}

TEST(Criteria, BoundValue) {
  EXPECT_EQ(membership_bound(1, 0), 2);
  EXPECT_EQ(membership_bound(5, 2), mpq_class(19, 4));
}

TEST(Criteria, FourAtLevelOne) {
  EXPECT_EQ(criterion_sufficient(scalar(1, 4)), Verdict::kProvesMembership);
  // 2 + K - l - 2^-l exceeds 2 at K = 3, l = 0.
  EXPECT_EQ(criterion_sufficient(scalar(3, 4)), Verdict::kInconclusive);
  EXPECT_TRUE(is_in_4Z(scalar(3, 4)));
}

TEST(Criteria, SufficientOnShiftedQn) {
  for (unsigned n : {2u, 4u, 5u}) {
    const Split s = split_n(n);
    ASSERT_GT(s.b, 0u);
    const int level = static_cast<int>(2 * n + 2);
    for (std::uint64_t k : {1, 3}) {
      const RingElement g = evaluate_at_f_squared(q_n(n), level, k, Prefactor::f_power(1))
                                .times_one_minus_chi_power(static_cast<unsigned>(2 * s.b - 1));
      EXPECT_EQ(criterion_sufficient(g), Verdict::kProvesMembership) << "n=" << n << " k=" << k;
      EXPECT_TRUE(is_in_4Z(g));
    }
  }
}

TEST(Criteria, NecessaryOnQnAndRn) {
  for (unsigned n = 0; n <= 4; ++n) {
    const Split s = split_n(n);
    const int level = static_cast<int>(2 * n + 3);
    const RingElement h = RingElement::one(level).times_one_minus_chi_power(2 * n);
    for (std::uint64_t k : {1, 3}) {
      for (const IntPolynomial& q : {q_n(n), r_minus(n).polynomial}) {
        const RingElement g = evaluate_at_f_squared(q, level, k, Prefactor::f_power(1));
        const auto verdict = criterion_necessary(g, h, static_cast<int>(s.a + 1));
        EXPECT_EQ(verdict, Verdict::kProvesNonMembership) << "n=" << n << " k=" << k << " q=" << q.to_string();
        EXPECT_FALSE(is_in_4Z(g));
      }
    }
  }
}

TEST(Criteria, NecessaryRejectsNonIntegralWitness) {
  EXPECT_THROW(criterion_necessary(scalar(3, 4), element_f(3), 0), std::invalid_argument);
}

TEST(Criteria, NeverContradictsExactTest) {
  std::mt19937_64 rng(kSeed + 23);
  std::uniform_int_distribution<int> shape(0, 3);
  std::uniform_int_distribution<int> power(0, 12);
  for (int level = 1; level <= 5; ++level) {
    int decided = 0;
    for (int i = 0; i < 500; ++i) {
      RingElement g = random_integral(level, rng, 3);
      switch (shape(rng)) {
        case 0:
          g = g * mpq_class(4);
          break;
        case 1:
          g = (g * mpq_class(mpz_class(1) << power(rng))).divided_by_one_minus_chi_power_of(power(rng) % 5);
          break;
        case 2:
          g = (g * element_f(level) * mpq_class(8)).times_one_minus_chi_power(power(rng));
          break;
        default:
          g = g * mpq_class(mpz_class(1) << power(rng));
          break;
      }
      const bool exact = is_in_4Z(g);
      if (criterion_sufficient(g) == Verdict::kProvesMembership) {
        EXPECT_TRUE(exact) << g.to_string();
        ++decided;
      }
      if (auto w = search_necessary_witness(g)) {
        EXPECT_FALSE(exact) << g.to_string();
        ++decided;
      }
      const RingElement h = RingElement::one(level).times_one_minus_chi_power(power(rng));
      for (int l = 0; l < level; ++l) {
        if (criterion_necessary(g, h, l) == Verdict::kProvesNonMembership) {
          EXPECT_FALSE(exact);
        }
      }
    }
    EXPECT_GT(decided, 0) << "K=" << level;
  }
}
