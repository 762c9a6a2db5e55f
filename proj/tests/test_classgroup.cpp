#include <gtest/gtest.h>

#include "oracles/brute.hpp"
#include "qfhecke/classgroup.hpp"

using namespace qfhecke;

TEST(ClassGroup, SpotValues) {
  Field f5 = Field::quadratic(5), f3 = Field::quadratic(3), f10 = Field::quadratic(10);
  EXPECT_EQ(class_group(f5, false).order, 1);
  EXPECT_EQ(class_group(f5, true).order, 1);
  EXPECT_EQ(class_group(f3, false).order, 1);
  EXPECT_EQ(class_group(f3, true).order, 2);
  EXPECT_EQ(class_group(f10, false).order, 2);
  EXPECT_EQ(class_group(f10, true).order, 2);
  EXPECT_EQ(class_group(Field::rational(), true).order, 1);
}

TEST(ClassGroup, NonCyclicNarrowGroup) {
  // Q(sqrt 15): h = 2, h+ = 4 with C+ = Z/2 x Z/2
  auto g = class_group(Field::quadratic(15), true);
  EXPECT_EQ(g.order, 4);
  EXPECT_EQ(g.cyclic_factors, (std::vector<std::int64_t>{2, 2}));
}

TEST(ClassGroup, AgreesWithFormCensusUpTo100) {
  for (std::int64_t D = 2; D <= 100; ++D) {
    if (!is_squarefree(D)) continue;
    Field f = Field::quadratic(D);
    auto wide = class_group(f, false), narrow = class_group(f, true);
    auto census = reduced_form_census(f.discriminant());
    EXPECT_EQ(wide.order, census.h) << D;
    EXPECT_EQ(narrow.order, census.h_plus) << D;
    EXPECT_TRUE(narrow.order == wide.order || narrow.order == 2 * wide.order);
    EXPECT_EQ(narrow.order == wide.order, f.fundamental_unit_norm() == -1) << D;
    std::int64_t prod = 1;
    for (auto c : narrow.cyclic_factors) prod *= c;
    EXPECT_EQ(prod, narrow.order);
    EXPECT_EQ(static_cast<std::int64_t>(narrow.representatives.size()), narrow.order);
  }
}

TEST(ClassGroup, RepresentativesArePairwiseInequivalent) {
  for (std::int64_t D : {10, 15, 79, 82}) {
    Field f = Field::quadratic(D);
    for (bool narrow : {false, true}) {
      auto g = class_group(f, narrow);
      for (std::size_t i = 0; i < g.representatives.size(); ++i) {
        for (std::size_t j = i + 1; j < g.representatives.size(); ++j) {
          auto q = g.representatives[i] * g.representatives[j].inverse();
          EXPECT_FALSE(narrow ? is_narrowly_principal(q) : is_principal(q)) << D;
        }
      }
    }
  }
}

TEST(Principal, AgreesWithBoxSearch) {
  for (std::int64_t D : {2, 3, 5, 6, 7, 10, 15, 19}) {
    Field f = Field::quadratic(D);
    auto principal = oracle::principal_ideals_in_box(f, 60, 40);
    for (const auto& I : ideals_of_norm_up_to(f, 40)) {
      bool expected = principal.count({I.a(), I.b(), I.c()}) == 1;
      auto g = find_generator(I);
      EXPECT_EQ(g.has_value(), expected) << "D=" << D << " " << I.to_string();
      if (g) {
        EXPECT_EQ(FractionalIdeal::principal(*g), I);
      }
    }
  }
}

TEST(Principal, IdealsOfNormCountMatchesDedekindZeta) {
  // number of ideals of norm n is sum_{d | n} chi_D(d)
  for (std::int64_t D : {5, 10, 13}) {
    Field f = Field::quadratic(D);
    for (std::int64_t n = 1; n <= 60; ++n) {
      std::int64_t expected = 0;
      for (std::int64_t d = 1; d <= n; ++d) {
        if (n % d == 0) expected += kronecker(f.discriminant(), d);
      }
      EXPECT_EQ(static_cast<std::int64_t>(ideals_of_norm(f, n).size()), expected) << "D=" << D << " n=" << n;
    }
  }
}

TEST(TotallyPositive, Examples) {
  Field q = Field::rational();
  auto g = principal_totally_positive_generator(FractionalIdeal::from_integer(q, 3));
  ASSERT_TRUE(g);
  EXPECT_EQ(*g, q.from_integer(3));
  Field f5 = Field::quadratic(5);
  auto g2 = principal_totally_positive_generator(FractionalIdeal::from_integer(f5, 2));
  ASSERT_TRUE(g2);
  EXPECT_TRUE(g2->is_totally_positive());
  EXPECT_EQ(FractionalIdeal::principal(*g2), FractionalIdeal::from_integer(f5, 2));
  Field f10 = Field::quadratic(10);
  auto P = FractionalIdeal::generated_by(f10, std::vector<FieldElement>{f10.from_integer(3), f10.element(1, 1)});
  EXPECT_FALSE(principal_totally_positive_generator(P));
}

TEST(TotallyPositive, NormEquationOracleForSqrt10) {
  // x^2 - 10 y^2 = +-3 has no solution
  for (std::int64_t x = -300; x <= 300; ++x) {
    for (std::int64_t y = -100; y <= 100; ++y) {
      std::int64_t n = x * x - 10 * y * y;
      EXPECT_NE(std::llabs(n), 3);
    }
  }
}

TEST(TotallyPositive, SqrtThreeUnitsAreNotEnough) {
  // In Q(sqrt 3) every unit has norm +1, so (sqrt 3) has no totally positive generator.
  Field f = Field::quadratic(3);
  auto I = FractionalIdeal::principal(f.sqrt_radicand());
  EXPECT_TRUE(is_principal(I));
  EXPECT_FALSE(is_narrowly_principal(I));
}

TEST(NarrowSquare, Witnesses) {
  Field q = Field::rational();
  auto w = narrow_square_witness(factor_rational_prime(q, 3).primes[0]);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->b, FractionalIdeal::unit(q));
  EXPECT_EQ(w->eta, q.from_integer(3));

  Field f5 = Field::quadratic(5);
  auto w2 = narrow_square_witness(factor_rational_prime(f5, 2).primes[0]);
  ASSERT_TRUE(w2);
  EXPECT_EQ(w2->b, FractionalIdeal::unit(f5));
  EXPECT_EQ(w2->eta, f5.from_integer(2));

  Field f10 = Field::quadratic(10);
  EXPECT_FALSE(narrow_square_witness(factor_rational_prime(f10, 3).primes[0]));
}

TEST(NarrowSquare, WitnessPropertyOverManyPrimes) {
  for (std::int64_t D : {3, 5, 6, 10, 15, 79}) {
    Field f = Field::quadratic(D);
    auto narrow = class_group(f, true);
    for (std::int64_t p : primes_up_to(60)) {
      for (const auto& P : factor_rational_prime(f, p).primes) {
        auto w = narrow_square_witness(P);
        if (!w) continue;
        EXPECT_TRUE(w->b.is_integral());
        EXPECT_TRUE(w->eta.is_totally_positive());
        EXPECT_EQ(P.ideal * w->b * w->b, FractionalIdeal::principal(w->eta));
      }
      // for a cyclic narrow group of odd order every class is a square
      if (narrow.order % 2 == 1) {
        for (const auto& P : factor_rational_prime(f, p).primes) EXPECT_TRUE(narrow_square_witness(P)) << D << " " << p;
      }
    }
  }
}

TEST(Smith, DiagonalOfKnownMatrix) {
  std::vector<std::vector<BigInt>> m{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}};
  EXPECT_EQ(smith_diagonal(m), (std::vector<BigInt>{2, 6, 12}));
}
