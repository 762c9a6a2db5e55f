#include <gtest/gtest.h>

#include <random>

#include "oracles/brute.hpp"
#include "qfhecke/heckealg.hpp"

using namespace qfhecke;

namespace {

PrimeIdeal prime_of_norm(const Field& f, std::int64_t p, std::int64_t norm) {
  for (const auto& P : factor_rational_prime(f, p).primes) {
    if (P.norm() == norm) return P;
  }
  throw std::runtime_error("no prime of that norm");
}

// Residue classes modulo an integral ideal, counted greedily from a box of
// integral elements with membership decided by the ideal.
std::int64_t count_classes(const Field& f, const FractionalIdeal& I, std::int64_t box) {
  std::vector<FieldElement> reps;
  std::int64_t vmax = f.degree() == 1 ? 1 : box;
  for (std::int64_t u = 0; u < box; ++u) {
    for (std::int64_t v = 0; v < vmax; ++v) {
      FieldElement x = f.element(Rational(u), Rational(v));
      bool fresh = true;
      for (const auto& r : reps) {
        if (I.contains(x - r)) {
          fresh = false;
          break;
        }
      }
      if (fresh) reps.push_back(x);
    }
  }
  return static_cast<std::int64_t>(reps.size());
}

}  // namespace

TEST(Power, SatisfiesHeckeRecursion) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> dist(-2, 2);
  for (int trial = 0; trial < 1000; ++trial) {
    double lam = dist(rng);
    EXPECT_DOUBLE_EQ(hecke_power_eigenvalue(lam, 0), 1);
    EXPECT_DOUBLE_EQ(hecke_power_eigenvalue(lam, 1), lam);
    for (int ell = 1; ell < 20; ++ell) {
      double next = hecke_power_eigenvalue(lam, ell + 1);
      double rec = lam * hecke_power_eigenvalue(lam, ell) - hecke_power_eigenvalue(lam, ell - 1);
      EXPECT_NEAR(next, rec, 1e-9);
    }
  }
}

TEST(Power, RejectsEigenvaluesOutsideRamanujan) {
  try {
    hecke_power_eigenvalue(2.5, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RamanujanViolation);
  }
  EXPECT_NO_THROW(hecke_power_eigenvalue(2.0 + 1e-7, 3));
  EXPECT_THROW(hecke_power_eigenvalue(1.0, -1), Error);
}

TEST(Cosets, CountsMatchClosedForm) {
  Field q = Field::rational(), f5 = Field::quadratic(5);
  std::vector<PrimeIdeal> primes{prime_of_norm(q, 2, 2), prime_of_norm(q, 3, 3), prime_of_norm(q, 5, 5),
                                 prime_of_norm(f5, 3, 9), prime_of_norm(f5, 11, 11)};
  for (const auto& P : primes) {
    std::int64_t N = static_cast<std::int64_t>(P.norm());
    for (int ell = 0; ell <= 4; ++ell) {
      auto reps = coset_reps(P, ell);
      std::int64_t expected = 0, pw = 1;
      for (int s = 0; s <= ell; ++s, pw *= N) expected += pw;
      EXPECT_EQ(static_cast<std::int64_t>(reps.size()), expected) << N << " " << ell;
      EXPECT_EQ(coset_count_closed_form(BigInt(N), ell), expected);
      EXPECT_TRUE(coset_reps_inequivalent(P, ell, reps));
      for (const auto& r : reps) {
        EXPECT_EQ(r.top_valuation + r.bottom_valuation, ell);
        EXPECT_TRUE(r.beta.is_integral());
      }
    }
  }
}

TEST(Cosets, PerLevelCountsAgreeWithResidueEnumeration) {
  Field q = Field::rational(), f5 = Field::quadratic(5), f2 = Field::quadratic(2);
  std::vector<PrimeIdeal> primes{prime_of_norm(q, 3, 3), prime_of_norm(f5, 3, 9), prime_of_norm(f2, 7, 7),
                                 prime_of_norm(f2, 2, 2)};
  for (const auto& P : primes) {
    for (int ell = 0; ell <= 2; ++ell) {
      auto reps = coset_reps(P, ell);
      for (int s = 0; s <= ell; ++s) {
        std::int64_t have = std::count_if(reps.begin(), reps.end(), [&](const CosetRep& r) { return r.s == s; });
        std::int64_t box = static_cast<std::int64_t>(boost::multiprecision::pow(P.norm(), static_cast<unsigned>(ell - s)));
        EXPECT_EQ(have, count_classes(P.ideal.field(), P.ideal.pow(ell - s), box)) << P.ideal.to_string() << " " << s;
      }
    }
  }
}

TEST(Cosets, EnumerationCap) {
  CosetOptions opt;
  opt.max_reps = 100;
  try {
    coset_reps(prime_of_norm(Field::rational(), 5, 5), 4, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EnumerationTooLarge);
  }
}

TEST(Descent, RationalPrimes) {
  Field q = Field::rational();
  for (std::int64_t p : primes_up_to(30)) {
    auto P = factor_rational_prime(q, p).primes[0];
    for (int ell = 0; ell <= 4; ++ell) {
      auto D = descent_data(P, ell);
      auto chk = verify_descent(D);
      EXPECT_TRUE(chk.ok) << p << " " << ell << " " << (chk.failures.empty() ? "" : chk.failures[0]);
      EXPECT_EQ(D.a.size(), static_cast<std::size_t>(ell + 1));
      EXPECT_EQ(D.eta, q.from_integer(p));
    }
  }
}

TEST(Descent, SqrtFiveAllPrimesUpTo30) {
  Field f = Field::quadratic(5);
  for (std::int64_t p : primes_up_to(30)) {
    for (const auto& P : factor_rational_prime(f, p).primes) {
      for (int ell = 0; ell <= 4; ++ell) {
        auto D = descent_data(P, ell);
        auto chk = verify_descent(D);
        EXPECT_TRUE(chk.ok) << P.ideal.to_string() << " " << ell << " " << (chk.failures.empty() ? "" : chk.failures[0]);
        for (bool g : D.a_is_generator) EXPECT_TRUE(g);
        if (ell % 2 == 0) EXPECT_TRUE((D.a[ell / 2] * D.a[ell / 2] / D.eta.pow(ell)).is_totally_positive());
      }
    }
  }
}

TEST(Descent, SqrtThreeSquaresAndNonSquares) {
  Field f = Field::quadratic(3);
  int squares = 0, non_squares = 0;
  for (std::int64_t p : primes_up_to(40)) {
    for (const auto& P : factor_rational_prime(f, p).primes) {
      if (narrow_square_witness(P)) {
        ++squares;
        for (int ell = 0; ell <= 3; ++ell) EXPECT_TRUE(verify_descent(descent_data(P, ell)).ok) << P.ideal.to_string();
      } else {
        ++non_squares;
        try {
          descent_data(P, 2);
          FAIL();
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::NotNarrowSquare);
        }
      }
    }
  }
  // C+ has order 2 and the split primes are equidistributed in it
  EXPECT_GT(squares, 0);
  EXPECT_GT(non_squares, 0);
}

TEST(Descent, SqrtTenPrimeAboveThreeIsNotANarrowSquare) {
  Field f = Field::quadratic(10);
  for (const auto& P : factor_rational_prime(f, 3).primes) {
    try {
      descent_data(P, 2);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NotNarrowSquare);
    }
  }
}

TEST(Descent, VerifierCatchesBrokenPackages) {
  Field f = Field::quadratic(5);
  auto P = factor_rational_prime(f, 11).primes[0];
  auto D = descent_data(P, 2);
  auto bad = D;
  bad.a[1] = bad.a[1] * f.from_integer(11);
  EXPECT_FALSE(verify_descent(bad).ok);
  bad = D;
  bad.eta = -bad.eta;
  EXPECT_FALSE(verify_descent(bad).ok);
}

TEST(DeltaTilde, TotallyPositiveUnitRatio) {
  Field f = Field::quadratic(5);
  FieldElement u = f.fundamental_unit();
  FieldElement x = f.element(Rational(3), Rational(1));
  EXPECT_EQ(delta_tilde(x * u * u, x), 1);
  EXPECT_EQ(delta_tilde(x * u, x), (u.is_totally_positive() ? 1 : 0));
  EXPECT_EQ(delta_tilde(x * f.from_integer(2), x), 0);
  EXPECT_EQ(delta_tilde(-x, x), 0);
  EXPECT_THROW(delta_tilde(f.zero(), x), Error);
}

TEST(CoefficientRelation, HoldsExactlyOnTheGrid) {
  std::vector<Rational> lambdas{Rational(0), Rational(1), Rational(-1), Rational(2), Rational(-2), Rational(3, 2)};
  for (const auto& lam : lambdas) {
    for (std::int64_t p : primes_up_to(13)) {
      for (int ell = 0; ell <= 4; ++ell) {
        std::int64_t pl = 1;
        for (int i = 0; i < ell; ++i) pl *= p;
        for (std::int64_t m = 1; m <= 20; ++m) EXPECT_TRUE(verify_coefficient_relation(lam, p, ell, m * pl));
      }
    }
  }
}

TEST(CoefficientRelation, Errors) {
  try {
    verify_coefficient_relation(Rational(1), 3, 2, 6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DivisibilityViolation);
  }
  EXPECT_THROW(verify_coefficient_relation(Rational(1), 4, 1, 4), Error);
  EXPECT_THROW(verify_coefficient_relation(Rational(1), 3, 1, 0), Error);
}
