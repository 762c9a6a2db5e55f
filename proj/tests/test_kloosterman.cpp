#include <gtest/gtest.h>

#include <set>

#include "oracles/brute.hpp"
#include "qfhecke/kloosterman.hpp"

using namespace qfhecke;

namespace {

KloostermanInput over_q(std::int64_t r, std::int64_t rp, std::int64_t c) {
  Field q = Field::rational();
  return {q.from_integer(r), q.from_integer(rp), FractionalIdeal::unit(q), q.from_integer(c), FractionalIdeal::unit(q)};
}

KloostermanInput over(const Field& f, const FieldElement& r, const FieldElement& rp, const FieldElement& c) {
  return {r, rp, FractionalIdeal::unit(f), c, FractionalIdeal::unit(f)};
}

}  // namespace

TEST(ResidueUnits, ModFive) {
  Field q = Field::rational();
  ResidueUnitGroup G(FractionalIdeal::unit(q), q.from_integer(5), FractionalIdeal::unit(q));
  ASSERT_EQ(G.size(), 4u);
  std::map<std::int64_t, std::int64_t> inv;
  for (const auto& u : G.units()) {
    FieldElement x = G.element(u), y = G.inverse(u);
    inv[numerator(x.x()).convert_to<std::int64_t>()] = mod_floor(numerator(y.x()), 5).convert_to<std::int64_t>();
  }
  EXPECT_EQ(inv, (std::map<std::int64_t, std::int64_t>{{1, 1}, {2, 3}, {3, 2}, {4, 4}}));
}

TEST(ResidueUnits, InertTwoInSqrt5) {
  Field f = Field::quadratic(5);
  ResidueUnitGroup G(FractionalIdeal::unit(f), f.from_integer(2), FractionalIdeal::unit(f));
  EXPECT_EQ(G.residue_count(), 4);
  EXPECT_EQ(G.size(), 3u);
}

TEST(ResidueUnits, CountsMatchEulerPhi) {
  Field q = Field::rational();
  for (std::int64_t c = 1; c <= 60; ++c) {
    ResidueUnitGroup G(FractionalIdeal::unit(q), q.from_integer(c), FractionalIdeal::unit(q));
    EXPECT_EQ(static_cast<std::int64_t>(G.size()), euler_phi(c));
  }
  Field f = Field::quadratic(10);
  // |(O/cO)^*| = N(c) prod_{P | c} (1 - 1/N(P))
  for (std::int64_t n : {2, 3, 5, 6, 7, 9, 12}) {
    ResidueUnitGroup G(FractionalIdeal::unit(f), f.from_integer(n), FractionalIdeal::unit(f));
    Rational expected = Rational(n * n);
    for (auto [p, e] : factorize(n)) {
      for (const auto& P : factor_rational_prime(f, p).primes) expected *= 1 - Rational(1) / Rational(P.norm());
    }
    EXPECT_EQ(Rational(static_cast<std::int64_t>(G.size())), expected) << n;
  }
}

TEST(ResidueUnits, RejectsBadModuli) {
  Field q = Field::rational();
  try {
    ResidueUnitGroup G(FractionalIdeal::unit(q), q.zero(), FractionalIdeal::unit(q));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ModulusZero);
  }
  KloostermanOptions opt;
  opt.max_residues = 100;
  try {
    ResidueUnitGroup G(FractionalIdeal::unit(q), q.from_integer(1000), FractionalIdeal::unit(q), opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EnumerationTooLarge);
  }
}

TEST(Twisted, SmallClassicalValues) {
  EXPECT_NEAR(static_cast<double>(ks_twisted(over_q(1, 1, 3)).real()), -1, 1e-12);
  EXPECT_NEAR(static_cast<double>(ks_twisted(over_q(1, 1, 2)).real()), 1, 1e-12);
  EXPECT_NEAR(static_cast<double>(ks_twisted(over_q(0, 0, 6)).real()), 2, 1e-12);
  EXPECT_NEAR(static_cast<double>(kloosterman_classical(1, 1, 3).real()), -1, 1e-12);
}

TEST(Twisted, ReproducesClassicalSumsOverQ) {
  for (std::int64_t m = 1; m <= 5; ++m) {
    for (std::int64_t n = 1; n <= 5; ++n) {
      for (std::int64_t c = 1; c <= 300; ++c) {
        auto brute = oracle::kloosterman_naive(m, n, c);
        Complex tw = ks_twisted(over_q(m, n, c));
        EXPECT_NEAR(static_cast<double>(tw.real()), brute.real(), 1e-9) << m << " " << n << " " << c;
        EXPECT_NEAR(static_cast<double>(tw.imag()), brute.imag(), 1e-9);
      }
    }
  }
}

TEST(Twisted, MatchesBruteForceOverQuadraticFields) {
  for (std::int64_t D : {5, 2, 3, 10}) {
    Field f = Field::quadratic(D);
    std::vector<FieldElement> cs{f.from_integer(2), f.from_integer(3), f.element(1, 1), f.element(3, 1), f.from_integer(5),
                                 f.element(2, 3)};
    std::vector<std::pair<FieldElement, FieldElement>> rs{
        {f.one(), f.one()}, {f.one(), f.zero()}, {f.element(2, 1), f.element(-1, 3)}, {f.omega(), f.from_integer(4)}};
    for (const auto& c : cs) {
      for (const auto& [r, rp] : rs) {
        auto brute = oracle::twisted_naive(f, r, rp, c);
        Complex tw = ks_twisted(over(f, r, rp, c));
        EXPECT_NEAR(static_cast<double>(tw.real()), brute.real(), 1e-9) << "D=" << D << " c=" << c.to_string();
        EXPECT_NEAR(static_cast<double>(tw.imag()), brute.imag(), 1e-9);
      }
    }
  }
}

TEST(Twisted, InverseDifferentNumerators) {
  // r in d^{-1} but not in O
  Field f = Field::quadratic(5);
  FieldElement r = f.sqrt_radicand().inverse();
  ASSERT_TRUE(inverse_different(f).contains(r));
  ASSERT_FALSE(r.is_integral());
  for (const auto& c : {f.from_integer(3), f.element(3, 1), f.from_integer(4)}) {
    auto brute = oracle::twisted_naive(f, r, r, c);
    Complex tw = ks_twisted(over(f, r, r, c));
    EXPECT_NEAR(static_cast<double>(tw.real()), brute.real(), 1e-9);
    EXPECT_NEAR(static_cast<double>(tw.imag()), brute.imag(), 1e-9);
  }
}

TEST(Twisted, RealWithTrivialCharacter) {
  Field f = Field::quadratic(5);
  for (const auto& I : ideals_of_norm_up_to(f, 200)) {
    auto g = find_generator(I);
    if (!g) continue;
    Complex v = ks_twisted(over(f, f.one(), f.one(), *g));
    EXPECT_LT(std::abs(static_cast<double>(v.imag())), 1e-9);
  }
}

TEST(Twisted, IndependentOfRepresentatives) {
  Field f = Field::quadratic(5);
  for (const auto& c : {f.from_integer(7), f.element(4, 1), f.from_integer(6)}) {
    auto in = over(f, f.element(1, 2), f.element(3, -1), c);
    Complex base = ks_twisted(in);
    for (auto [su, sv] : std::vector<std::pair<int, int>>{{1, 0}, {0, 1}, {-3, 5}, {7, 7}}) {
      KloostermanOptions opt;
      opt.shift_u = su;
      opt.shift_v = sv;
      EXPECT_LT(std::abs(ks_twisted(in, TwistCharacter::trivial(), opt) - base), 1e-9L);
    }
  }
}

TEST(Twisted, PreconditionsAreChecked) {
  Field f = Field::quadratic(5);
  // r not in a^{-1} d^{-1}
  auto in = over(f, f.from_rational(Rational(1, 3)), f.one(), f.from_integer(3));
  try {
    ks_twisted(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PreconditionViolation);
  }
  // c not integral with C = O and J = O
  auto in2 = over(f, f.one(), f.one(), f.from_rational(Rational(1, 2)));
  EXPECT_THROW(ks_twisted(in2), Error);
}

TEST(Twisted, NonTrivialIdealsAAndC) {
  // a = (2, w) type ideals in Q(sqrt 10); value is real and the group has the right size
  Field f = Field::quadratic(10);
  auto a = FractionalIdeal::generated_by(f, std::vector<FieldElement>{f.from_integer(2), f.omega()});
  auto C = FractionalIdeal::generated_by(f, std::vector<FieldElement>{f.from_integer(3), f.element(1, 1)});
  // r in a^{-1} d^{-1}, r' in a d^{-1} C^{-2}, c in C^{-1}
  FieldElement r = f.one(), rp = f.from_integer(18), c = f.from_integer(3);
  KloostermanInput in{r, rp, a, c, C};
  check_kloosterman_preconditions(in);
  Complex v = ks_twisted(in);
  EXPECT_LT(std::abs(static_cast<double>(v.imag())), 1e-9);
  ResidueUnitGroup G(a, c, C);
  for (const auto& u : G.units()) G.verify(u);
  EXPECT_EQ(G.residue_count(), detail::to_i64(numerator((C * c).norm()), "norm"));
}

TEST(Twisted, LegendreCharacterOverQ) {
  // sum_x (x/p) e((x + xbar)/p) is a Salie-type sum of absolute value <= 2 sqrt p
  for (std::int64_t p : {3, 5, 7, 11, 13}) {
    auto chi = TwistCharacter::legendre(p, p);
    Complex v = ks_twisted(over_q(1, 1, p), chi);
    std::complex<double> brute = 0;
    for (std::int64_t x = 1; x < p; ++x)
      brute += static_cast<double>(kronecker(x, p)) * oracle::e(static_cast<double>((x + invmod(x, p)) % p) / p);
    EXPECT_NEAR(static_cast<double>(v.real()), brute.real(), 1e-9);
    EXPECT_NEAR(static_cast<double>(v.imag()), brute.imag(), 1e-9);
  }
  EXPECT_THROW(TwistCharacter::from_table({{{1, 0}, Complex(2, 0)}}), Error);
}

TEST(Weil, Examples) {
  auto w = weil_check(over_q(1, 1, 3), TwistCharacter::trivial(), 0);
  EXPECT_NEAR(static_cast<double>(w.abs_ks), 1, 1e-12);
  EXPECT_NEAR(static_cast<double>(w.rhs), std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(static_cast<double>(w.ratio), 1 / std::sqrt(3.0), 1e-12);
  // r = r' = 0, c = 6: |KS| = phi(6) = 2 and the gcd factor is N(6) = 6
  auto w0 = weil_check(over_q(0, 0, 6), TwistCharacter::trivial(), 0.01L);
  EXPECT_NEAR(static_cast<double>(w0.abs_ks), 2, 1e-12);
  EXPECT_NEAR(static_cast<double>(w0.gcd_norm), 6, 1e-12);
  EXPECT_LE(w0.ratio, std::pow(6.0L, 0.01L));
  EXPECT_GT(2 / std::sqrt(6.0), 0.8);
}

TEST(Weil, RatioNonIncreasingInEpsilon) {
  Field f = Field::quadratic(5);
  auto in = over(f, f.one(), f.one(), f.element(5, 2));
  double last = 1e300;
  for (long double e : {0.0L, 0.01L, 0.1L, 0.5L}) {
    double r = static_cast<double>(weil_check(in, TwistCharacter::trivial(), e).ratio);
    EXPECT_LE(r, last + 1e-15);
    last = r;
  }
}

TEST(Weil, ClassicalBoundForSmallModuli) {
  for (std::int64_t m = 1; m <= 5; ++m) {
    for (std::int64_t n = 1; n <= 5; ++n) {
      auto row = kloosterman_classical_row(m, n, 500);
      for (std::int64_t c = 1; c <= 500; ++c)
        EXPECT_LE(std::abs(row[static_cast<std::size_t>(c)]), classical_weil_rhs(m, n, c) + 1e-6L) << m << n << c;
    }
  }
}

TEST(Accumulator, CompensatedSumIsAccurate) {
  ComplexAccumulator acc;
  for (int i = 0; i < 1'000'000; ++i) acc.add(Complex(0.1L, -0.1L));
  EXPECT_NEAR(static_cast<double>(acc.value().real()), 100000.0, 1e-9);
  EXPECT_NEAR(static_cast<double>(acc.value().imag()), -100000.0, 1e-9);
}
