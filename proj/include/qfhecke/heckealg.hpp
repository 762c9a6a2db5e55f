#pragma once

// Hecke combinatorics at a prime P: normalized eigenvalues of P^ell through
// Chebyshev polynomials, coset representatives of the double coset of
// determinant P^ell, the descent package (b, eta, a_s, b~_s) for primes that
// are squares in the narrow class group, and the coefficient relation over Q.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qfhecke/classgroup.hpp"
#include "qfhecke/measures.hpp"
#include "qfhecke/numberfield.hpp"

namespace qfhecke {

inline constexpr double kRamanujanTolerance = 1e-6;

inline double hecke_power_eigenvalue(double lambda, int ell) {
  if (std::abs(lambda) > 2 + kRamanujanTolerance)
    fail(ErrorCode::RamanujanViolation, "|lambda| = " + std::to_string(std::abs(lambda)) + " exceeds 2");
  if (ell < 0) fail(ErrorCode::InvalidArgument, "power must be >= 0");
  return chebyshev_eval(ell, lambda);
}

// Upper triangular representative (pi^{ell-s}, beta; 0, pi^s).
struct CosetRep {
  int s = 0;
  int top_valuation = 0;     // ell - s
  int bottom_valuation = 0;  // s
  std::int64_t beta_index = 0;  // canonical integer in [0, N(P)^{ell-s})
  FieldElement beta;
};

namespace detail {

// Canonical representatives of O / I for an integral ideal I: u + v w with
// 0 <= u < a, 0 <= v < c in the Hermite basis of I, indexed by u + a v.
inline std::vector<FieldElement> residues_mod(const FractionalIdeal& I) {
  const Field& f = I.field();
  std::int64_t a = to_i64(I.a(), "residue bound"), c = f.degree() == 1 ? 1 : to_i64(I.c(), "residue bound");
  std::vector<FieldElement> out;
  out.reserve(static_cast<std::size_t>(a * c));
  for (std::int64_t v = 0; v < c; ++v) {
    for (std::int64_t u = 0; u < a; ++u) out.push_back(f.element(Rational(u), Rational(v)));
  }
  return out;
}

// Reduction of an integral element modulo I to its canonical representative.
inline FieldElement reduce_mod(const FieldElement& x, const FractionalIdeal& I) {
  const Field& f = I.field();
  BigInt X = numerator(x.x()), Y = numerator(x.y());
  if (f.degree() == 1) return f.from_integer(mod_floor(X, I.a()));
  BigInt j = floor_div(Y, I.c());
  Y -= j * I.c();
  X -= j * I.b();
  return f.element(Rational(mod_floor(X, I.a())), Rational(Y));
}

}  // namespace detail

struct CosetOptions {
  std::int64_t max_reps = 1'000'000;
};

inline std::vector<CosetRep> coset_reps(const PrimeIdeal& P, int ell, const CosetOptions& opt = {}) {
  if (ell < 0) fail(ErrorCode::InvalidArgument, "power must be >= 0");
  BigInt N = P.norm();
  BigInt total = 0, pw = 1;
  for (int s = 0; s <= ell; ++s) {
    total += pw;
    pw *= N;
  }
  if (total > opt.max_reps) fail(ErrorCode::EnumerationTooLarge, "coset count " + total.str() + " exceeds the cap");
  std::vector<CosetRep> out;
  for (int s = 0; s <= ell; ++s) {
    FractionalIdeal mod = P.ideal.pow(ell - s);
    auto res = detail::residues_mod(mod);
    std::int64_t idx = 0;
    for (auto& b : res) out.push_back({s, ell - s, s, idx++, std::move(b)});
  }
  return out;
}

// Exhaustive inequivalence: within each s, distinct canonical reductions
// modulo P^{ell-s}, and the count matches the closed form.
inline bool coset_reps_inequivalent(const PrimeIdeal& P, int ell, const std::vector<CosetRep>& reps) {
  for (int s = 0; s <= ell; ++s) {
    FractionalIdeal mod = P.ideal.pow(ell - s);
    std::set<std::pair<BigInt, BigInt>> seen;
    for (const auto& r : reps) {
      if (r.s != s) continue;
      auto red = detail::reduce_mod(r.beta, mod);
      if (!seen.insert({numerator(red.x()), numerator(red.y())}).second) return false;
    }
  }
  return true;
}

inline BigInt coset_count_closed_form(const BigInt& N, int ell) {
  return (boost::multiprecision::pow(N, static_cast<unsigned>(ell + 1)) - 1) / (N - 1);
}

// r / r' is a totally positive unit.
inline int delta_tilde(const FieldElement& r, const FieldElement& rp) {
  if (r.is_zero() || rp.is_zero()) fail(ErrorCode::ZeroArgument, "delta needs nonzero r and r'");
  FieldElement q = r / rp;
  return q.is_unit() && q.is_totally_positive() ? 1 : 0;
}

struct DescentData {
  PrimeIdeal prime;
  int ell = 0;
  FractionalIdeal b;
  FieldElement eta;
  std::vector<FieldElement> a;        // a_0, ..., a_ell
  std::vector<FieldElement> b_tilde;  // b~_0, ..., b~_ell
  std::vector<bool> a_is_generator;   // a_s generates P^s b^ell
  std::string shift_choice = "zero";
};

namespace detail {

// An element of I with v_P exactly v_P(I): small combinations of the basis
// that avoid I * P.
inline FieldElement exact_valuation_element(const FractionalIdeal& I, const PrimeIdeal& P) {
  FractionalIdeal IP = I * P.ideal;
  auto basis = I.basis();
  for (std::int64_t r = 0; r < 64; ++r) {
    for (std::int64_t i = -r; i <= r; ++i) {
      for (std::int64_t j : {r - std::llabs(i), -(r - std::llabs(i))}) {
        FieldElement x = basis[0] * Rational(i);
        if (basis.size() > 1) x += basis[1] * Rational(j);
        else if (j != 0) continue;
        if (!x.is_zero() && !IP.contains(x)) return x;
      }
    }
  }
  fail(ErrorCode::EnumerationTooLarge, "no element of exact valuation found");
}

}  // namespace detail

inline DescentData descent_data(const PrimeIdeal& P, int ell, const PrincipalSearchOptions& opt = {}) {
  if (ell < 0) fail(ErrorCode::InvalidArgument, "power must be >= 0");
  auto w = narrow_square_witness(P, opt);
  if (!w) fail(ErrorCode::NotNarrowSquare, P.ideal.to_string() + " is not a square in the narrow class group");
  const Field& f = P.ideal.field();
  DescentData D{P, ell, w->b, w->eta, {}, {}, {}, "zero"};
  FractionalIdeal bl = w->b.pow(ell);
  for (int s = 0; s <= ell; ++s) {
    FractionalIdeal target = P.ideal.pow(s) * bl;
    std::optional<FieldElement> g;
    if (2 * s == ell) {
      g = w->eta.pow(ell / 2);
    } else if (auto tp = principal_totally_positive_generator(target, opt)) {
      g = tp;
    } else {
      g = find_generator(target, opt);
    }
    D.a_is_generator.push_back(g.has_value());
    D.a.push_back(g ? *g : detail::exact_valuation_element(target, P));
    D.b_tilde.push_back(f.zero());
  }
  return D;
}

struct DescentCheck {
  bool ok = true;
  std::vector<std::string> failures;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
  }
};

// Every membership, valuation and positivity statement of the package,
// decided exactly.
inline DescentCheck verify_descent(const DescentData& D) {
  DescentCheck c;
  c.expect(D.b.is_integral(), "b is integral");
  c.expect(D.eta.is_integral(), "eta is integral");
  c.expect(D.eta.is_totally_positive(), "eta is totally positive");
  c.expect(D.prime.ideal * D.b * D.b == FractionalIdeal::principal(D.eta), "P b^2 = (eta)");
  int vb = valuation(D.b, D.prime);
  FractionalIdeal bl = D.b.pow(D.ell);
  FieldElement eta_l = D.eta.pow(D.ell);
  for (int s = 0; s <= D.ell; ++s) {
    const FieldElement& a = D.a[static_cast<std::size_t>(s)];
    std::string tag = " (s = " + std::to_string(s) + ")";
    c.expect(!a.is_zero(), "a_s nonzero" + tag);
    if (a.is_zero()) continue;
    c.expect((D.prime.ideal.pow(s) * bl).contains(a), "a_s in P^s b^ell" + tag);
    c.expect(valuation(a, D.prime) == s + D.ell * vb, "v_P(a_s) = s + ell v_P(b)" + tag);
    c.expect(D.b_tilde[static_cast<std::size_t>(s)].is_integral(), "b~_s integral" + tag);
    // a_s^2 / eta^ell is a totally positive unit exactly at the midpoint
    int dt = delta_tilde(a * a, eta_l);
    c.expect(dt == (2 * s == D.ell ? 1 : 0), "a_s^2 / eta^ell unit iff 2s = ell" + tag);
  }
  return c;
}

namespace detail {

// Synthetic multiplicative system c(prod q^m) = prod X_m(lambda_q), with
// lambda_p = lambda and lambda_q = 1/q elsewhere.
inline Rational synthetic_coefficient(std::int64_t n, std::int64_t p, const Rational& lambda) {
  Rational out = 1;
  for (auto [q, e] : factorize(n)) out *= chebyshev_eval(e, q == p ? lambda : Rational(1, q));
  return out;
}

}  // namespace detail

// lambda_{p^ell} c(r) = sum_{s=0}^{ell} c(r p^{ell - 2s}), decided in exact
// rational arithmetic.
inline bool verify_coefficient_relation(const Rational& lambda, std::int64_t p, int ell, std::int64_t r) {
  if (!is_prime(p)) fail(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
  if (ell < 0) fail(ErrorCode::InvalidArgument, "power must be >= 0");
  if (r <= 0) fail(ErrorCode::InvalidArgument, "r must be positive");
  BigInt pl = boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(ell));
  if (BigInt(r) % pl != 0) fail(ErrorCode::DivisibilityViolation, "p^ell does not divide r");
  Rational lhs = chebyshev_eval(ell, lambda) * detail::synthetic_coefficient(r, p, lambda);
  Rational rhs = 0;
  for (int s = 0; s <= ell; ++s) {
    BigInt idx = BigInt(r) * pl / boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(2 * s));
    rhs += detail::synthetic_coefficient(detail::to_i64(idx, "coefficient index"), p, lambda);
  }
  return lhs == rhs;
}

}  // namespace qfhecke
