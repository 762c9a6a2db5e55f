#pragma once

// Principality tests, class groups and narrow class groups of real quadratic
// fields, plus an independent class-number census through cycles of reduced
// indefinite binary quadratic forms.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "qfhecke/numberfield.hpp"

namespace qfhecke {

struct PrincipalSearchOptions {
  std::int64_t max_steps = 100'000'000;
  int unit_window = 8;
};

namespace detail {

inline std::int64_t to_i64(const BigInt& v, const char* what) {
  if (v > BigInt(std::numeric_limits<std::int64_t>::max()) || v < BigInt(std::numeric_limits<std::int64_t>::min()))
    fail(ErrorCode::EnumerationTooLarge, std::string(what) + " exceeds 64-bit range");
  return static_cast<std::int64_t>(v);
}

inline std::int64_t isqrt_i128(__int128 n) {
  if (n < 0) return -1;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(n)));
  while (static_cast<__int128>(r) * r > n) --r;
  while (static_cast<__int128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Generator of an integral ideal [a, b + c w], or nothing. Any generator g can
// be rescaled by a unit so that |g1|, |g2| <= sqrt(N * eps), which bounds the
// w-coordinate; for each candidate y the norm equation is a quadratic in x.
inline std::optional<FieldElement> integral_generator(const FractionalIdeal& J, const PrincipalSearchOptions& opt) {
  const Field& f = J.field();
  const auto& d = f.data();
  std::int64_t a = to_i64(J.a(), "ideal basis"), b = to_i64(J.b(), "ideal basis"), c = to_i64(J.c(), "ideal basis");
  std::int64_t n = to_i64(J.a() * J.c(), "ideal norm");
  long double eps = f.fundamental_unit().embedding(0);
  long double ybound = 2.0L * std::sqrt(static_cast<long double>(n) * eps) / std::sqrt(static_cast<long double>(d.disc));
  long double kmax_ld = ybound / static_cast<long double>(c) + 1;
  if (kmax_ld > static_cast<long double>(opt.max_steps))
    fail(ErrorCode::EnumerationTooLarge, "principality search box too large for " + J.to_string());
  auto kmax = static_cast<std::int64_t>(kmax_ld);
  for (std::int64_t k = 0; k <= kmax; ++k) {
    __int128 y = static_cast<__int128>(k) * c;
    for (std::int64_t target : {n, -n}) {
      // x^2 + t y x - m y^2 - target = 0
      __int128 disc = static_cast<__int128>(d.t) * d.t * y * y + 4 * (static_cast<__int128>(d.m) * y * y + target);
      std::int64_t s = isqrt_i128(disc);
      if (s < 0 || static_cast<__int128>(s) * s != disc) continue;
      for (int sg : {1, -1}) {
        __int128 num = -static_cast<__int128>(d.t) * y + sg * static_cast<__int128>(s);
        if (num % 2 != 0) continue;
        __int128 x = num / 2;
        __int128 rem = (x - static_cast<__int128>(k) * b) % a;
        if (rem != 0) continue;
        FieldElement g(f, Rational(BigInt(static_cast<std::int64_t>(x))), Rational(BigInt(static_cast<std::int64_t>(y))));
        if (FractionalIdeal::principal(g) == J) return g;
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Some generator of I when I is principal.
inline std::optional<FieldElement> find_generator(const FractionalIdeal& I, const PrincipalSearchOptions& opt = {}) {
  const Field& f = I.field();
  if (f.degree() == 1) return f.from_rational(I.norm());
  FractionalIdeal J = I * f.from_integer(I.den());
  auto g = detail::integral_generator(J, opt);
  if (!g) return std::nullopt;
  return *g * Rational(1, I.den());
}

inline bool is_principal(const FractionalIdeal& I, const PrincipalSearchOptions& opt = {}) {
  return find_generator(I, opt).has_value();
}

// Totally positive generator of I: a generator is adjusted by -1 and powers of
// the fundamental unit within the configured window.
inline std::optional<FieldElement> principal_totally_positive_generator(const FractionalIdeal& I,
                                                                        const PrincipalSearchOptions& opt = {}) {
  auto g = find_generator(I, opt);
  if (!g) return std::nullopt;
  const Field& f = I.field();
  if (f.degree() == 1) return g->sign(0) > 0 ? *g : -*g;
  FieldElement eps = f.fundamental_unit();
  FieldElement eps_inv = eps.inverse();
  FieldElement up = *g, down = *g;
  for (int k = 0; k <= opt.unit_window; ++k) {
    for (const FieldElement* cand : {&up, &down}) {
      if (cand->is_totally_positive()) return *cand;
      FieldElement neg = -*cand;
      if (neg.is_totally_positive()) return neg;
    }
    up = up * eps;
    down = down * eps_inv;
  }
  return std::nullopt;
}

inline bool is_narrowly_principal(const FractionalIdeal& I, const PrincipalSearchOptions& opt = {}) {
  return principal_totally_positive_generator(I, opt).has_value();
}

// Integral ideals of norm exactly n.
inline std::vector<FractionalIdeal> ideals_of_norm(const Field& f, std::int64_t n) {
  std::vector<FractionalIdeal> out{FractionalIdeal::unit(f)};
  if (n < 1) return {};
  for (auto [p, e] : factorize(n)) {
    auto fac = factor_rational_prime(f, p);
    std::vector<FractionalIdeal> local;
    if (fac.type == Splitting::Split) {
      for (int i = 0; i <= e; ++i) local.push_back(fac.primes[0].ideal.pow(i) * fac.primes[1].ideal.pow(e - i));
    } else if (fac.type == Splitting::Ramified) {
      local.push_back(fac.primes[0].ideal.pow(e));
    } else if (f.degree() == 1) {
      local.push_back(fac.primes[0].ideal.pow(e));
    } else if (e % 2 == 0) {
      local.push_back(fac.primes[0].ideal.pow(e / 2));
    }
    std::vector<FractionalIdeal> next;
    for (const auto& x : out) {
      for (const auto& y : local) next.push_back(x * y);
    }
    out = std::move(next);
  }
  return out;
}

inline std::vector<FractionalIdeal> ideals_of_norm_up_to(const Field& f, std::int64_t bound) {
  std::vector<FractionalIdeal> out;
  for (std::int64_t n = 1; n <= bound; ++n) {
    for (auto& I : ideals_of_norm(f, n)) out.push_back(std::move(I));
  }
  return out;
}

// Smith normal form diagonal of an integer matrix (rows are relations).
inline std::vector<BigInt> smith_diagonal(std::vector<std::vector<BigInt>> M) {
  std::vector<BigInt> diag;
  std::size_t rows = M.size(), cols = rows ? M[0].size() : 0;
  std::size_t r0 = 0;
  for (std::size_t c0 = 0; c0 < cols && r0 < rows; ++c0) {
    while (true) {
      // pivot: smallest nonzero entry in the remaining submatrix
      std::size_t pr = rows, pc = cols;
      for (std::size_t i = r0; i < rows; ++i) {
        for (std::size_t j = c0; j < cols; ++j) {
          if (M[i][j] != 0 && (pr == rows || abs(M[i][j]) < abs(M[pr][pc]))) {
            pr = i;
            pc = j;
          }
        }
      }
      if (pr == rows) return diag.size() < cols ? (diag.resize(cols, 0), diag) : diag;
      std::swap(M[r0], M[pr]);
      for (auto& row : M) std::swap(row[c0], row[pc]);
      bool clean = true;
      for (std::size_t i = r0 + 1; i < rows; ++i) {
        BigInt q = M[i][c0] / M[r0][c0];
        for (std::size_t j = c0; j < cols; ++j) M[i][j] -= q * M[r0][j];
        if (M[i][c0] != 0) clean = false;
      }
      for (std::size_t j = c0 + 1; j < cols; ++j) {
        BigInt q = M[r0][j] / M[r0][c0];
        for (std::size_t i = r0; i < rows; ++i) M[i][j] -= q * M[i][c0];
        if (M[r0][j] != 0) clean = false;
      }
      if (!clean) continue;
      bool divides = true;
      for (std::size_t i = r0 + 1; i < rows && divides; ++i) {
        for (std::size_t j = c0 + 1; j < cols; ++j) {
          if (M[i][j] % M[r0][c0] != 0) {
            for (std::size_t jj = c0; jj < cols; ++jj) M[r0][jj] += M[i][jj];
            divides = false;
            break;
          }
        }
      }
      if (!divides) continue;
      diag.push_back(abs(M[r0][c0]));
      ++r0;
      break;
    }
  }
  diag.resize(cols, 0);
  return diag;
}

struct ClassGroupDescription {
  bool narrow = false;
  std::int64_t order = 1;
  std::vector<std::int64_t> cyclic_factors;       // invariant factors > 1
  std::vector<FractionalIdeal> representatives;   // one integral ideal per class
  std::int64_t h = 1;                             // wide class number
  std::int64_t h_plus = 1;                        // narrow class number
};

namespace detail {

inline FractionalIdeal strip_content(const FractionalIdeal& I) {
  // I integral; remove the largest rational integer factor.
  BigInt g = gcd(gcd(I.a(), I.b()), I.c());
  if (g == 1) return I;
  return I * I.field().from_rational(Rational(1, g));
}

inline ClassGroupDescription resolve_class_group(const Field& f, bool narrow, const PrincipalSearchOptions& opt) {
  ClassGroupDescription out;
  out.narrow = narrow;
  out.representatives = {FractionalIdeal::unit(f)};
  if (f.degree() == 1) return out;

  // Generators: primes up to the Minkowski bound sqrt(D_F)/2 generate the
  // class group; the different has a generator of negative norm and so also
  // generates the kernel of the narrow-to-wide map.
  auto mink = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<long double>(f.discriminant())) / 2));
  std::vector<FractionalIdeal> gens;
  for (const auto& P : primes_of_norm_up_to(f, std::max<std::int64_t>(mink, 1))) gens.push_back(P.ideal);
  if (narrow) gens.push_back(different_ideal(f));
  auto equivalent = [&](const FractionalIdeal& A, const FractionalIdeal& B) {
    FractionalIdeal Q = A * B.conj();
    return narrow ? is_narrowly_principal(Q, opt) : is_principal(Q, opt);
  };

  struct Elem {
    FractionalIdeal rep;
    std::vector<BigInt> exps;
  };
  std::size_t ng = gens.size();
  std::vector<Elem> elems{{FractionalIdeal::unit(f), std::vector<BigInt>(ng, 0)}};
  std::vector<std::vector<BigInt>> relations;
  // the identity class starts the closure; every product lands either on a
  // known class (a relation) or on a new class
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (std::size_t g = 0; g < ng; ++g) {
      FractionalIdeal prod = strip_content(elems[head].rep * gens[g]);
      std::vector<BigInt> ex = elems[head].exps;
      ex[g] += 1;
      bool found = false;
      for (const auto& e : elems) {
        if (equivalent(prod, e.rep)) {
          std::vector<BigInt> rel(ng);
          for (std::size_t i = 0; i < ng; ++i) rel[i] = ex[i] - e.exps[i];
          relations.push_back(std::move(rel));
          found = true;
          break;
        }
      }
      if (!found) elems.push_back({prod, ex});
    }
  }
  out.order = static_cast<std::int64_t>(elems.size());
  for (auto& e : elems) {
    if (&e != &elems[0]) out.representatives.push_back(e.rep);
  }
  if (ng > 0) {
    auto diag = smith_diagonal(relations);
    BigInt prod = 1;
    for (const auto& v : diag) {
      if (v > 1) out.cyclic_factors.push_back(static_cast<std::int64_t>(v));
      prod *= v;
    }
    require(prod == out.order, ErrorCode::PreconditionViolation, "class group relation lattice inconsistent with closure");
  }
  return out;
}

}  // namespace detail

// Class group (narrow = false) or narrow class group (narrow = true), found by
// closing the group generated by primes below the Minkowski bound and
// resolving relations through principality tests.
inline ClassGroupDescription class_group(const Field& f, bool narrow, const PrincipalSearchOptions& opt = {}) {
  if (f.degree() == 1) return {};
  ClassGroupDescription wide = detail::resolve_class_group(f, false, opt);
  if (!narrow) {
    wide.h = wide.order;
    wide.h_plus = f.fundamental_unit_norm() == -1 ? wide.order : 2 * wide.order;
    return wide;
  }
  ClassGroupDescription nar = detail::resolve_class_group(f, true, opt);
  nar.h = wide.order;
  nar.h_plus = nar.order;
  return nar;
}

// Reduced indefinite forms of discriminant D_F, counted by cycles. This shares
// nothing with the ideal machinery above and serves as a cross-check.
struct FormCensus {
  std::int64_t h_plus = 0;  // cycles = proper equivalence classes
  std::int64_t h = 0;       // cycles up to (a, b, c) -> (-a, b, -c)
};

inline FormCensus reduced_form_census(std::int64_t disc) {
  using Form = std::tuple<std::int64_t, std::int64_t, std::int64_t>;
  long double sq = std::sqrt(static_cast<long double>(disc));
  auto is_reduced = [&](std::int64_t a, std::int64_t b) {
    long double aa = 2.0L * static_cast<long double>(std::llabs(a));
    return b > 0 && b < sq && sq - b < aa && aa < sq + b;
  };
  std::set<Form> reduced;
  for (std::int64_t b = 1; b < sq; ++b) {
    if ((b - disc) % 2 != 0) continue;
    std::int64_t ac = (b * b - disc) / 4;  // negative
    for (std::int64_t a = 1; a <= -ac; ++a) {
      if ((-ac) % a != 0) continue;
      for (std::int64_t sa : {a, -a}) {
        if (is_reduced(sa, b)) reduced.emplace(sa, b, ac / sa);
      }
    }
  }
  auto rho = [&](const Form& F) {
    auto [a, b, c] = F;
    std::int64_t ac = std::llabs(c);
    // b' = -b mod 2|c| with sqrt(D) - 2|c| < b' < sqrt(D)
    std::int64_t bp = -b;
    std::int64_t m = 2 * ac;
    auto top = static_cast<std::int64_t>(std::floor(sq));
    std::int64_t k = top - ((top - bp) % m + m) % m;  // largest value <= floor(sqrt D) congruent to -b
    if (k >= sq) k -= m;
    bp = k;
    return Form{c, bp, (bp * bp - disc) / (4 * c)};
  };
  std::map<Form, int> cycle_of;
  int cycles = 0;
  for (const auto& F : reduced) {
    if (cycle_of.count(F)) continue;
    Form G = F;
    do {
      cycle_of[G] = cycles;
      G = rho(G);
      if (!reduced.count(G)) fail(ErrorCode::PreconditionViolation, "reduction step left the reduced set");
    } while (!cycle_of.count(G));
    ++cycles;
  }
  std::set<std::pair<int, int>> pairs;
  for (const auto& [F, cyc] : cycle_of) {
    auto [a, b, c] = F;
    int other = cycle_of.at(Form{-a, b, -c});
    pairs.insert({std::min(cyc, other), std::max(cyc, other)});
  }
  FormCensus out;
  out.h_plus = cycles;
  out.h = static_cast<std::int64_t>(pairs.size());
  return out;
}

struct NarrowSquareWitness {
  FractionalIdeal b;
  FieldElement eta;
};

// Integral b and totally positive eta with P * b^2 = (eta), if P is a square
// in the narrow class group. Candidates b run over integral ideals up to the
// largest norm of a narrow class representative, so every class is covered.
inline std::optional<NarrowSquareWitness> narrow_square_witness(const PrimeIdeal& P,
                                                                const PrincipalSearchOptions& opt = {}) {
  const Field& f = P.ideal.field();
  if (f.degree() == 1) return NarrowSquareWitness{FractionalIdeal::unit(f), f.from_integer(P.p)};
  auto cg = class_group(f, true, opt);
  BigInt maxnorm = 1;
  for (const auto& R : cg.representatives) maxnorm = std::max(maxnorm, numerator(R.norm()));
  std::int64_t bound = detail::to_i64(maxnorm, "representative norm");
  for (std::int64_t n = 1; n <= bound; ++n) {
    for (const auto& B : ideals_of_norm(f, n)) {
      if (auto eta = principal_totally_positive_generator(P.ideal * B * B, opt)) return NarrowSquareWitness{B, *eta};
    }
  }
  return std::nullopt;
}

}  // namespace qfhecke
