#pragma once

// Twisted Kloosterman sums over Q and real quadratic fields.
//
//   KS(r, a; r', a; c, C) = sum_x e(S((r x + r' x^{-1}) / c)) * conj(chi(x))
//
// x runs over generators of the residue module a C^{-1} / c a, and x^{-1} is
// any element of a^{-1} C with x * x^{-1} = 1 mod c C. e(t) = exp(2 pi i t).

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "qfhecke/classgroup.hpp"
#include "qfhecke/numberfield.hpp"

namespace qfhecke {

using Complex = std::complex<long double>;

struct KloostermanOptions {
  std::int64_t max_residues = 1'000'000;
  // Added to every representative x as a multiple of the sublattice basis;
  // the sum must not change.
  std::int64_t shift_u = 0, shift_v = 0;
  FractionalIdeal* level = nullptr;  // defaults to O_F
};

// Kahan-compensated complex accumulator.
class ComplexAccumulator {
 public:
  void add(Complex z) {
    add_part(re_, cre_, z.real());
    add_part(im_, cim_, z.imag());
  }
  Complex value() const { return {re_ + cre_, im_ + cim_}; }

 private:
  static void add_part(long double& sum, long double& comp, long double v) {
    long double y = v - comp;
    long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  long double re_ = 0, im_ = 0, cre_ = 0, cim_ = 0;
};

inline Complex e_fraction(std::int64_t k, std::int64_t L) {
  long double ang = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(mod_norm(k, L)) / L;
  return {std::cos(ang), std::sin(ang)};
}

struct ResidueKey {
  std::int64_t u = 0, v = 0;
  auto operator<=>(const ResidueKey&) const = default;
};

// Character on the residue units, either trivial or an explicit table keyed by
// canonical residue coordinates.
class TwistCharacter {
 public:
  static TwistCharacter trivial() { return {}; }

  static TwistCharacter from_table(std::map<ResidueKey, Complex> table) {
    for (const auto& [k, v] : table) {
      if (std::abs(std::abs(v) - 1) > 1e-12L) fail(ErrorCode::InvalidArgument, "character values must have modulus 1");
    }
    TwistCharacter chi;
    chi.trivial_ = false;
    chi.table_ = std::move(table);
    return chi;
  }

  // Over Q with a = C = Z: the Legendre symbol (x / p) as a character mod c,
  // for an odd prime p dividing c.
  static TwistCharacter legendre(std::int64_t c, std::int64_t p) {
    if (!is_prime(p) || p == 2 || c % p != 0)
      fail(ErrorCode::InvalidArgument, "Legendre twist needs an odd prime dividing the modulus");
    std::map<ResidueKey, Complex> t;
    for (std::int64_t u = 0; u < c; ++u) {
      if (std::gcd(u, c) == 1) t[{u, 0}] = Complex(kronecker(u, p), 0);
    }
    return from_table(std::move(t));
  }

  bool is_trivial() const { return trivial_; }

  Complex operator()(const ResidueKey& k) const {
    if (trivial_) return 1;
    auto it = table_.find(k);
    if (it == table_.end()) fail(ErrorCode::PreconditionViolation, "character table has no value for a residue unit");
    return it->second;
  }

  const std::map<ResidueKey, Complex>& table() const { return table_; }

 private:
  bool trivial_ = true;
  std::map<ResidueKey, Complex> table_;
};

namespace detail {

struct IntLattice2 {
  std::int64_t a, b, c;  // rows (a, 0), (b, c)
};

inline std::int64_t i64(const BigInt& v) { return to_i64(v, "lattice coordinate"); }

// Integer coefficients k with sum k_i v_i = (1, 0), when one exists.
inline std::optional<std::vector<std::int64_t>> unit_combination(const std::vector<std::array<std::int64_t, 2>>& vecs) {
  std::size_t n = vecs.size();
  struct Row {
    __int128 x, y;
    std::vector<__int128> t;
  };
  std::vector<Row> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i].x = vecs[i][0];
    rows[i].y = vecs[i][1];
    rows[i].t.assign(n, 0);
    rows[i].t[i] = 1;
  }
  auto combine = [&](Row& p, Row& q, __int128 pv, __int128 qv, bool on_y) {
    // unimodular transform making q's selected coordinate zero
    __int128 a = pv, b = qv, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (b != 0) {
      __int128 qq = a / b, r = a - qq * b;
      a = b;
      b = r;
      __int128 ns = s0 - qq * s1;
      s0 = s1;
      s1 = ns;
      __int128 nt = t0 - qq * t1;
      t0 = t1;
      t1 = nt;
    }
    __int128 g = a;
    Row np, nq;
    np.x = s0 * p.x + t0 * q.x;
    np.y = s0 * p.y + t0 * q.y;
    nq.x = (qv / g) * p.x - (pv / g) * q.x;
    nq.y = (qv / g) * p.y - (pv / g) * q.y;
    np.t.resize(n);
    nq.t.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      np.t[i] = s0 * p.t[i] + t0 * q.t[i];
      nq.t[i] = (qv / g) * p.t[i] - (pv / g) * q.t[i];
    }
    (void)on_y;
    p = std::move(np);
    q = std::move(nq);
  };
  std::size_t piv = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].y == 0) continue;
    if (piv == n) {
      piv = i;
      continue;
    }
    combine(rows[piv], rows[i], rows[piv].y, rows[i].y, true);
  }
  std::size_t xp = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == piv || rows[i].x == 0) continue;
    if (xp == n) {
      xp = i;
      continue;
    }
    combine(rows[xp], rows[i], rows[xp].x, rows[i].x, false);
  }
  if (xp == n || (rows[xp].x != 1 && rows[xp].x != -1)) return std::nullopt;
  std::vector<std::int64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::int64_t>(rows[xp].t[i] * rows[xp].x);
  return out;
}

}  // namespace detail

// Units of a C^{-1} / c a with paired inverses in a^{-1} C.
class ResidueUnitGroup {
 public:
  struct Unit {
    ResidueKey key;           // x = u m1 + v m2 in the basis of a C^{-1}
    std::int64_t alpha1, alpha2;  // x^{-1} = alpha1 n1 + alpha2 n2 in the basis of a^{-1} C
  };

  ResidueUnitGroup(const FractionalIdeal& a, const FieldElement& c, const FractionalIdeal& C,
                   const KloostermanOptions& opt = {})
      : f_(a.field()), M_(a * C.inverse()), N_(a.inverse() * C), cC_(FractionalIdeal::unit(a.field())) {
    if (c.is_zero()) fail(ErrorCode::ModulusZero, "modulus c is zero");
    if (!(c.field() == f_) || !(C.field() == f_)) fail(ErrorCode::FieldMismatch, "mixed fields in residue group");
    cC_ = C * c;
    FractionalIdeal level = opt.level ? *opt.level : FractionalIdeal::unit(f_);
    if (!level.contains(cC_)) fail(ErrorCode::PreconditionViolation, "c is not in C^{-1} J");
    Rational index = cC_.norm();
    if (index > Rational(opt.max_residues))
      fail(ErrorCode::EnumerationTooLarge, "residue ring of size " + qfhecke::to_string(index) + " exceeds the cap");

    // sublattice c a inside M in M-coordinates, reduced to Hermite form
    FractionalIdeal sub = a * c;
    std::vector<std::array<BigInt, 2>> rows;
    for (const auto& e : sub.basis()) rows.push_back(coords_in(M_, e));
    auto h = detail::hnf2(f_.degree() == 1 ? std::vector<std::array<BigInt, 2>>{{rows[0][0], 0}} : rows);
    sub_ = {detail::i64(h.a), detail::i64(h.b), f_.degree() == 1 ? 1 : detail::i64(h.c)};

    auto mb = M_.basis_rows();
    auto nb = N_.basis_rows();
    auto kb = cC_.basis_rows();
    const auto& d = f_.data();
    std::int64_t mden = detail::i64(M_.den()), nden = detail::i64(N_.den());
    for (std::int64_t u = 0; u < sub_.a; ++u) {
      for (std::int64_t v = 0; v < sub_.c; ++v) {
        std::int64_t uu = u + opt.shift_u * sub_.a + opt.shift_v * sub_.b;
        std::int64_t vv = v + opt.shift_v * sub_.c;
        auto X = lincomb(mb, uu, vv);
        std::vector<std::array<std::int64_t, 2>> gens;
        for (const auto& nr : nb) {
          auto p = detail::mul_coords(d, X[0], X[1], nr[0], nr[1]);
          gens.push_back({detail::i64(p[0] / (mden * nden)), detail::i64(p[1] / (mden * nden))});
        }
        for (const auto& kr : kb) gens.push_back({detail::i64(kr[0] / cC_.den()), detail::i64(kr[1] / cC_.den())});
        auto coef = detail::unit_combination(gens);
        if (!coef) continue;
        Unit un{{uu, vv}, (*coef)[0], nb.size() > 1 ? (*coef)[1] : 0};
        verify(un);
        units_.push_back(un);
      }
    }
  }

  const Field& field() const { return f_; }
  const FractionalIdeal& module() const { return M_; }
  const FractionalIdeal& inverse_module() const { return N_; }
  const FractionalIdeal& modulus() const { return cC_; }
  std::int64_t residue_count() const { return sub_.a * sub_.c; }
  std::size_t size() const { return units_.size(); }
  const std::vector<Unit>& units() const { return units_; }

  FieldElement element(const Unit& un) const { return from_coords(M_, un.key.u, un.key.v); }
  FieldElement inverse(const Unit& un) const { return from_coords(N_, un.alpha1, un.alpha2); }

  // Canonical key of the residue class of x (shift undone).
  ResidueKey canonical(const ResidueKey& k) const {
    std::int64_t j = floor_div(BigInt(k.v), BigInt(sub_.c)).convert_to<std::int64_t>();
    std::int64_t v = k.v - j * sub_.c;
    std::int64_t u = mod_norm(k.u - j * sub_.b, sub_.a);
    return {u, v};
  }

  // Exact check of x * x^{-1} - 1 in c C.
  void verify(const Unit& un) const {
    FieldElement prod = element(un) * inverse(un) - f_.one();
    if (!cC_.contains(prod)) fail(ErrorCode::PreconditionViolation, "inverse pairing failed");
  }

 private:
  static std::array<BigInt, 2> coords_in(const FractionalIdeal& I, const FieldElement& e) {
    // e = u m1 + v m2, m1 = a/den, m2 = (b + c w)/den
    Rational y = e.y() * I.den();
    Rational v = I.field().degree() == 1 ? Rational(0) : y / Rational(I.c());
    Rational u = (e.x() * I.den() - v * Rational(I.b())) / Rational(I.a());
    if (!is_integer(u) || !is_integer(v)) fail(ErrorCode::PreconditionViolation, "element outside the module");
    return {numerator(u), numerator(v)};
  }

  static std::array<BigInt, 2> lincomb(const std::vector<std::array<BigInt, 2>>& b, std::int64_t u, std::int64_t v) {
    std::array<BigInt, 2> out{b[0][0] * u, b[0][1] * u};
    if (b.size() > 1) {
      out[0] += b[1][0] * v;
      out[1] += b[1][1] * v;
    }
    return out;
  }

  FieldElement from_coords(const FractionalIdeal& I, std::int64_t u, std::int64_t v) const {
    auto X = lincomb(I.basis_rows(), u, v);
    return {f_, Rational(X[0], I.den()), Rational(X[1], I.den())};
  }

  Field f_;
  FractionalIdeal M_, N_, cC_;
  detail::IntLattice2 sub_{1, 0, 1};
  std::vector<Unit> units_;
};

struct KloostermanInput {
  FieldElement r, r_prime;
  FractionalIdeal a;
  FieldElement c;
  FractionalIdeal C;
};

namespace detail {

// Integer functional u, v -> L * S(t * (u e1 + v e2)) on a module basis, with
// the common denominator L returned alongside.
struct PhaseFunctional {
  std::vector<Rational> coeff;
};

inline PhaseFunctional phase_on(const FieldElement& t, const std::vector<FieldElement>& basis) {
  PhaseFunctional p;
  for (const auto& e : basis) p.coeff.push_back((t * e).trace());
  return p;
}

inline void check_integral_on(const FieldElement& t, const FractionalIdeal& sub, const char* what) {
  for (const auto& e : sub.basis()) {
    if (!is_integer((t * e).trace()))
      fail(ErrorCode::IllDefinedExponent, std::string("exponent not well defined modulo ") + what);
  }
}

}  // namespace detail

inline void check_kloosterman_preconditions(const KloostermanInput& in, const FractionalIdeal* level = nullptr) {
  const Field& f = in.a.field();
  FractionalIdeal dinv = inverse_different(f);
  if (!in.r.is_zero() && !(in.a.inverse() * dinv).contains(in.r))
    fail(ErrorCode::PreconditionViolation, "r is not in a^{-1} d^{-1}");
  if (!in.r_prime.is_zero() && !(in.a * dinv * in.C.pow(-2)).contains(in.r_prime))
    fail(ErrorCode::PreconditionViolation, "r' is not in a d^{-1} C^{-2}");
  if (in.c.is_zero()) fail(ErrorCode::ModulusZero, "modulus c is zero");
  FractionalIdeal J = level ? *level : FractionalIdeal::unit(f);
  if (!(in.C.inverse() * J).contains(in.c)) fail(ErrorCode::PreconditionViolation, "c is not in C^{-1} J");
}

inline Complex ks_twisted(const KloostermanInput& in, const TwistCharacter& chi = TwistCharacter::trivial(),
                          const KloostermanOptions& opt = {}) {
  check_kloosterman_preconditions(in, opt.level);
  ResidueUnitGroup G(in.a, in.c, in.C, opt);
  FieldElement cinv = in.c.inverse();
  FieldElement tr = in.r * cinv, tr2 = in.r_prime * cinv;
  detail::check_integral_on(tr, in.a * in.c, "c a");
  detail::check_integral_on(tr2, G.inverse_module() * G.modulus(), "c a^{-1} C^2");
  auto p1 = detail::phase_on(tr, G.module().basis());
  auto p2 = detail::phase_on(tr2, G.inverse_module().basis());
  BigInt L = 1;
  for (const auto& q : p1.coeff) L = lcm(L, denominator(q));
  for (const auto& q : p2.coeff) L = lcm(L, denominator(q));
  std::int64_t Li = detail::i64(L);
  auto coef = [&](const detail::PhaseFunctional& p, std::size_t i) -> std::int64_t {
    if (i >= p.coeff.size()) return 0;
    return detail::i64(mod_floor(numerator(p.coeff[i] * L), L));
  };
  std::int64_t A1 = coef(p1, 0), A2 = coef(p1, 1), B1 = coef(p2, 0), B2 = coef(p2, 1);
  std::vector<Complex> table(static_cast<std::size_t>(Li));
  for (std::int64_t k = 0; k < Li; ++k) table[static_cast<std::size_t>(k)] = e_fraction(k, Li);
  ComplexAccumulator acc;
  for (const auto& un : G.units()) {
    __int128 k = static_cast<__int128>(A1) * mod_norm(un.key.u, Li) + static_cast<__int128>(A2) * mod_norm(un.key.v, Li) +
                 static_cast<__int128>(B1) * mod_norm(un.alpha1, Li) + static_cast<__int128>(B2) * mod_norm(un.alpha2, Li);
    auto idx = static_cast<std::size_t>(static_cast<std::int64_t>(k % Li));
    Complex term = table[idx];
    if (!chi.is_trivial()) term *= std::conj(chi(G.canonical(un.key)));
    acc.add(term);
  }
  return acc.value();
}

// Classical S(m, n; c) = sum over x mod c coprime to c of e((m x + n xbar) / c).
inline Complex kloosterman_classical(std::int64_t m, std::int64_t n, std::int64_t c) {
  if (c == 0) fail(ErrorCode::ModulusZero, "modulus c is zero");
  c = std::llabs(c);
  std::vector<Complex> table(static_cast<std::size_t>(c));
  for (std::int64_t k = 0; k < c; ++k) table[static_cast<std::size_t>(k)] = e_fraction(k, c);
  std::int64_t mm = mod_norm(m, c), nn = mod_norm(n, c);
  ComplexAccumulator acc;
  for (std::int64_t x = 0; x < c; ++x) {
    std::int64_t xi = c == 1 ? 0 : invmod(x, c);
    if (c > 1 && xi == 0) continue;
    acc.add(table[static_cast<std::size_t>((mm * x + nn * xi) % c)]);
  }
  return acc.value();
}

// Classical sums S(m, n; c) for all 1 <= c <= cmax at once, sharing inverse tables.
inline std::vector<Complex> kloosterman_classical_row(std::int64_t m, std::int64_t n, std::int64_t cmax) {
  std::vector<Complex> out(static_cast<std::size_t>(cmax) + 1);
  for (std::int64_t c = 1; c <= cmax; ++c) out[static_cast<std::size_t>(c)] = kloosterman_classical(m, n, c);
  return out;
}

struct WeilCheck {
  long double abs_ks = 0;
  long double rhs = 0;
  long double ratio = 0;
  long double gcd_norm = 0;
  long double modulus_norm = 0;
};

// |KS| against N(gcd(r a d, r' C^2 a^{-1} d, c C))^{1/2} N(c C)^{1/2 + eps}.
inline WeilCheck weil_check(const KloostermanInput& in, const TwistCharacter& chi, long double eps,
                            const KloostermanOptions& opt = {}) {
  if (eps < 0) fail(ErrorCode::InvalidArgument, "epsilon must be nonnegative");
  Complex ks = ks_twisted(in, chi, opt);
  const Field& f = in.a.field();
  FractionalIdeal d = different_ideal(f);
  FractionalIdeal cC = in.C * in.c;
  std::optional<FractionalIdeal> g = cC;
  if (!in.r.is_zero()) g = *g + in.a * d * in.r;
  if (!in.r_prime.is_zero()) g = *g + in.C * in.C * in.a.inverse() * d * in.r_prime;
  WeilCheck w;
  w.abs_ks = std::abs(ks);
  w.gcd_norm = to_long_double(g->norm());
  w.modulus_norm = to_long_double(cC.norm());
  w.rhs = std::sqrt(w.gcd_norm) * std::pow(w.modulus_norm, 0.5L + eps);
  w.ratio = w.abs_ks / w.rhs;
  return w;
}

// Classical Weil bound with divisor factor: d(c) sqrt(c) gcd(m, n, c)^{1/2}.
inline long double classical_weil_rhs(std::int64_t m, std::int64_t n, std::int64_t c) {
  std::int64_t g = std::gcd(std::gcd(std::llabs(m), std::llabs(n)), std::llabs(c));
  return static_cast<long double>(divisor_count(c)) * std::sqrt(static_cast<long double>(c)) *
         std::sqrt(static_cast<long double>(g));
}

}  // namespace qfhecke
