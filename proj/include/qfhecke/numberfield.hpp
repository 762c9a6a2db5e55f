#pragma once

// Exact arithmetic in Q and real quadratic fields Q(sqrt D).
//
// Elements are stored as rational coordinates (x, y) with respect to the
// integral basis (1, w), where w = (1 + sqrt D)/2 when D = 1 mod 4 and
// w = sqrt D otherwise. In both cases w^2 = t*w + m for small integers t, m.
//
// Fractional ideals are Z-lattices L/den with L an integral lattice kept in
// Hermite form: rows (a, 0) and (b, c) in (1, w)-coordinates with a, c > 0 and
// 0 <= b < a, and den the least positive integer making den*I integral.
// Two ideals are equal iff their (den, a, b, c) agree.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qfhecke/arith.hpp"

namespace qfhecke {

class FieldElement;

namespace detail {

struct FieldData {
  int degree = 1;
  std::int64_t radicand = 1;
  std::int64_t disc = 1;
  std::int64_t t = 0;  // w^2 = t*w + m
  std::int64_t m = 0;
  BigInt unit_x = 1, unit_y = 0;
  int unit_norm = 1;
  long double omega1 = 0, omega2 = 0;  // w under the two real embeddings
};

// Exact sign of a + b*sqrt(n) for rational a, b and a non-square n > 0.
inline int sign_quadratic_surd(const Rational& a, const Rational& b, std::int64_t n) {
  int sa = a.sign(), sb = b.sign();
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  Rational lhs = a * a, rhs = b * b * n;
  return lhs > rhs ? sa : sb;
}

}  // namespace detail

class Field {
 public:
  static Field rational() { return Field(std::make_shared<detail::FieldData>()); }

  // Q(sqrt D) for squarefree D > 1. The fundamental unit comes from the
  // continued fraction expansion of w: the first convergent p/q with
  // p - q*w of norm +-1 yields it.
  static Field quadratic(std::int64_t D) {
    if (D <= 1) fail(ErrorCode::DegreeUnsupported, "radicand must be > 1 (got " + std::to_string(D) + ")");
    if (!is_squarefree(D)) fail(ErrorCode::NotSquarefree, std::to_string(D) + " is not squarefree");
    auto d = std::make_shared<detail::FieldData>();
    d->degree = 2;
    d->radicand = D;
    if (D % 4 == 1) {
      d->disc = D;
      d->t = 1;
      d->m = (D - 1) / 4;
    } else {
      d->disc = 4 * D;
      d->t = 0;
      d->m = D;
    }
    long double s = std::sqrt(static_cast<long double>(d->disc));
    d->omega1 = (static_cast<long double>(d->t) + s) / 2;
    d->omega2 = (static_cast<long double>(d->t) - s) / 2;
    compute_fundamental_unit(*d);
    return Field(std::move(d));
  }

  // "Q", "rational", "1" or a squarefree radicand.
  static Field parse(std::string_view spec) {
    if (spec == "Q" || spec == "rational" || spec == "1") return rational();
    return quadratic(static_cast<std::int64_t>(parse_bigint(spec)));
  }

  int degree() const { return d_->degree; }
  std::optional<std::int64_t> radicand() const {
    if (d_->degree == 1) return std::nullopt;
    return d_->radicand;
  }
  std::int64_t discriminant() const { return d_->disc; }
  std::int64_t omega_trace() const { return d_->t; }
  std::int64_t omega_constant() const { return d_->m; }
  long double omega_embedding(int j) const { return j == 0 ? d_->omega1 : d_->omega2; }
  int fundamental_unit_norm() const { return d_->unit_norm; }

  FieldElement zero() const;
  FieldElement one() const;
  FieldElement omega() const;
  FieldElement from_integer(const BigInt& n) const;
  FieldElement from_rational(const Rational& q) const;
  FieldElement element(const Rational& x, const Rational& y) const;
  FieldElement sqrt_radicand() const;
  FieldElement fundamental_unit() const;

  std::string description() const {
    if (d_->degree == 1) return "Q";
    return "Q(sqrt(" + std::to_string(d_->radicand) + "))";
  }

  // Short machine label, accepted back by parse().
  std::string label() const { return d_->degree == 1 ? "Q" : std::to_string(d_->radicand); }

  bool operator==(const Field& o) const {
    return d_ == o.d_ || (d_->degree == o.d_->degree && d_->radicand == o.d_->radicand);
  }

  const detail::FieldData& data() const { return *d_; }

 private:
  explicit Field(std::shared_ptr<const detail::FieldData> d) : d_(std::move(d)) {}

  static void compute_fundamental_unit(detail::FieldData& d);

  std::shared_ptr<const detail::FieldData> d_;
};

class FieldElement {
 public:
  FieldElement(Field f, Rational x = 0, Rational y = 0) : f_(std::move(f)), x_(std::move(x)), y_(std::move(y)) {
    if (f_.degree() == 1 && y_ != 0) fail(ErrorCode::InvalidArgument, "rational field element with w-coordinate");
  }

  const Field& field() const { return f_; }
  const Rational& x() const { return x_; }
  const Rational& y() const { return y_; }

  bool is_zero() const { return x_ == 0 && y_ == 0; }
  bool is_integral() const { return is_integer(x_) && is_integer(y_); }
  bool is_rational() const { return y_ == 0; }

  FieldElement operator+(const FieldElement& o) const {
    check(o);
    return {f_, x_ + o.x_, y_ + o.y_};
  }
  FieldElement operator-(const FieldElement& o) const {
    check(o);
    return {f_, x_ - o.x_, y_ - o.y_};
  }
  FieldElement operator-() const { return {f_, -x_, -y_}; }
  FieldElement operator*(const FieldElement& o) const {
    check(o);
    const auto& d = f_.data();
    Rational yy = y_ * o.y_;
    return {f_, x_ * o.x_ + yy * d.m, x_ * o.y_ + o.x_ * y_ + yy * d.t};
  }
  FieldElement operator*(const Rational& q) const { return {f_, x_ * q, y_ * q}; }
  FieldElement operator/(const FieldElement& o) const { return *this * o.inverse(); }
  FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
  FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

  bool operator==(const FieldElement& o) const { return f_ == o.f_ && x_ == o.x_ && y_ == o.y_; }

  FieldElement conj() const {
    if (f_.degree() == 1) return *this;
    return {f_, x_ + y_ * f_.data().t, -y_};
  }

  Rational trace() const {
    if (f_.degree() == 1) return x_;
    return 2 * x_ + y_ * f_.data().t;
  }

  Rational norm() const {
    if (f_.degree() == 1) return x_;
    const auto& d = f_.data();
    return x_ * x_ + x_ * y_ * d.t - y_ * y_ * d.m;
  }

  FieldElement inverse() const {
    if (is_zero()) fail(ErrorCode::ZeroArgument, "inverse of zero");
    if (f_.degree() == 1) return {f_, 1 / x_};
    Rational n = norm();
    FieldElement c = conj();
    return {f_, c.x_ / n, c.y_ / n};
  }

  FieldElement pow(std::int64_t e) const {
    if (e < 0) return inverse().pow(-e);
    FieldElement result = f_.one(), base = *this;
    while (e > 0) {
      if (e & 1) result *= base;
      base *= base;
      e >>= 1;
    }
    return result;
  }

  bool is_unit() const { return is_integral() && abs(norm()) == 1; }

  // Image under the j-th real embedding (j = 0 takes sqrt D > 0).
  long double embedding(int j) const {
    if (f_.degree() == 1) return to_long_double(x_);
    return to_long_double(x_) + to_long_double(y_) * f_.omega_embedding(j);
  }

  std::vector<long double> embeddings() const {
    std::vector<long double> out;
    for (int j = 0; j < f_.degree(); ++j) out.push_back(embedding(j));
    return out;
  }

  // Exact sign under the j-th embedding.
  int sign(int j) const {
    if (f_.degree() == 1) return x_.sign();
    const auto& d = f_.data();
    Rational a = x_ + y_ * Rational(d.t, 2);
    Rational b = y_ / 2;
    if (j == 1) b = -b;
    return detail::sign_quadratic_surd(a, b, d.disc);
  }

  bool is_totally_positive() const {
    for (int j = 0; j < f_.degree(); ++j) {
      if (sign(j) <= 0) return false;
    }
    return true;
  }

  std::string to_string() const {
    if (f_.degree() == 1 || y_ == 0) return qfhecke::to_string(x_);
    std::string s = x_ == 0 ? "" : qfhecke::to_string(x_) + (y_ > 0 ? " + " : " - ");
    if (x_ == 0 && y_ < 0) s = "-";
    Rational ay = abs(y_);
    if (ay != 1) s += qfhecke::to_string(ay) + "*";
    return s + "w";
  }

 private:
  void check(const FieldElement& o) const {
    if (!(f_ == o.f_)) fail(ErrorCode::FieldMismatch, "elements of different fields");
  }

  Field f_;
  Rational x_, y_;
};

inline FieldElement operator*(const Rational& q, const FieldElement& e) { return e * q; }

inline FieldElement Field::zero() const { return FieldElement(*this); }
inline FieldElement Field::one() const { return FieldElement(*this, 1); }
inline FieldElement Field::omega() const {
  if (degree() == 1) fail(ErrorCode::DegreeUnsupported, "Q has no generator w");
  return FieldElement(*this, 0, 1);
}
inline FieldElement Field::from_integer(const BigInt& n) const { return FieldElement(*this, Rational(n)); }
inline FieldElement Field::from_rational(const Rational& q) const { return FieldElement(*this, q); }
inline FieldElement Field::element(const Rational& x, const Rational& y) const { return FieldElement(*this, x, y); }
inline FieldElement Field::sqrt_radicand() const {
  if (degree() == 1) fail(ErrorCode::DegreeUnsupported, "Q has no radicand");
  // sqrt D = 2w - 1 when D = 1 mod 4, else w.
  if (d_->t == 1) return FieldElement(*this, -1, 2);
  return FieldElement(*this, 0, 1);
}
inline FieldElement Field::fundamental_unit() const {
  if (degree() == 1) return one();
  return FieldElement(*this, Rational(d_->unit_x), Rational(d_->unit_y));
}

inline void Field::compute_fundamental_unit(detail::FieldData& d) {
  // Continued fraction of w = (P + sqrt N)/Q with Q | N - P^2.
  const BigInt N = d.radicand;
  BigInt P = d.t == 1 ? 1 : 0;
  BigInt Q = d.t == 1 ? 2 : 1;
  const BigInt s = boost::multiprecision::sqrt(N);
  BigInt p_prev = 1, p_prev2 = 0, q_prev = 0, q_prev2 = 1;
  for (int iter = 0; iter < 1000000; ++iter) {
    BigInt a = Q > 0 ? floor_div(P + s, Q) : floor_div(-P - s - 1, -Q);
    BigInt p = a * p_prev + p_prev2;
    BigInt q = a * q_prev + q_prev2;
    p_prev2 = p_prev;
    p_prev = p;
    q_prev2 = q_prev;
    q_prev = q;
    // eta = p - q w has norm p^2 - t p q - m q^2.
    BigInt nrm = p * p - BigInt(d.t) * p * q - BigInt(d.m) * q * q;
    if (nrm == 1 || nrm == -1) {
      int n = nrm == 1 ? 1 : -1;
      // eps = +-eta^{-1} = +-N(eta) * conj(eta); conj(p - q w) = (p - q t) + q w.
      BigInt ex = (p - q * d.t) * n, ey = q * n;
      long double v = ex.convert_to<long double>() + ey.convert_to<long double>() * d.omega1;
      if (v < 0) {
        ex = -ex;
        ey = -ey;
      }
      d.unit_x = ex;
      d.unit_y = ey;
      d.unit_norm = n;
      return;
    }
    BigInt P2 = a * Q - P;
    BigInt Q2 = (N - P2 * P2) / Q;
    P = P2;
    Q = Q2;
  }
  fail(ErrorCode::EnumerationTooLarge, "continued fraction period too long");
}

namespace detail {

// Hermite form of an integral lattice in Z^2 given by generating rows.
// Result rows: (a, 0), (b, c) with a, c >= 0 and 0 <= b < a whenever a > 0.
struct Hnf2 {
  BigInt a = 0, b = 0, c = 0;
};

inline Hnf2 hnf2(const std::vector<std::array<BigInt, 2>>& rows) {
  BigInt px = 0, py = 0, ax = 0;
  for (const auto& r : rows) {
    const BigInt &x = r[0], &y = r[1];
    if (y == 0) {
      ax = gcd(ax, x);
      continue;
    }
    if (py == 0) {
      ax = gcd(ax, px);
      px = x;
      py = y;
      continue;
    }
    ExtGcd e = ext_gcd(py, y);
    BigInt nx = e.s * px + e.t * x;
    BigInt other = (y / e.g) * px - (py / e.g) * x;
    ax = gcd(ax, other);
    px = nx;
    py = e.g;
  }
  Hnf2 h;
  if (py < 0) {
    px = -px;
    py = -py;
  }
  h.a = abs(ax);
  h.c = py;
  h.b = h.a > 0 ? mod_floor(px, h.a) : px;
  return h;
}

inline std::array<BigInt, 2> mul_coords(const FieldData& d, const BigInt& x1, const BigInt& y1, const BigInt& x2,
                                        const BigInt& y2) {
  BigInt yy = y1 * y2;
  return {x1 * x2 + yy * d.m, x1 * y2 + x2 * y1 + yy * d.t};
}

}  // namespace detail

class FractionalIdeal {
 public:
  static FractionalIdeal unit(const Field& f) { return FractionalIdeal(f, 1, 1, 0, 1); }

  static FractionalIdeal principal(const FieldElement& g) {
    std::vector<FieldElement> gens{g};
    return generated_by(g.field(), gens);
  }

  static FractionalIdeal from_integer(const Field& f, const BigInt& n) { return principal(f.from_integer(n)); }

  // O_F-module generated by the given elements.
  static FractionalIdeal generated_by(const Field& f, std::span<const FieldElement> gens) {
    BigInt den = 1;
    std::vector<FieldElement> all;
    for (const auto& g : gens) {
      if (!(g.field() == f)) fail(ErrorCode::FieldMismatch, "generator from another field");
      if (g.is_zero()) continue;
      all.push_back(g);
      if (f.degree() == 2) all.push_back(g * f.omega());
    }
    if (all.empty()) fail(ErrorCode::ZeroIdeal, "ideal generated by zero");
    for (const auto& g : all) den = lcm(den, lcm(denominator(g.x()), denominator(g.y())));
    std::vector<std::array<BigInt, 2>> rows;
    for (const auto& g : all) rows.push_back({numerator(g.x() * den), numerator(g.y() * den)});
    return from_lattice(f, den, rows);
  }

  // Builds the ideal with the given denominator and integral basis rows,
  // rejecting lattices that are not O_F-modules.
  static FractionalIdeal from_basis(const Field& f, const BigInt& den, const std::vector<std::array<BigInt, 2>>& rows) {
    if (den <= 0) fail(ErrorCode::InvalidArgument, "ideal denominator must be positive");
    FractionalIdeal I = from_lattice(f, den, rows);
    if (f.degree() == 2) {
      for (const auto& e : I.basis()) {
        if (!I.contains(e * f.omega())) fail(ErrorCode::NotIdeal, "lattice is not closed under multiplication by w");
      }
    }
    return I;
  }

  const Field& field() const { return f_; }
  const BigInt& den() const { return den_; }
  const BigInt& a() const { return a_; }
  const BigInt& b() const { return b_; }
  const BigInt& c() const { return c_; }

  bool is_integral() const { return den_ == 1; }

  // Z-basis of the ideal.
  std::vector<FieldElement> basis() const {
    std::vector<FieldElement> out;
    out.emplace_back(f_, Rational(a_, den_), 0);
    if (f_.degree() == 2) out.emplace_back(f_, Rational(b_, den_), Rational(c_, den_));
    return out;
  }

  // Integer basis rows of den * I.
  std::vector<std::array<BigInt, 2>> basis_rows() const {
    if (f_.degree() == 1) return {{a_, 0}};
    return {{a_, 0}, {b_, c_}};
  }

  Rational norm() const {
    if (f_.degree() == 1) return Rational(a_, den_);
    return Rational(a_ * c_, den_ * den_);
  }

  bool contains(const FieldElement& e) const {
    if (!(e.field() == f_)) fail(ErrorCode::FieldMismatch, "membership across fields");
    Rational X = e.x() * den_, Y = e.y() * den_;
    if (!is_integer(X) || !is_integer(Y)) return false;
    BigInt xi = numerator(X), yi = numerator(Y);
    if (f_.degree() == 1) return xi % a_ == 0;
    if (yi % c_ != 0) return false;
    BigInt k = yi / c_;
    return (xi - k * b_) % a_ == 0;
  }

  // this contains o (as sets).
  bool contains(const FractionalIdeal& o) const {
    for (const auto& e : o.basis()) {
      if (!contains(e)) return false;
    }
    return true;
  }

  // I | J iff J is contained in I.
  bool divides(const FractionalIdeal& o) const { return contains(o); }

  FractionalIdeal operator*(const FractionalIdeal& o) const {
    check(o);
    std::vector<std::array<BigInt, 2>> rows;
    for (const auto& r1 : basis_rows()) {
      for (const auto& r2 : o.basis_rows()) rows.push_back(detail::mul_coords(f_.data(), r1[0], r1[1], r2[0], r2[1]));
    }
    return from_lattice(f_, den_ * o.den_, rows);
  }

  FractionalIdeal operator*(const FieldElement& e) const { return *this * principal(e); }

  // Ideal sum, i.e. the gcd of the two ideals.
  FractionalIdeal operator+(const FractionalIdeal& o) const {
    check(o);
    BigInt den = lcm(den_, o.den_);
    std::vector<std::array<BigInt, 2>> rows;
    for (const auto& r : basis_rows()) rows.push_back({r[0] * (den / den_), r[1] * (den / den_)});
    for (const auto& r : o.basis_rows()) rows.push_back({r[0] * (den / o.den_), r[1] * (den / o.den_)});
    return from_lattice(f_, den, rows);
  }

  FractionalIdeal conj() const {
    if (f_.degree() == 1) return *this;
    std::vector<std::array<BigInt, 2>> rows;
    rows.push_back({a_, 0});
    rows.push_back({b_ + c_ * f_.data().t, -c_});
    return from_lattice(f_, den_, rows);
  }

  // I^{-1} = conj(I) / N(I) for quadratic fields.
  FractionalIdeal inverse() const {
    Rational n = norm();
    if (f_.degree() == 1) return principal(f_.from_rational(1 / n));
    return conj() * f_.from_rational(1 / n);
  }

  FractionalIdeal operator/(const FractionalIdeal& o) const { return *this * o.inverse(); }

  FractionalIdeal pow(std::int64_t e) const {
    if (e < 0) return inverse().pow(-e);
    FractionalIdeal result = unit(f_), base = *this;
    while (e > 0) {
      if (e & 1) result = result * base;
      base = base * base;
      e >>= 1;
    }
    return result;
  }

  bool operator==(const FractionalIdeal& o) const {
    return f_ == o.f_ && den_ == o.den_ && a_ == o.a_ && b_ == o.b_ && c_ == o.c_;
  }

  std::string to_string() const {
    std::string s = "[" + a_.str();
    if (f_.degree() == 2) s += ", " + FieldElement(f_, Rational(b_), Rational(c_)).to_string();
    s += "]";
    if (den_ != 1) s += "/" + den_.str();
    return s;
  }

 private:
  FractionalIdeal(Field f, BigInt den, BigInt a, BigInt b, BigInt c)
      : f_(std::move(f)), den_(std::move(den)), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {}

  static FractionalIdeal from_lattice(const Field& f, BigInt den, const std::vector<std::array<BigInt, 2>>& rows) {
    detail::Hnf2 h = detail::hnf2(rows);
    if (f.degree() == 1) {
      if (h.c != 0) fail(ErrorCode::InvalidArgument, "rational lattice with a w-coordinate");
      if (h.a == 0) fail(ErrorCode::ZeroIdeal, "zero lattice");
      BigInt g = gcd(den, h.a);
      return FractionalIdeal(f, den / g, h.a / g, 0, 1);
    }
    if (h.a == 0 || h.c == 0) fail(ErrorCode::NotIdeal, "lattice of rank < 2");
    BigInt g = gcd(gcd(den, h.a), gcd(h.b, h.c));
    return FractionalIdeal(f, den / g, h.a / g, h.b / g, h.c / g);
  }

  void check(const FractionalIdeal& o) const {
    if (!(f_ == o.f_)) fail(ErrorCode::FieldMismatch, "ideals of different fields");
  }

  Field f_;
  BigInt den_, a_, b_, c_;
};

enum class Splitting { Split, Inert, Ramified };

inline std::string_view splitting_name(Splitting s) {
  switch (s) {
    case Splitting::Split: return "split";
    case Splitting::Inert: return "inert";
    case Splitting::Ramified: return "ramified";
  }
  return "?";
}

struct PrimeIdeal {
  FractionalIdeal ideal;
  std::int64_t p;          // rational prime below
  int residue_degree;      // N(P) = p^f
  int ramification;        // e

  BigInt norm() const { return boost::multiprecision::pow(BigInt(p), static_cast<unsigned>(residue_degree)); }
};

struct PrimeFactorization {
  Splitting type;
  std::vector<PrimeIdeal> primes;
};

// Decomposition of (p) in O_F by the factorization of the minimal polynomial
// X^2 - tX - m of w modulo p. In Q a rational prime stays prime; it is
// reported as Inert with residue degree 1.
inline PrimeFactorization factor_rational_prime(const Field& f, std::int64_t p) {
  if (!is_prime(p)) fail(ErrorCode::NotPrime, std::to_string(p) + " is not a rational prime");
  if (f.degree() == 1) return {Splitting::Inert, {{FractionalIdeal::from_integer(f, p), p, 1, 1}}};
  const auto& d = f.data();
  auto make = [&](std::int64_t r) {
    std::vector<FieldElement> gens{f.from_integer(p), f.element(-r, 1)};
    return FractionalIdeal::generated_by(f, gens);
  };
  std::vector<std::int64_t> roots;
  if (p == 2) {
    for (std::int64_t r = 0; r < 2; ++r) {
      if (mod_norm(r * r - d.t * r - d.m, 2) == 0) roots.push_back(r);
    }
    if (roots.size() == 1) return {Splitting::Ramified, {{make(roots[0]), p, 1, 2}}};
  } else {
    int k = kronecker(d.disc, p);
    std::int64_t inv2 = (p + 1) / 2;
    if (k == 0) {
      std::int64_t r = mulmod(mod_norm(d.t, p), inv2, p);
      return {Splitting::Ramified, {{make(r), p, 1, 2}}};
    }
    if (k == 1) {
      std::int64_t s = sqrt_mod_prime(d.disc, p);
      roots.push_back(mulmod(mod_norm(d.t + s, p), inv2, p));
      roots.push_back(mulmod(mod_norm(d.t - s, p), inv2, p));
    }
  }
  if (roots.empty()) return {Splitting::Inert, {{FractionalIdeal::from_integer(f, p), p, 2, 1}}};
  return {Splitting::Split, {{make(roots[0]), p, 1, 1}, {make(roots[1]), p, 1, 1}}};
}

// Splitting type only (no ideal construction); used for large prime sweeps.
inline Splitting splitting_type(const Field& f, std::int64_t p) {
  if (f.degree() == 1) return Splitting::Inert;
  const auto& d = f.data();
  if (p == 2) {
    int roots = 0;
    for (std::int64_t r = 0; r < 2; ++r) roots += mod_norm(r * r - d.t * r - d.m, 2) == 0;
    return roots == 2 ? Splitting::Split : roots == 1 ? Splitting::Ramified : Splitting::Inert;
  }
  int k = kronecker(d.disc, p);
  return k == 0 ? Splitting::Ramified : k == 1 ? Splitting::Split : Splitting::Inert;
}

// Recognises a prime ideal, or throws NotPrime.
inline PrimeIdeal as_prime(const FractionalIdeal& I) {
  if (!I.is_integral()) fail(ErrorCode::NotPrime, "fractional ideal " + I.to_string() + " is not prime");
  const BigInt& a = I.a();
  if (a > BigInt(std::numeric_limits<std::int64_t>::max()) || !is_prime(static_cast<std::int64_t>(a)))
    fail(ErrorCode::NotPrime, I.to_string() + " is not a prime ideal");
  for (auto& P : factor_rational_prime(I.field(), static_cast<std::int64_t>(a)).primes) {
    if (P.ideal == I) return P;
  }
  fail(ErrorCode::NotPrime, I.to_string() + " is not a prime ideal");
}

// All prime ideals with norm <= bound, ordered by norm then by the Hermite form.
inline std::vector<PrimeIdeal> primes_of_norm_up_to(const Field& f, std::int64_t bound) {
  std::vector<PrimeIdeal> out;
  for (std::int64_t p : primes_up_to(bound)) {
    for (auto& P : factor_rational_prime(f, p).primes) {
      if (P.norm() <= bound) out.push_back(P);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const PrimeIdeal& x, const PrimeIdeal& y) { return x.norm() < y.norm(); });
  return out;
}

namespace detail {

inline int integral_valuation(FractionalIdeal J, const PrimeIdeal& P) {
  int v = 0;
  FractionalIdeal pinv = P.ideal.inverse();
  while (P.ideal.contains(J)) {
    J = J * pinv;
    ++v;
  }
  return v;
}

}  // namespace detail

inline int valuation(const FractionalIdeal& I, const PrimeIdeal& P) {
  FractionalIdeal num = I * I.field().from_integer(I.den());
  return detail::integral_valuation(num, P) -
         detail::integral_valuation(FractionalIdeal::from_integer(I.field(), I.den()), P);
}

inline int valuation(const FieldElement& x, const PrimeIdeal& P) {
  if (x.is_zero()) fail(ErrorCode::ZeroArgument, "valuation of zero");
  return valuation(FractionalIdeal::principal(x), P);
}

// The different ideal: (1) for Q, (f'(w)) = (2w - t) for quadratic fields.
inline FractionalIdeal different_ideal(const Field& f) {
  if (f.degree() == 1) return FractionalIdeal::unit(f);
  return FractionalIdeal::principal(f.element(-f.omega_trace(), 2));
}

inline FractionalIdeal inverse_different(const Field& f) { return different_ideal(f).inverse(); }

}  // namespace qfhecke
