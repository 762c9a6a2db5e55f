#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "qfhecke/error.hpp"

namespace qfhecke {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// Rational helpers

inline BigInt numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

// Floor division for a possibly negative numerator and positive divisor.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline BigInt floor(const Rational& q) { return floor_div(numerator(q), denominator(q)); }

inline BigInt mod_floor(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

// Fractional part in [0, 1).
inline Rational frac(const Rational& q) { return q - Rational(floor(q)); }

inline long double to_long_double(const Rational& q) {
  return numerator(q).convert_to<long double>() / denominator(q).convert_to<long double>();
}

inline double to_double(const Rational& q) { return static_cast<double>(to_long_double(q)); }

inline std::string to_string(const BigInt& n) { return n.str(); }

inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

inline BigInt parse_bigint(std::string_view s) {
  std::string t(s);
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  if (t.empty()) fail(ErrorCode::InvalidArgument, "empty integer literal");
  std::size_t start = (t[0] == '-' || t[0] == '+') ? 1 : 0;
  if (start == t.size()) fail(ErrorCode::InvalidArgument, "bad integer literal '" + t + "'");
  for (std::size_t i = start; i < t.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(t[i])))
      fail(ErrorCode::InvalidArgument, "bad integer literal '" + t + "'");
  }
  if (t[0] == '+') t.erase(t.begin());
  return BigInt(t);
}

// Accepts "p", "p/q" with optional sign.
inline Rational parse_rational(std::string_view s) {
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(parse_bigint(s));
  BigInt num = parse_bigint(s.substr(0, slash));
  BigInt den = parse_bigint(s.substr(slash + 1));
  if (den == 0) fail(ErrorCode::InvalidArgument, "zero denominator in '" + std::string(s) + "'");
  return Rational(num, den);
}

inline BigInt abs(const BigInt& a) { return a < 0 ? BigInt(-a) : a; }
inline Rational abs(const Rational& a) { return a < 0 ? Rational(-a) : a; }

inline BigInt gcd(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }

inline BigInt lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return abs(a / gcd(a, b) * b);
}

// Returns g = gcd(a, b) >= 0 together with s, t such that s*a + t*b = g.
struct ExtGcd {
  BigInt g, s, t;
};

inline ExtGcd ext_gcd(BigInt a, BigInt b) {
  BigInt s0 = 1, s1 = 0, t0 = 0, t1 = 1;
  while (b != 0) {
    BigInt q = a / b;
    BigInt r = a - q * b;
    a = b;
    b = r;
    BigInt ns = s0 - q * s1;
    s0 = s1;
    s1 = ns;
    BigInt nt = t0 - q * t1;
    t0 = t1;
    t1 = nt;
  }
  if (a < 0) return {-a, -s0, -t0};
  return {a, s0, t0};
}

// ---------------------------------------------------------------------------
// Machine-integer number theory

inline std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>((static_cast<__int128>(a) * b) % m);
}

inline std::int64_t powmod(std::int64_t base, std::int64_t exp, std::int64_t m) {
  std::int64_t result = 1 % m;
  base %= m;
  if (base < 0) base += m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

inline std::int64_t mod_norm(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// Inverse of a modulo m, or 0 when gcd(a, m) != 1.
inline std::int64_t invmod(std::int64_t a, std::int64_t m) {
  std::int64_t g = m, x = 0, x1 = 1, r = mod_norm(a, m);
  while (r != 0) {
    std::int64_t q = g / r;
    std::int64_t t = g - q * r;
    g = r;
    r = t;
    t = x - q * x1;
    x = x1;
    x1 = t;
  }
  if (g != 1) return 0;
  return mod_norm(x, m);
}

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  std::int64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic for 64-bit inputs.
  for (std::int64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::int64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Prime factorization by trial division; fine for the desk-scale inputs used here.
inline std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> out;
  if (n < 0) n = -n;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline bool is_squarefree(std::int64_t n) {
  if (n == 0) return false;
  for (auto [p, e] : factorize(n)) {
    if (e > 1) return false;
  }
  return true;
}

inline std::int64_t divisor_count(std::int64_t n) {
  std::int64_t d = 1;
  for (auto [p, e] : factorize(n)) d *= (e + 1);
  return d;
}

inline std::int64_t euler_phi(std::int64_t n) {
  std::int64_t phi = n;
  for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

// Kronecker symbol (a/n) for n > 0.
inline int kronecker(std::int64_t a, std::int64_t n) {
  if (n <= 0) fail(ErrorCode::InvalidArgument, "kronecker symbol needs a positive modulus");
  int result = 1;
  while (n % 2 == 0) {
    n /= 2;
    std::int64_t r = mod_norm(a, 8);
    if (r % 2 == 0) return 0;
    if (r == 3 || r == 5) result = -result;
  }
  a = mod_norm(a, n);
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      std::int64_t r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

// Square root of a modulo an odd prime p (Tonelli-Shanks); a must be a residue.
inline std::int64_t sqrt_mod_prime(std::int64_t a, std::int64_t p) {
  a = mod_norm(a, p);
  if (a == 0) return 0;
  if (p == 2) return a;
  std::int64_t q = p - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  std::int64_t z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  std::int64_t m = s, c = powmod(z, q, p), t = powmod(a, q, p), r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    std::int64_t i = 0, t2 = t;
    while (t2 != 1) {
      t2 = mulmod(t2, t2, p);
      ++i;
      if (i == m) fail(ErrorCode::InvalidArgument, "sqrt_mod_prime: argument is not a residue");
    }
    std::int64_t b = c;
    for (std::int64_t j = 0; j < m - i - 1; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

inline std::vector<std::int64_t> primes_up_to(std::int64_t n) {
  std::vector<std::int64_t> out;
  if (n < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
  for (std::int64_t i = 2; i <= n; ++i) {
    if (composite[static_cast<std::size_t>(i)]) continue;
    out.push_back(i);
    for (std::int64_t j = i * i; j <= n; j += i) composite[static_cast<std::size_t>(j)] = true;
  }
  return out;
}

}  // namespace qfhecke
