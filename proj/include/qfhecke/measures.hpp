#pragma once

// The Sato-Tate family on [-2, 2] (mu_infinity, Serre's p-adic measure mu_p,
// Phi(ord) = X_ord^2 mu_infinity), the spectral measures Pl_xi and V1_xi on the
// Casimir line, and their discrete forms in the nu-coordinate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

// pchip calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qfhecke/arith.hpp"

namespace qfhecke {

inline constexpr double kPi = std::numbers::pi;

// X_0 = 1, X_1 = x, X_{m+1} = x X_m - X_{m-1}.
inline double chebyshev_eval(int ell, double x) {
  if (ell < 0) fail(ErrorCode::InvalidArgument, "Chebyshev index must be >= 0");
  double prev = 1, cur = x;
  if (ell == 0) return 1;
  for (int m = 1; m < ell; ++m) {
    double next = x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

inline Rational chebyshev_eval(int ell, const Rational& x) {
  if (ell < 0) fail(ErrorCode::InvalidArgument, "Chebyshev index must be >= 0");
  Rational prev = 1, cur = x;
  if (ell == 0) return 1;
  for (int m = 1; m < ell; ++m) {
    Rational next = x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

struct QuadratureOptions {
  unsigned max_depth = 16;
  double tolerance = 1e-10;
};

inline double integrate(const std::function<double(double)>& f, double a, double b, const QuadratureOptions& q = {}) {
  if (!(b > a)) return 0;
  double err = 0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, q.max_depth, q.tolerance, &err);
}

enum class MeasureKind { SatoTate, PadicSatoTate, Phi, Plancherel, V1, TildePl, TildeV1 };

struct MeasureSpec {
  MeasureKind kind = MeasureKind::SatoTate;
  std::int64_t p = 0;       // PadicSatoTate
  int ord = 0;              // Phi
  int xi = 0;               // spectral parity
  bool v1_literal = false;  // V1 middle range read without the test function
  double tilde_v1_exponent = 2.5;

  static MeasureSpec sato_tate() { return {}; }
  static MeasureSpec padic(std::int64_t p) {
    if (p < 2 || !is_prime(p)) fail(ErrorCode::InvalidArgument, "p-adic Sato-Tate needs a prime p");
    MeasureSpec s;
    s.kind = MeasureKind::PadicSatoTate;
    s.p = p;
    return s;
  }
  static MeasureSpec phi(int ord) {
    if (ord < 0) fail(ErrorCode::InvalidArgument, "ord must be >= 0");
    MeasureSpec s;
    s.kind = MeasureKind::Phi;
    s.ord = ord;
    return s;
  }
  static MeasureSpec spectral(MeasureKind k, int xi) {
    if (xi != 0 && xi != 1) fail(ErrorCode::InvalidArgument, "parity xi must be 0 or 1");
    MeasureSpec s;
    s.kind = k;
    s.xi = xi;
    return s;
  }
  static MeasureSpec plancherel(int xi) { return spectral(MeasureKind::Plancherel, xi); }
  static MeasureSpec v1(int xi, bool literal = false) {
    auto s = spectral(MeasureKind::V1, xi);
    s.v1_literal = literal;
    return s;
  }
  static MeasureSpec tilde_pl(int xi) { return spectral(MeasureKind::TildePl, xi); }
  static MeasureSpec tilde_v1(int xi) { return spectral(MeasureKind::TildeV1, xi); }

  bool on_interval() const {
    return kind == MeasureKind::SatoTate || kind == MeasureKind::PadicSatoTate || kind == MeasureKind::Phi;
  }

  std::string name() const {
    switch (kind) {
      case MeasureKind::SatoTate: return "sato-tate";
      case MeasureKind::PadicSatoTate: return "padic-sato-tate(" + std::to_string(p) + ")";
      case MeasureKind::Phi: return "phi(" + std::to_string(ord) + ")";
      case MeasureKind::Plancherel: return "plancherel(" + std::to_string(xi) + ")";
      case MeasureKind::V1: return std::string("v1(") + std::to_string(xi) + (v1_literal ? ",literal)" : ")");
      case MeasureKind::TildePl: return "tilde-plancherel(" + std::to_string(xi) + ")";
      case MeasureKind::TildeV1: return "tilde-v1(" + std::to_string(xi) + ")";
    }
    return "?";
  }
};

// ---------------------------------------------------------------------------
// Measures on [-2, 2]

inline double sato_tate_density(double x) {
  if (x <= -2 || x >= 2) return 0;
  return std::sqrt(1 - x * x / 4) / kPi;
}

inline double padic_sato_tate_density(std::int64_t p, double x) {
  if (x <= -2 || x >= 2) return 0;
  double sp = std::sqrt(static_cast<double>(p));
  double s = sp + 1 / sp;
  return (static_cast<double>(p) + 1) / kPi * std::sqrt(1 - x * x / 4) / (s * s - x * x);
}

inline double density(const MeasureSpec& spec, double x) {
  switch (spec.kind) {
    case MeasureKind::SatoTate: return sato_tate_density(x);
    case MeasureKind::PadicSatoTate: return padic_sato_tate_density(spec.p, x);
    case MeasureKind::Phi: {
      double X = chebyshev_eval(spec.ord, x);
      return X * X * sato_tate_density(x);
    }
    case MeasureKind::Plancherel: {
      if (x < 0.25) return 0;
      double u = kPi * std::sqrt(x - 0.25);
      return spec.xi == 0 ? std::tanh(u) : 1 / std::tanh(u);
    }
    case MeasureKind::V1: {
      if (x >= 1.25) return 0.5;
      double lo = spec.xi == 0 ? 0.0 : 0.25;
      if (x < lo || spec.v1_literal) return 0;
      return 0.5 / std::sqrt(std::abs(x - 0.25));
    }
    default: fail(ErrorCode::NoDensity, spec.name() + " is purely atomic");
  }
}

namespace detail {

inline double theta_of(double x) { return std::acos(std::clamp(x / 2, -1.0, 1.0)); }

// integral of g(x) dx over [a, b] within [-2, 2], computed in theta = acos(x/2)
inline double integrate_on_interval(const std::function<double(double)>& g, double a, double b,
                                    const QuadratureOptions& q = {}) {
  a = std::max(a, -2.0);
  b = std::min(b, 2.0);
  if (!(b > a)) return 0;
  double t0 = theta_of(b), t1 = theta_of(a);
  return integrate([&](double t) { return g(2 * std::cos(t)) * 2 * std::sin(t); }, t0, t1, q);
}

}  // namespace detail

inline double sato_tate_cdf(double x) {
  if (x <= -2) return 0;
  if (x >= 2) return 1;
  double h = x / 2;
  return 0.5 + (std::asin(h) + h * std::sqrt(1 - h * h)) / kPi;
}

// Closed form: Phi(ord) has density (2/pi) sin^2((ord+1) theta) in theta.
inline double phi_cdf(int ord, double x) {
  if (x <= -2) return 0;
  if (x >= 2) return 1;
  double t = detail::theta_of(x);
  double n = ord + 1;
  return 1 - (t - std::sin(2 * n * t) / (2 * n)) / kPi;
}

// ---------------------------------------------------------------------------
// Spectral measures on the Casimir line

namespace detail {

struct Atom {
  double at;
  double mass;
};

inline bool in_half_open(double x, double lo, double hi) { return x >= lo && x < hi; }

// Atoms of Pl_xi / V1_xi with position in [lo, hi).
inline std::vector<Atom> spectral_atoms(const MeasureSpec& s, double lo, double hi) {
  std::vector<Atom> out;
  if (s.kind == MeasureKind::Plancherel) {
    for (int b = s.xi == 0 ? 2 : 3;; b += 2) {
      double lam = b / 2.0 * (1 - b / 2.0);
      if (lam < lo) break;
      if (in_half_open(lam, lo, hi)) out.push_back({lam, static_cast<double>(b - 1)});
    }
  } else if (s.kind == MeasureKind::V1) {
    for (double beta = s.xi == 0 ? 0.5 : 1.0;; beta += 1) {
      double lam = 0.25 - beta * beta;
      if (lam < lo) break;
      if (in_half_open(lam, lo, hi)) out.push_back({lam, beta});
    }
  } else if (s.kind == MeasureKind::TildePl) {
    // nu-coordinate: beta in 1/2 + Z (xi = 0) or Z \ {0} (xi = 1), mass |beta|
    double start = std::ceil(lo - (s.xi == 0 ? 0.5 : 0.0)) + (s.xi == 0 ? 0.5 : 0.0);
    for (double beta = start; beta < hi; beta += 1) {
      if (beta == 0) continue;
      out.push_back({beta, std::abs(beta)});
    }
  } else if (s.kind == MeasureKind::TildeV1) {
    double first = s.xi == 0 ? 0.5 : 1.0;
    double start = std::max(first, std::ceil(lo - first) + first);
    for (double beta = start; beta < hi; beta += 1) out.push_back({beta, beta});
  }
  return out;
}

}  // namespace detail

// integral of h against the measure over [lo, hi) (atoms) and [lo, hi]
// (continuous part, where the endpoint convention is immaterial).
inline double integrate_measure(const MeasureSpec& s, const std::function<double(double)>& h, double lo, double hi,
                                const QuadratureOptions& q = {}) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) fail(ErrorCode::UnboundedRegion, "region must be bounded");
  if (!(hi > lo)) return 0;
  if (s.on_interval()) {
    return detail::integrate_on_interval([&](double x) { return h(x) * density(s, x); }, lo, hi, q);
  }
  double total = 0;
  for (const auto& a : detail::spectral_atoms(s, lo, hi)) total += a.mass * h(a.at);
  if (s.kind == MeasureKind::Plancherel) {
    double a = std::max(lo, 0.25);
    if (hi > a) {
      double ua = std::sqrt(a - 0.25), ub = std::sqrt(hi - 0.25);
      auto g = [&](double u) {
        double t = s.xi == 0 ? std::tanh(kPi * u) * 2 * u : (u == 0 ? 2 / kPi : 2 * u / std::tanh(kPi * u));
        return t * h(0.25 + u * u);
      };
      total += integrate(g, ua, ub, q);
    }
  } else if (s.kind == MeasureKind::V1) {
    double a = std::max(lo, 1.25);
    if (hi > a) total += 0.5 * integrate(h, a, hi, q);
    if (s.v1_literal) {
      total += s.xi == 0 ? 1.5 : 1.0;
    } else {
      // middle range with |lambda - 1/4|^{-1/2}, u = sqrt|lambda - 1/4|
      double mlo = std::max(lo, s.xi == 0 ? 0.0 : 0.25), mhi = std::min(hi, 1.25);
      if (mhi > mlo) {
        if (mlo < 0.25) {
          double top = std::min(mhi, 0.25);
          total += integrate([&](double u) { return h(0.25 - u * u); }, std::sqrt(0.25 - top), std::sqrt(0.25 - mlo), q);
        }
        if (mhi > 0.25) {
          double bot = std::max(mlo, 0.25);
          total += integrate([&](double u) { return h(0.25 + u * u); }, std::sqrt(bot - 0.25), std::sqrt(mhi - 0.25), q);
        }
      }
    }
  }
  return total;
}

inline double mass(const MeasureSpec& s, double lo, double hi, const QuadratureOptions& q = {}) {
  if (!(hi > lo)) return 0;
  if (s.kind == MeasureKind::SatoTate) return sato_tate_cdf(std::min(hi, 2.0)) - sato_tate_cdf(std::max(lo, -2.0));
  return integrate_measure(s, [](double) { return 1.0; }, lo, hi, q);
}

enum class PlaceClass { E, QPlus, QMinus };

struct SpectralPlace {
  PlaceClass cls = PlaceClass::E;
  int xi = 0;
  std::vector<std::pair<double, double>> intervals;
};

// Product region over the archimedean places, one interval list per place.
struct SpectralBox {
  std::vector<SpectralPlace> places;

  static SpectralBox single(double lo, double hi, int xi = 0, PlaceClass c = PlaceClass::E) {
    return SpectralBox{{SpectralPlace{c, xi, {{lo, hi}}}}};
  }
};

// Product measure of a box under the family (Pl or V1) with each place's parity.
inline double mass(MeasureKind family, const SpectralBox& box, bool v1_literal = false,
                   const QuadratureOptions& q = {}) {
  if (family != MeasureKind::Plancherel && family != MeasureKind::V1)
    fail(ErrorCode::InvalidArgument, "box mass is defined for Plancherel and V1");
  double total = 1;
  for (const auto& pl : box.places) {
    MeasureSpec s = family == MeasureKind::Plancherel ? MeasureSpec::plancherel(pl.xi) : MeasureSpec::v1(pl.xi, v1_literal);
    double m = 0;
    for (auto [lo, hi] : pl.intervals) m += mass(s, lo, hi, q);
    total *= m;
  }
  return total;
}

// Mass of the singleton {((b_j - 1)/2)_j} under the tilde Plancherel measure.
inline Rational tilde_singleton(const std::vector<int>& xi, const std::vector<int>& b) {
  if (xi.size() != b.size()) fail(ErrorCode::InvalidArgument, "xi and b must have the same length");
  Rational out = 1;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b[j] < 2) fail(ErrorCode::InvalidArgument, "discrete series parameter must be >= 2");
    if (((b[j] - xi[j]) % 2 + 2) % 2 != 0)
      fail(ErrorCode::ParityMismatch, "b = " + std::to_string(b[j]) + " does not have parity " + std::to_string(xi[j]));
    out *= Rational(b[j] - 1, 2);
  }
  return out;
}

// The V1 counterpart, prod ((b_j - 1)/2)^{-A}.
inline double tilde_v1_singleton(const std::vector<int>& xi, const std::vector<int>& b, double A = 2.5) {
  if (A <= 2) fail(ErrorCode::InvalidArgument, "exponent A must exceed 2");
  tilde_singleton(xi, b);  // parity and range checks
  double out = 1;
  for (int bj : b) out *= std::pow((bj - 1) / 2.0, -A);
  return out;
}

// integral of X_ell against Phi(ord), by quadrature in theta.
inline double phi_moment(int ord, int ell, const QuadratureOptions& q = {}) {
  auto g = [&](double t) {
    double x = 2 * std::cos(t);
    double s = std::sin((ord + 1) * t);
    return chebyshev_eval(ell, x) * s * s * 2 / kPi;
  };
  return integrate(g, 0, kPi, q);
}

inline double phi_moment_expected(int ord, int ell) { return (ell % 2 == 0 && ell <= 2 * ord) ? 1.0 : 0.0; }

inline double cdf(const MeasureSpec& s, double x) {
  switch (s.kind) {
    case MeasureKind::SatoTate: return sato_tate_cdf(x);
    case MeasureKind::Phi: return phi_cdf(s.ord, x);
    case MeasureKind::PadicSatoTate: return mass(s, -2, x);
    default: fail(ErrorCode::NoDensity, s.name() + " has no CDF on [-2, 2]");
  }
}

// ---------------------------------------------------------------------------
// Sampling

// Tabulated inverse CDF: nodes uniform in theta with x = -2 cos(theta), and a
// monotone cubic through (F, theta).
class InverseCdfTable {
 public:
  explicit InverseCdfTable(const MeasureSpec& s, std::size_t nodes = 4096) {
    if (!s.on_interval()) fail(ErrorCode::NoDensity, s.name() + " cannot be sampled on [-2, 2]");
    std::vector<double> F(nodes), T(nodes);
    double acc = 0;
    for (std::size_t i = 0; i < nodes; ++i) {
      double t = kPi * static_cast<double>(i) / static_cast<double>(nodes - 1);
      T[i] = t;
      if (i == 0) {
        F[i] = 0;
        continue;
      }
      double x0 = -2 * std::cos(T[i - 1]), x1 = -2 * std::cos(t);
      if (s.kind == MeasureKind::PadicSatoTate) {
        acc += detail::integrate_on_interval([&](double x) { return density(s, x); }, x0, x1);
        F[i] = acc;
      } else {
        F[i] = cdf(s, x1);
      }
    }
    double total = F.back();
    for (auto& v : F) v /= total;
    F.back() = 1;
    // drop nodes that do not strictly increase F (flat spots at roots of the density)
    std::vector<double> f2, t2;
    for (std::size_t i = 0; i < nodes; ++i) {
      if (!f2.empty() && F[i] <= f2.back()) continue;
      f2.push_back(F[i]);
      t2.push_back(T[i]);
    }
    interp_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(f2), std::move(t2));
  }

  double operator()(double u) const {
    double t = (*interp_)(std::clamp(u, 0.0, 1.0));
    return std::clamp(-2 * std::cos(t), -2.0, 2.0);
  }

 private:
  std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> interp_;
};

// 53-bit uniform in [0, 1).
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::vector<double> sample(const MeasureSpec& s, std::size_t n, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "sample size must be >= 1");
  InverseCdfTable table(s);
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = table(uniform01(rng));
  return out;
}

}  // namespace qfhecke
