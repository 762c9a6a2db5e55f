#pragma once

// Envelope estimates for the Kloosterman term of the sum formula: the Bessel
// transform envelope, the Euler product over prime ideals with an explicit
// tail bound, the assembled Kloosterman-term bound and the Eisenstein
// envelope it absorbs.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qfhecke/classgroup.hpp"
#include "qfhecke/kloosterman.hpp"
#include "qfhecke/measures.hpp"

namespace qfhecke {

struct BoundPlace {
  PlaceClass cls = PlaceClass::E;
  double q = 1;     // K-type weight |q_j| at Q+ / Q- places
  double norm = 1;  // ||phi_j|| at E places
};

class BoundParams {
 public:
  BoundParams(double tau, double eps, double rho1, double U, double A1, std::vector<BoundPlace> places)
      : tau_(tau), eps_(eps), rho1_(rho1), U_(U), A1_(A1), places_(std::move(places)) {
    if (!(tau > 0.25 && tau < 0.5)) fail(ErrorCode::InvalidArgument, "tau must lie in (1/4, 1/2)");
    if (!(eps > 0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");
    if (!(rho1 > 0.5 && rho1 < 1)) fail(ErrorCode::InvalidArgument, "rho1 must lie in (1/2, 1)");
    if (!(U >= 1)) fail(ErrorCode::InvalidArgument, "U must be >= 1");
    if (!(A1 > 0)) fail(ErrorCode::InvalidArgument, "A1 must be positive");
    for (const auto& p : places_) {
      if (p.cls != PlaceClass::E && !(p.q > 0)) fail(ErrorCode::InvalidArgument, "|q_j| must be positive");
      if (p.cls == PlaceClass::E && !(p.norm >= 0)) fail(ErrorCode::InvalidArgument, "||phi_j|| must be >= 0");
    }
  }

  double tau() const { return tau_; }
  double eps() const { return eps_; }
  double rho1() const { return rho1_; }
  double U() const { return U_; }
  double A1() const { return A1_; }
  const std::vector<BoundPlace>& places() const { return places_; }

  double gamma() const { return 1.5 - rho1_ - tau_; }
  double rho() const { return rho1_ + (1 - rho1_) * eps_; }
  double A() const { return A1_ + (1 - A1_) * eps_; }
  double t0() const { return tau_ * tau_ * (1 + eps_) / 2; }

  // Exponent of N(P) in the Euler factor; the product converges iff it is < -1.
  double euler_exponent() const { return eps_ - 0.5 - 2 * tau_ * (1 - eps_); }
  bool convergent() const { return 2 * tau_ * (1 - eps_) + 0.5 - eps_ > 1; }

  void require_convergent() const {
    if (!convergent())
      fail(ErrorCode::DivergentExponent,
           "2 tau (1 - eps) + 1/2 - eps = " + std::to_string(2 * tau_ * (1 - eps_) + 0.5 - eps_) + " is not > 1");
  }

  int count(PlaceClass c) const {
    return static_cast<int>(std::count_if(places_.begin(), places_.end(), [&](const BoundPlace& p) { return p.cls == c; }));
  }

  double phi_e_norm() const {
    double n = 1;
    for (const auto& p : places_) {
      if (p.cls == PlaceClass::E) n *= p.norm;
    }
    return n;
  }

  // (a_j, b_j) of the per-place envelope.
  std::pair<double, double> envelope_pair(const BoundPlace& p) const {
    switch (p.cls) {
      case PlaceClass::E: return {p.norm, p.norm};
      case PlaceClass::QMinus: return {std::pow(p.q, -A1_), p.q};
      case PlaceClass::QPlus: return {std::exp(tau_ * tau_ * U_ / 2) * std::pow(p.q, rho1_), p.q};
    }
    return {0, 0};
  }

 private:
  double tau_, eps_, rho1_, U_, A1_;
  std::vector<BoundPlace> places_;
};

// prod_j min(a_j (4 pi |r_j r'_j|^{1/2} / (|c_j| |gamma_j|^{1/2}))^{2 tau}, b_j)
inline double bessel_envelope(const BoundParams& P, const std::vector<double>& r, const std::vector<double>& rp,
                              const std::vector<double>& c, const std::vector<double>& gamma) {
  std::size_t d = P.places().size();
  if (r.size() != d || rp.size() != d || c.size() != d || gamma.size() != d)
    fail(ErrorCode::InvalidArgument, "one value per place is required");
  double out = 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (c[j] == 0) fail(ErrorCode::ZeroModulus, "c_j = 0");
    if (gamma[j] == 0) fail(ErrorCode::ZeroArgument, "gamma_j = 0");
    auto [a, b] = P.envelope_pair(P.places()[j]);
    double arg = 4 * kPi * std::sqrt(std::abs(r[j] * rp[j])) / (std::abs(c[j]) * std::sqrt(std::abs(gamma[j])));
    out *= std::min(a * std::pow(arg, 2 * P.tau()), b);
  }
  return out;
}

struct EulerProduct {
  double exponent = 0;
  double log_truncated = 0;
  double truncated = 0;
  double log_tail_bound = 0;  // bound on log(full / truncated)
  double tail_bound = 0;      // bound on full / truncated - 1
  std::int64_t primes_used = 0;
};

// prod over prime ideals of norm <= X of (1 - N(P)^sigma)^{-1}. The tail uses
// pi(t) < 1.25506 t / log t, at most d prime ideals above each rational
// prime, and -log(1 - y) <= y / (1 - y).
inline EulerProduct euler_product_tail(const BoundParams& P, const Field& f, std::int64_t X) {
  P.require_convergent();
  if (X < 2) fail(ErrorCode::InvalidArgument, "cutoff must be >= 2");
  EulerProduct e;
  double s = P.euler_exponent();
  e.exponent = s;
  for (std::int64_t p : primes_up_to(X)) {
    Splitting t = splitting_type(f, p);
    auto add = [&](double N, int count) {
      e.log_truncated += -count * std::log1p(-std::pow(N, s));
      e.primes_used += count;
    };
    if (f.degree() == 1 || t == Splitting::Ramified) add(static_cast<double>(p), 1);
    else if (t == Splitting::Split) add(static_cast<double>(p), 2);
    else if (static_cast<double>(p) * static_cast<double>(p) <= static_cast<double>(X)) add(static_cast<double>(p) * p, 1);
  }
  e.truncated = std::exp(e.log_truncated);
  double x = static_cast<double>(X);
  double m = -s - 1;
  // sum_{N(P) > X} N(P)^s <= d * 1.25506 * (-s) / log X * X^{1+s} / (-s-1)
  double sum = f.degree() * 1.25506 * (-s) / std::log(x) * std::pow(x, 1 + s) / m;
  // inert primes with p <= X < p^2 are not in the truncated product either
  if (f.degree() == 2) sum += 1.25506 * (-2 * s) / std::log(std::sqrt(x)) * std::pow(std::sqrt(x), 1 + 2 * s) / (-2 * s - 1);
  e.log_tail_bound = sum / (1 - std::pow(x, s));
  e.tail_bound = std::expm1(e.log_tail_bound);
  return e;
}

struct KloostermanBound {
  double t0 = 0, rho = 0, A = 0;
  double exp_factor = 0;
  double phi_e_norm = 0;
  double q_plus_factor = 1;
  double q_minus_factor = 1;
  double value = 0;
};

// e^{t0 U |Q+|} ||phi_E||_E prod_{Q+} |q_j|^rho prod_{Q-} |q_j|^{-A}
inline KloostermanBound kloosterman_term_bound(const BoundParams& P) {
  P.require_convergent();
  KloostermanBound k;
  k.t0 = P.t0();
  k.rho = P.rho();
  k.A = P.A();
  k.exp_factor = std::exp(k.t0 * P.U() * P.count(PlaceClass::QPlus));
  k.phi_e_norm = P.phi_e_norm();
  for (const auto& p : P.places()) {
    if (p.cls == PlaceClass::QPlus) k.q_plus_factor *= std::pow(p.q, k.rho);
    if (p.cls == PlaceClass::QMinus) k.q_minus_factor *= std::pow(p.q, -k.A);
  }
  k.value = k.exp_factor * k.phi_e_norm * k.q_plus_factor * k.q_minus_factor;
  return k;
}

// ||phi_E||_E prod_{Q+} |q_j|^{2 eps}
inline double eisenstein_envelope(const BoundParams& P) {
  double v = P.phi_e_norm();
  for (const auto& p : P.places()) {
    if (p.cls == PlaceClass::QPlus) v *= std::pow(p.q, 2 * P.eps());
  }
  return v;
}

struct DominationResult {
  double empirical_tail = 0;  // sum_{c <= X} |S(r, r'; c)| envelope(c) / c
  double bound = 0;           // kloosterman_term_bound
  double constant = 0;        // explicit constant K with tail <= K * bound
  double ratio = 0;           // empirical_tail / bound
  bool dominated = false;
};

// Over Q with a = C = Z (so gamma = 1): the envelope-weighted Kloosterman
// tail against the assembled bound. The constant is
//   K = (4 pi |r r'|^{1/2})^{2 tau} sum_{c <= X} d(c) gcd(r, r', c)^{1/2} c^{-1/2 - 2 tau},
// which follows from the classical Weil bound and the decaying branch of the
// envelope, since a_j <= the corresponding factor of the assembled bound.
inline DominationResult kloosterman_domination_over_q(const BoundParams& P, std::int64_t r, std::int64_t rp,
                                                      std::int64_t X,
                                                      const std::vector<Complex>* precomputed = nullptr) {
  if (P.places().size() != 1) fail(ErrorCode::InvalidArgument, "Q has exactly one real place");
  DominationResult d;
  d.bound = kloosterman_term_bound(P).value;
  double tau = P.tau();
  double pre = std::pow(4 * kPi * std::sqrt(std::abs(static_cast<double>(r * rp))), 2 * tau);
  for (std::int64_t c = 1; c <= X; ++c) {
    Complex S = precomputed ? (*precomputed)[static_cast<std::size_t>(c)] : kloosterman_classical(r, rp, c);
    double env = bessel_envelope(P, {static_cast<double>(r)}, {static_cast<double>(rp)}, {static_cast<double>(c)}, {1.0});
    d.empirical_tail += static_cast<double>(std::abs(S)) * env / static_cast<double>(c);
    double g = static_cast<double>(std::gcd(std::gcd(std::llabs(r), std::llabs(rp)), c));
    d.constant += static_cast<double>(divisor_count(c)) * std::sqrt(g) * std::pow(static_cast<double>(c), -0.5 - 2 * tau);
  }
  d.constant *= pre;
  d.ratio = d.empirical_tail / d.bound;
  d.dominated = d.empirical_tail <= d.constant * d.bound * (1 + 1e-12);
  return d;
}

}  // namespace qfhecke
