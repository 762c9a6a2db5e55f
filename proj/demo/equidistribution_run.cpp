// Synthetic data drawn from the limit law over Q(sqrt 5) at the split prime
// above 11, scored against Phi(ord) and against the plain Sato-Tate law.

#include <cstdio>

#include "qfhecke/qfhecke.hpp"

using namespace qfhecke;

int main() {
  Field f = Field::quadratic(5);
  auto P = factor_rational_prime(f, 11).primes[0];
  SpectralBox box{{SpectralPlace{PlaceClass::E, 0, {{0.3, 4.0}}}, SpectralPlace{PlaceClass::E, 0, {{0.3, 4.0}}}}};
  LimitLawContext ctx{f, box};

  for (int ord : {0, 1, 2}) {
    auto ds = synthesize_dataset(f, P, ord, box, 50000, 1234 + ord);
    auto r = equidist_report(ds, -1, 1, ord, ctx);
    std::printf("ord %d  n %zu  KS %.4f  D %.4f  mass in [-1,1] %.4f (predicted %.4f)  limit constant %.4f  %s\n", ord, r.n, r.ks,
                r.discrepancy, r.observed, r.predicted, *r.limit_constant, r.pass ? "pass" : "fail");
    for (const auto& m : r.moments) {
      if (m.ell > 6) break;
      std::printf("    X_%d  %+.4f  expected %.0f  z %+.2f\n", m.ell, m.moment, m.expected, m.z);
    }
    if (ord > 0) std::printf("    KS against Sato-Tate: %.4f\n", ks_distance(ds, MeasureSpec::sato_tate()));
  }
}
