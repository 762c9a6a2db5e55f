// Classical Kloosterman sums next to their Weil bound, then the twisted sums
// over Q(sqrt 5) for every modulus of small norm.

#include <cstdio>

#include "qfhecke/qfhecke.hpp"

using namespace qfhecke;

int main() {
  std::printf("%4s %12s %10s %7s\n", "c", "S(1,1;c)", "bound", "ratio");
  for (std::int64_t c = 1; c <= 24; ++c) {
    double s = static_cast<double>(kloosterman_classical(1, 1, c).real());
    double rhs = static_cast<double>(classical_weil_rhs(1, 1, c));
    std::printf("%4lld %12.6f %10.4f %7.4f\n", static_cast<long long>(c), s, rhs, std::abs(s) / rhs);
  }

  Field f = Field::quadratic(5);
  FractionalIdeal O = FractionalIdeal::unit(f);
  std::printf("\n%s, r = r' = 1, a = C = O\n", f.description().c_str());
  std::printf("%-14s %5s %12s %10s %7s\n", "c", "N(c)", "KS", "rhs", "ratio");
  for (const auto& I : ideals_of_norm_up_to(f, 60)) {
    auto c = find_generator(I);
    if (!c) continue;
    KloostermanInput in{f.one(), f.one(), O, *c, O};
    auto w = weil_check(in, TwistCharacter::trivial(), 0);
    std::printf("%-14s %5.0f %12.6f %10.4f %7.4f\n", c->to_string().c_str(), static_cast<double>(w.modulus_norm),
                static_cast<double>(ks_twisted(in).real()), static_cast<double>(w.rhs), static_cast<double>(w.ratio));
  }
}
