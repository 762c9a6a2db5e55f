// Arithmetic of a few real quadratic fields: units, class groups, and how
// small primes decompose.

#include <cstdio>
#include <string>

#include "qfhecke/qfhecke.hpp"

using namespace qfhecke;

int main() {
  for (std::int64_t D : {2, 3, 5, 10, 15, 79}) {
    Field f = Field::quadratic(D);
    auto wide = class_group(f, false), narrow = class_group(f, true);
    std::printf("%s  disc %lld  unit %s (norm %+d)  h = %lld  h+ = %lld\n", f.description().c_str(),
                static_cast<long long>(f.discriminant()), f.fundamental_unit().to_string().c_str(),
                static_cast<int>(f.fundamental_unit_norm()), static_cast<long long>(wide.order),
                static_cast<long long>(narrow.order));
    for (std::int64_t p : primes_up_to(13)) {
      auto fac = factor_rational_prime(f, p);
      std::string line = "  " + std::to_string(p) + " " + std::string(splitting_name(fac.type)) + ":";
      for (const auto& P : fac.primes) {
        line += " " + P.ideal.to_string();
        if (auto g = find_generator(P.ideal)) line += " = (" + g->to_string() + ")";
        line += narrow_square_witness(P) ? " [narrow square]" : "";
      }
      std::printf("%s\n", line.c_str());
    }
  }
}
