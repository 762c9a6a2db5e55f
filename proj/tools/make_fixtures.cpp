// Regenerates the recorded newform responses under data/fixtures/lmfdb from
// eta-quotient and Eisenstein q-expansions.
//
//   make_fixtures [output-dir]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "oracles/qexpansion.hpp"
#include "qfhecke/datasource.hpp"

using namespace qfhecke;
using oracle::Series;

namespace {

constexpr std::size_t kPrec = 101;

struct EtaForm {
  std::string label;
  int level;
  int weight;
  std::vector<std::pair<int, int>> eta;
};

const std::vector<EtaForm> kForms = {
    {"1.12.a.a", 1, 12, {{1, 24}}},
    {"11.2.a.a", 11, 2, {{1, 2}, {11, 2}}},
    {"14.2.a.a", 14, 2, {{1, 1}, {2, 1}, {7, 1}, {14, 1}}},
    {"15.2.a.a", 15, 2, {{1, 1}, {3, 1}, {5, 1}, {15, 1}}},
    {"20.2.a.a", 20, 2, {{2, 2}, {10, 2}}},
    {"24.2.a.a", 24, 2, {{2, 1}, {4, 1}, {6, 1}, {12, 1}}},
    {"27.2.a.a", 27, 2, {{3, 2}, {9, 2}}},
    {"32.2.a.a", 32, 2, {{4, 2}, {8, 2}}},
    {"36.2.a.a", 36, 2, {{6, 4}}},
    {"8.4.a.a", 8, 4, {{2, 4}, {4, 4}}},
    {"9.4.a.a", 9, 4, {{3, 8}}},
    {"4.6.a.a", 4, 6, {{2, 12}}},
    {"2.8.a.a", 2, 8, {{1, 8}, {2, 8}}},
};

nlohmann::ordered_json big(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return static_cast<std::int64_t>(v);
  return v.str();
}

nlohmann::ordered_json newform_item(const std::string& label, int level, int weight, int dim, const std::vector<BigInt>& traces) {
  nlohmann::ordered_json item;
  item["label"] = label;
  item["level"] = level;
  item["weight"] = weight;
  item["dim"] = dim;
  auto tr = nlohmann::ordered_json::array();
  for (std::size_t n = 1; n < traces.size(); ++n) tr.push_back(big(traces[n]));
  item["traces"] = tr;
  return item;
}

nlohmann::ordered_json page(std::vector<nlohmann::ordered_json> items) {
  nlohmann::ordered_json p;
  p["data"] = items;
  p["next"] = nullptr;
  return p;
}

BigInt isqrt(const BigInt& n) { return boost::multiprecision::sqrt(n); }

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path out = argc > 1 ? argv[1] : "data/fixtures/lmfdb";
  std::filesystem::create_directories(out);
  DataSource ds(DataSourceConfig{}, nullptr, std::nullopt);
  nlohmann::ordered_json index = nlohmann::ordered_json::object();

  auto write = [&](const std::string& target, const std::string& file, const nlohmann::ordered_json& body) {
    std::ofstream(out / file) << body.dump() << '\n';
    index[target] = file;
  };

  for (const auto& f : kForms) {
    Series s = oracle::eta_product(f.eta, kPrec);
    if (s[1] != 1) {
      std::cerr << f.label << ": leading coefficient is not 1\n";
      return 1;
    }
    auto body = page({newform_item(f.label, f.level, f.weight, 1, s)});
    write(ds.label_target(f.label), "newform_" + f.label + ".json", body);
    if (f.label == "1.12.a.a") write(ds.range_target(1, 12, 1), "range_1_12_1.json", body);
  }

  // Level 1, weight 24: S_24 is spanned by g1 = Delta E4^3 and g2 = Delta^2.
  // The eigenforms are g1 + mu g2 with mu a root of
  //   mu^2 + (2 g1_2 - g2_4) mu + g1_2^2 - 2^23 - g1_4 = 0,
  // obtained from a_4 = a_2^2 - 2^23.
  Series d = oracle::delta(kPrec), e4 = oracle::eisenstein_e4(kPrec);
  Series g1 = oracle::mul(oracle::mul(oracle::mul(d, e4, kPrec), e4, kPrec), e4, kPrec);
  Series g2 = oracle::mul(d, d, kPrec);
  BigInt B = 2 * g1[2] - g2[4];
  BigInt C = g1[2] * g1[2] - (BigInt(1) << 23) - g1[4];
  BigInt disc = B * B - 4 * C;
  const BigInt field_disc = 144169;
  BigInt s2 = disc / field_disc;
  BigInt s = isqrt(s2);
  if (disc % field_disc != 0 || s * s != s2 || (B + s) % 2 != 0) {
    std::cerr << "unexpected discriminant " << disc << "\n";
    return 1;
  }
  // sqrt(144169) = 2 beta - 1 with beta^2 - beta - 36042 = 0, so
  // mu = (-B - s)/2 + s beta.
  BigInt u = (-B - s) / 2, v = s;
  std::vector<BigInt> traces(kPrec, 0);
  auto an = nlohmann::ordered_json::array();
  for (std::size_t n = 1; n < kPrec; ++n) {
    BigInt c0 = g1[n] + u * g2[n], c1 = v * g2[n];
    traces[n] = 2 * c0 + c1;
    an.push_back({big(c0), big(c1)});
  }
  const std::string label = "1.24.a.a";
  write(ds.label_target(label), "newform_" + label + ".json", page({newform_item(label, 1, 24, 2, traces)}));
  nlohmann::ordered_json nf;
  nf["label"] = label;
  nf["an"] = an;
  nf["field_poly"] = {-36042, -1, 1};
  nf["hecke_ring_numerators"] = {{1, 0}, {0, 1}};
  nf["hecke_ring_denominators"] = {1, 1};
  write(ds.hecke_nf_target(label), "hecke_nf_" + label + ".json", page({nf}));

  std::ofstream(out / "index.json") << index.dump(1) << '\n';
  std::cout << "wrote " << index.size() << " responses to " << out << "\n";
}
