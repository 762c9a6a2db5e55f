#pragma once

// JSON views of number-field objects. Rationals are strings "p/q" so that
// round trips are exact.

#include <string>
#include <vector>

#include <json.hpp>

#include "qfhecke/classgroup.hpp"
#include "qfhecke/heckealg.hpp"
#include "qfhecke/numberfield.hpp"

namespace qfhecke {

using ojson = nlohmann::ordered_json;

inline ojson to_json(const FieldElement& e) {
  ojson j;
  j["x"] = to_string(e.x());
  j["y"] = to_string(e.y());
  j["text"] = e.to_string();
  return j;
}

inline FieldElement element_from_json(const Field& f, const ojson& j) {
  try {
    return f.element(parse_rational(j.at("x").get<std::string>()), parse_rational(j.at("y").get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::SchemaError, std::string("field element: ") + e.what());
  }
}

inline ojson to_json(const FractionalIdeal& I) {
  ojson j;
  j["den"] = I.den().str();
  ojson rows = ojson::array();
  for (const auto& r : I.basis_rows()) {
    ojson row = ojson::array();
    for (const auto& v : r) row.push_back(v.str());
    rows.push_back(row);
  }
  j["basis"] = rows;
  j["norm"] = to_string(I.norm());
  j["text"] = I.to_string();
  return j;
}

inline FractionalIdeal ideal_from_json(const Field& f, const ojson& j) {
  try {
    std::vector<std::array<BigInt, 2>> rows;
    for (const auto& r : j.at("basis"))
      rows.push_back({parse_bigint(r.at(0).get<std::string>()), parse_bigint(r.at(1).get<std::string>())});
    return FractionalIdeal::from_basis(f, parse_bigint(j.at("den").get<std::string>()), rows);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::SchemaError, std::string("ideal: ") + e.what());
  }
}

inline ojson to_json(const PrimeIdeal& P) {
  ojson j;
  j["p"] = P.p;
  j["residue_degree"] = P.residue_degree;
  j["ramification"] = P.ramification;
  j["ideal"] = to_json(P.ideal);
  return j;
}

inline ojson to_json(const ClassGroupDescription& g) {
  ojson j;
  j["narrow"] = g.narrow;
  j["order"] = g.order;
  j["h"] = g.h;
  j["h_plus"] = g.h_plus;
  ojson cf = ojson::array();
  for (auto c : g.cyclic_factors) cf.push_back(c);
  j["cyclic_factors"] = cf;
  ojson reps = ojson::array();
  for (const auto& r : g.representatives) reps.push_back(r.to_string());
  j["representatives"] = reps;
  return j;
}

inline ojson to_json(const DescentData& D) {
  ojson j;
  j["prime"] = to_json(D.prime);
  j["ell"] = D.ell;
  j["b"] = to_json(D.b);
  j["eta"] = to_json(D.eta);
  ojson rows = ojson::array();
  for (std::size_t s = 0; s < D.a.size(); ++s) {
    ojson r;
    r["s"] = s;
    r["a"] = to_json(D.a[s]);
    r["a_generates"] = static_cast<bool>(D.a_is_generator[s]);
    r["b_tilde"] = to_json(D.b_tilde[s]);
    rows.push_back(r);
  }
  j["steps"] = rows;
  j["shift_choice"] = D.shift_choice;
  return j;
}

}  // namespace qfhecke
