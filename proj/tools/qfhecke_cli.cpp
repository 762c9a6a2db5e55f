// qfhecke: command-line front end for the number-field, Kloosterman, measure,
// Hecke, bound, ingestion and equidistribution modules.

#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfhecke/datasource.hpp"
#include "qfhecke/qfhecke.hpp"

using namespace qfhecke;

namespace {

constexpr const char* kVersion = "0.1.0";

enum class Format { Json, Csv, PlotData };

struct Output {
  ojson result;
  std::optional<std::string> csv;        // header row first
  std::optional<std::string> plot_data;  // header row first
};

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string join_row(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s + "\n";
}

std::pair<double, double> parse_interval(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) fail(ErrorCode::InvalidArgument, "interval must be 'lo,hi', got '" + s + "'");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidArgument, "interval must be 'lo,hi', got '" + s + "'");
  }
}

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& s) {
  auto dash = s.find('-', 1);
  try {
    if (dash == std::string::npos) {
      auto v = std::stoll(s);
      return {v, v};
    }
    return {std::stoll(s.substr(0, dash)), std::stoll(s.substr(dash + 1))};
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidArgument, "range must be 'a-b' or 'a', got '" + s + "'");
  }
}

// "x" or "x,y" for x + y w
FieldElement parse_element(const Field& f, const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) return f.from_rational(parse_rational(s));
  return f.element(parse_rational(s.substr(0, comma)), parse_rational(s.substr(comma + 1)));
}

FractionalIdeal parse_ideal(const Field& f, const std::vector<std::string>& gens) {
  if (gens.empty()) return FractionalIdeal::unit(f);
  std::vector<FieldElement> g;
  for (const auto& s : gens) g.push_back(parse_element(f, s));
  return FractionalIdeal::generated_by(f, g);
}

PrimeIdeal pick_prime(const Field& f, std::int64_t p, int index) {
  auto fac = factor_rational_prime(f, p);
  if (index < 0 || static_cast<std::size_t>(index) >= fac.primes.size())
    fail(ErrorCode::InvalidArgument, "prime index " + std::to_string(index) + " out of range: " + std::to_string(p) + " has " +
                                         std::to_string(fac.primes.size()) + " prime(s) above it");
  return fac.primes[static_cast<std::size_t>(index)];
}

MeasureSpec parse_measure(const std::string& kind, std::int64_t p, int ord, int xi, bool literal) {
  if (kind == "sato-tate") return MeasureSpec::sato_tate();
  if (kind == "padic") return MeasureSpec::padic(p);
  if (kind == "phi") return MeasureSpec::phi(ord);
  if (kind == "plancherel") return MeasureSpec::plancherel(xi);
  if (kind == "v1") return MeasureSpec::v1(xi, literal);
  if (kind == "tilde-pl") return MeasureSpec::tilde_pl(xi);
  if (kind == "tilde-v1") return MeasureSpec::tilde_v1(xi);
  fail(ErrorCode::InvalidArgument, "unknown measure '" + kind + "'");
}

PlaceClass parse_place_class(const std::string& s) {
  if (s == "E") return PlaceClass::E;
  if (s == "Q+") return PlaceClass::QPlus;
  if (s == "Q-") return PlaceClass::QMinus;
  fail(ErrorCode::InvalidArgument, "place class must be E, Q+ or Q-, got '" + s + "'");
}

std::string place_class_name(PlaceClass c) {
  switch (c) {
    case PlaceClass::E: return "E";
    case PlaceClass::QPlus: return "Q+";
    case PlaceClass::QMinus: return "Q-";
  }
  return "?";
}

ojson complex_json(const Complex& z) {
  ojson j;
  j["re"] = static_cast<double>(z.real());
  j["im"] = static_cast<double>(z.imag());
  j["abs"] = static_cast<double>(std::abs(z));
  return j;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "expected a comma-separated list of numbers, got '" + s + "'");
    }
  }
  return out;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_doubles(s)) {
    if (v != std::floor(v)) fail(ErrorCode::InvalidArgument, "expected integers, got '" + s + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// Shared flags of the bound subcommands.
struct BoundFlags {
  double tau = 0.3, eps = 0.01, rho1 = 0.9, U = 1, A1 = 2;
  std::vector<std::string> places{"Q+:1"};

  void add(CLI::App* sc) {
    sc->add_option("--tau", tau, "Bessel-transform exponent tau in (1/4, 1/2)")->capture_default_str();
    sc->add_option("--eps", eps, "Interpolation parameter epsilon > 0")->capture_default_str();
    sc->add_option("--rho1", rho1, "Q+ growth exponent rho1 in (1/2, 1)")->capture_default_str();
    sc->add_option("--U", U, "Q+ spectral cutoff U >= 1")->capture_default_str();
    sc->add_option("--A1", A1, "Q- decay exponent A1 > 0")->capture_default_str();
    sc->add_option("--place", places, "Archimedean place as CLASS:VALUE with CLASS in {E, Q+, Q-}; VALUE is ||phi_j|| for E and |q_j| otherwise (repeat per place)")
        ->capture_default_str();
  }

  BoundParams params() const {
    std::vector<BoundPlace> pl;
    for (const auto& s : places) {
      auto colon = s.find(':');
      if (colon == std::string::npos) fail(ErrorCode::InvalidArgument, "place must be CLASS:VALUE, got '" + s + "'");
      BoundPlace b;
      b.cls = parse_place_class(s.substr(0, colon));
      double v = 0;
      try {
        v = std::stod(s.substr(colon + 1));
      } catch (const std::exception&) {
        fail(ErrorCode::InvalidArgument, "place value must be a number, got '" + s + "'");
      }
      if (b.cls == PlaceClass::E) b.norm = v;
      else b.q = v;
      pl.push_back(b);
    }
    return BoundParams(tau, eps, rho1, U, A1, pl);
  }
};

ojson params_json(const BoundParams& P) {
  ojson j;
  j["tau"] = P.tau();
  j["eps"] = P.eps();
  j["rho1"] = P.rho1();
  j["U"] = P.U();
  j["A1"] = P.A1();
  j["gamma"] = P.gamma();
  j["euler_exponent"] = P.euler_exponent();
  j["convergent"] = P.convergent();
  ojson pl = ojson::array();
  for (const auto& p : P.places()) {
    ojson e;
    e["class"] = place_class_name(p.cls);
    if (p.cls == PlaceClass::E) e["norm"] = p.norm;
    else e["q"] = p.q;
    pl.push_back(e);
  }
  j["places"] = pl;
  return j;
}

struct FetchFlags {
  std::string labels, level = "1", weight = "12", dims = "1", mode, fixture_dir, cache_dir, base_url;
  std::int64_t max_prime = 97;
  bool offline = false;

  void add(CLI::App* sc) {
    sc->add_option("--labels", labels, "Comma-separated newform labels (overrides the level/weight query)");
    sc->add_option("--level", level, "Level range a-b")->capture_default_str();
    sc->add_option("--weight", weight, "Weight range a-b")->capture_default_str();
    sc->add_option("--dims", dims, "Comma-separated Hecke field degrees (1 or 2)")->capture_default_str();
    sc->add_option("--max-prime", max_prime, "Largest prime p for which a_p is ingested")->capture_default_str();
    sc->add_option("--mode", mode, "network, cache-only or fixture (default network, or fixture when offline)")
        ->check(CLI::IsMember({"network", "cache-only", "fixture"}));
    sc->add_flag("--offline", offline, "Never touch the network (also set by QFHECKE_OFFLINE=1)");
    sc->add_option("--fixture-dir", fixture_dir, "Directory of recorded responses with an index.json");
    sc->add_option("--cache-dir", cache_dir, "Cache directory (default QFHECKE_CACHE_DIR, else ~/.cache/qfhecke)");
    sc->add_option("--base-url", base_url, "API base URL");
  }

  std::vector<EigenvalueRecord> run() const {
    RecordQuery q;
    if (!labels.empty()) {
      std::stringstream ss(labels);
      std::string l;
      while (std::getline(ss, l, ',')) {
        if (!l.empty()) q.labels.push_back(l);
      }
    }
    std::tie(q.level_min, q.level_max) = parse_range(level);
    auto [w0, w1] = parse_range(weight);
    q.weight_min = static_cast<int>(w0);
    q.weight_max = static_cast<int>(w1);
    q.dims = parse_ints(dims);
    q.max_prime = max_prime;

    bool off = offline || DataSource::env_offline();
    FetchMode m = off ? FetchMode::Fixture : FetchMode::Network;
    if (mode == "network") m = FetchMode::Network;
    if (mode == "cache-only") m = FetchMode::CacheOnly;
    if (mode == "fixture") m = FetchMode::Fixture;
    if (m == FetchMode::Network && off) fail(ErrorCode::NetworkError, "network mode requested while offline");

    DataSourceConfig cfg;
    if (!base_url.empty()) cfg.base_url = base_url;
    std::optional<std::filesystem::path> cache;
    if (!cache_dir.empty()) cache = cache_dir;
    else if (auto e = DataSource::env_cache_dir()) cache = e;
    else if (const char* home = std::getenv("HOME")) cache = std::filesystem::path(home) / ".cache" / "qfhecke";

    std::shared_ptr<HttpClient> client;
    if (m == FetchMode::Fixture) {
      std::string dir = fixture_dir.empty() ? QFHECKE_DEFAULT_FIXTURE_DIR : fixture_dir;
      client = std::make_shared<FixtureHttpClient>(dir);
    } else if (m == FetchMode::Network) {
      client = std::make_shared<NetworkHttpClient>(cfg);
    }
    DataSource ds(cfg, client, cache);
    return ds.fetch(q, m);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qfhecke: arithmetic of real quadratic fields, twisted Kloosterman sums, Sato-Tate type measures,\n"
               "Hecke operators and equidistribution tests for normalized Hecke eigenvalues."};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "Configuration file of key=value lines (subcommand options as subcommand.key=value); flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "json";
  std::uint64_t seed = 0;
  app.add_option("--format", format, "Output format: json (canonical), csv or plot-data")
      ->check(CLI::IsMember({"json", "csv", "plot-data"}))
      ->capture_default_str();
  app.add_option("--seed", seed, "Seed for every random choice")->capture_default_str();

  std::function<Output()> action;
  std::string command;

  // field
  auto* field_cmd = app.add_subcommand(
      "field",
      "Real quadratic field Q(sqrt D) with ring of integers Z[w], w^2 = t w + m: discriminant, fundamental unit from the\n"
      "continued fraction of w, wide and narrow class groups, the different, and splitting of rational primes.\n"
      "D = Q (or 1) selects the rational field.\n"
      "CSV columns: p,splitting,ideals");
  std::string field_d;
  std::int64_t field_primes = 30;
  field_cmd->add_option("--d", field_d, "Squarefree D > 1, or Q")->required();
  field_cmd->add_option("--primes", field_primes, "List splitting of rational primes up to this bound")->capture_default_str();
  field_cmd->callback([&] {
    command = "field";
    action = [&]() -> Output {
      Field f = Field::parse(field_d);
      Output o;
      ojson& r = o.result;
      r["field"] = f.description();
      r["degree"] = f.degree();
      r["discriminant"] = f.discriminant();
      if (f.degree() == 2) {
        r["omega"] = {{"trace", f.omega_trace()}, {"constant", f.omega_constant()}};
        r["fundamental_unit"] = to_json(f.fundamental_unit());
        r["fundamental_unit_norm"] = f.fundamental_unit_norm();
      }
      auto wide = class_group(f, false), narrow = class_group(f, true);
      r["class_group"] = to_json(wide);
      r["narrow_class_group"] = to_json(narrow);
      if (f.degree() == 2) {
        auto cen = reduced_form_census(f.discriminant());
        r["form_census"] = {{"h", cen.h}, {"h_plus", cen.h_plus}};
      }
      r["different"] = to_json(different_ideal(f));
      ojson primes = ojson::array();
      std::string csv = join_row({"p", "splitting", "ideals"});
      for (std::int64_t p : primes_up_to(field_primes)) {
        auto fac = factor_rational_prime(f, p);
        ojson e;
        e["p"] = p;
        e["splitting"] = splitting_name(fac.type);
        ojson ids = ojson::array();
        std::string idtext;
        for (const auto& P : fac.primes) {
          ids.push_back(to_json(P));
          idtext += (idtext.empty() ? "" : " ") + P.ideal.to_string();
        }
        e["primes"] = ids;
        primes.push_back(e);
        csv += join_row({std::to_string(p), std::string(splitting_name(fac.type)), "\"" + idtext + "\""});
      }
      r["primes"] = primes;
      o.csv = csv;
      return o;
    };
  });

  // ideal
  auto* ideal_cmd = app.add_subcommand(
      "ideal",
      "Fractional ideals in Hermite normal form: the ideal generated by given elements, all integral ideals of a given\n"
      "norm, or the prime ideals above a rational prime, with principality and narrow principality (a totally positive\n"
      "generator) decided by bounded search. Elements are written x,y for x + y w.\n"
      "CSV columns: ideal,norm,principal,narrowly_principal,generator");
  std::string ideal_d;
  std::vector<std::string> ideal_gens;
  std::int64_t ideal_norm = 0, ideal_factor = 0;
  ideal_cmd->add_option("--d", ideal_d, "Squarefree D > 1, or Q")->required();
  auto* og = ideal_cmd->add_option("--gen", ideal_gens, "Generator x,y (repeat)");
  auto* on = ideal_cmd->add_option("--norm", ideal_norm, "List integral ideals of this norm");
  auto* of = ideal_cmd->add_option("--factor", ideal_factor, "Prime ideals above this rational prime");
  og->excludes(on)->excludes(of);
  on->excludes(of);
  ideal_cmd->callback([&] {
    command = "ideal";
    action = [&]() -> Output {
      Field f = Field::parse(ideal_d);
      std::vector<FractionalIdeal> ideals;
      Output o;
      if (!ideal_gens.empty()) {
        ideals.push_back(parse_ideal(f, ideal_gens));
      } else if (ideal_norm > 0) {
        ideals = ideals_of_norm(f, ideal_norm);
      } else if (ideal_factor > 0) {
        auto fac = factor_rational_prime(f, ideal_factor);
        o.result["splitting"] = splitting_name(fac.type);
        for (const auto& P : fac.primes) ideals.push_back(P.ideal);
      } else {
        fail(ErrorCode::InvalidArgument, "one of --gen, --norm or --factor is required");
      }
      ojson arr = ojson::array();
      std::string csv = join_row({"ideal", "norm", "principal", "narrowly_principal", "generator"});
      for (const auto& I : ideals) {
        ojson e = to_json(I);
        e["integral"] = I.is_integral();
        auto g = find_generator(I);
        auto tp = principal_totally_positive_generator(I);
        e["principal"] = g.has_value();
        e["narrowly_principal"] = tp.has_value();
        if (g) e["generator"] = to_json(*g);
        if (tp) e["totally_positive_generator"] = to_json(*tp);
        arr.push_back(e);
        csv += join_row({"\"" + I.to_string() + "\"", to_string(I.norm()), g ? "true" : "false", tp ? "true" : "false",
                         g ? "\"" + g->to_string() + "\"" : ""});
      }
      o.result["ideals"] = arr;
      o.csv = csv;
      return o;
    };
  });

  // kloosterman
  auto* kl_cmd = app.add_subcommand(
      "kloosterman",
      "Kloosterman sums. classical: S(m,n;c) = sum over x mod c, gcd(x,c)=1, of e((m x + n x^-1)/c).\n"
      "twisted: KS(r, r'; c) = sum over units of a^-1 C^-1 / c a of chi(u) e(Tr(r u + r' u^-1 ...)), the residue module\n"
      "being a C^-1 modulo c a with c in C^-1; compared with the Weil bound\n"
      "N(gcd(r a d, r' C^2 a^-1 d, c C))^1/2 N(c C)^(1/2+eps).\n"
      "sweep: |KS| against that bound for every principal c of norm up to a cutoff.");
  kl_cmd->require_subcommand(1);
  std::int64_t kl_m = 1, kl_n = 1, kl_c = 1, kl_cmax = 0;
  auto* klc = kl_cmd->add_subcommand("classical", "Classical Kloosterman sum over Z.\nCSV columns: c,re,im,weil_rhs,ratio");
  klc->add_option("--m", kl_m, "m")->capture_default_str();
  klc->add_option("--n", kl_n, "n")->capture_default_str();
  auto* klc_c = klc->add_option("--c", kl_c, "Modulus c >= 1");
  auto* klc_cmax = klc->add_option("--c-max", kl_cmax, "Tabulate c = 1..c-max instead of a single c");
  klc_c->excludes(klc_cmax);
  klc->callback([&] {
    command = "kloosterman classical";
    action = [&]() -> Output {
      Output o;
      std::string csv = join_row({"c", "re", "im", "weil_rhs", "ratio"});
      auto row = [&](std::int64_t c, const Complex& s) {
        long double rhs = classical_weil_rhs(kl_m, kl_n, c);
        ojson e;
        e["c"] = c;
        e["value"] = complex_json(s);
        e["weil_rhs"] = static_cast<double>(rhs);
        e["ratio"] = static_cast<double>(std::abs(s) / rhs);
        csv += join_row({std::to_string(c), format_double(static_cast<double>(s.real())),
                         format_double(static_cast<double>(s.imag())), format_double(static_cast<double>(rhs)),
                         format_double(static_cast<double>(std::abs(s) / rhs))});
        return e;
      };
      o.result["m"] = kl_m;
      o.result["n"] = kl_n;
      if (kl_cmax > 0) {
        auto vals = kloosterman_classical_row(kl_m, kl_n, kl_cmax);
        ojson rows = ojson::array();
        for (std::int64_t c = 1; c <= kl_cmax; ++c) rows.push_back(row(c, vals[static_cast<std::size_t>(c)]));
        o.result["rows"] = rows;
      } else {
        ojson e = row(kl_c, kloosterman_classical(kl_m, kl_n, kl_c));
        for (auto& [k, v] : e.items()) o.result[k] = v;
      }
      o.csv = csv;
      return o;
    };
  });

  std::string klt_d = "5", klt_r = "1", klt_rp = "1", klt_c = "1";
  std::vector<std::string> klt_a, klt_C;
  std::int64_t klt_legendre = 0;
  double klt_eps = 0;
  std::int64_t kls_max_norm = 100;
  auto add_twist_opts = [&](CLI::App* sc, bool with_c) {
    sc->add_option("--d", klt_d, "Squarefree D > 1, or Q")->capture_default_str();
    sc->add_option("--r", klt_r, "r as x,y")->capture_default_str();
    sc->add_option("--rp", klt_rp, "r' as x,y")->capture_default_str();
    if (with_c) sc->add_option("--c", klt_c, "c as x,y")->capture_default_str();
    sc->add_option("--a", klt_a, "Generator x,y of the ideal a (repeat; default the ring of integers)");
    sc->add_option("--C", klt_C, "Generator x,y of the level-side ideal C (repeat; default the ring of integers)");
    sc->add_option("--eps", klt_eps, "Exponent slack in the Weil bound")->capture_default_str();
  };
  auto* klt = kl_cmd->add_subcommand("twisted", "Twisted Kloosterman sum over a real quadratic field.");
  add_twist_opts(klt, true);
  klt->add_option("--legendre", klt_legendre,
                  "Over Q: twist by the Legendre symbol modulo this odd prime dividing c (0 = untwisted)")
      ->capture_default_str();
  klt->callback([&] {
    command = "kloosterman twisted";
    action = [&]() -> Output {
      Field f = Field::parse(klt_d);
      KloostermanInput in{parse_element(f, klt_r), parse_element(f, klt_rp), parse_ideal(f, klt_a), parse_element(f, klt_c),
                          parse_ideal(f, klt_C)};
      TwistCharacter chi = TwistCharacter::trivial();
      if (klt_legendre != 0) {
        if (f.degree() != 1 || !is_integer(in.c.x()))
          fail(ErrorCode::InvalidArgument, "the Legendre twist is available over Q with an integer modulus");
        chi = TwistCharacter::legendre(detail::to_i64(abs(numerator(in.c.x())), "modulus"), klt_legendre);
      }
      auto w = weil_check(in, chi, klt_eps);
      Output o;
      o.result["field"] = f.description();
      o.result["value"] = complex_json(ks_twisted(in, chi));
      o.result["modulus_norm"] = static_cast<double>(w.modulus_norm);
      o.result["gcd_norm"] = static_cast<double>(w.gcd_norm);
      o.result["weil_rhs"] = static_cast<double>(w.rhs);
      o.result["ratio"] = static_cast<double>(w.ratio);
      return o;
    };
  });
  auto* kls = kl_cmd->add_subcommand(
      "sweep", "Weil-bound table for twisted sums with a = C = O over all principal c of norm up to --max-norm.\n"
               "CSV columns: c_norm,abs_ks,weil_rhs,ratio");
  add_twist_opts(kls, false);
  kls->add_option("--max-norm", kls_max_norm, "Largest N(c C)")->capture_default_str();
  kls->callback([&] {
    command = "kloosterman sweep";
    action = [&]() -> Output {
      Field f = Field::parse(klt_d);
      FractionalIdeal a = parse_ideal(f, klt_a), C = parse_ideal(f, klt_C);
      FieldElement r = parse_element(f, klt_r), rp = parse_element(f, klt_rp);
      Output o;
      ojson rows = ojson::array();
      std::string csv = join_row({"c_norm", "abs_ks", "weil_rhs", "ratio"});
      double worst = 0;
      for (const auto& I : ideals_of_norm_up_to(f, kls_max_norm)) {
        // c ranges over generators of c C with c C integral
        FractionalIdeal cI = I / C;
        auto g = find_generator(cI);
        if (!g) continue;
        KloostermanInput in{r, rp, a, *g, C};
        auto w = weil_check(in, TwistCharacter::trivial(), klt_eps);
        Complex ks = ks_twisted(in);
        ojson e;
        e["c"] = g->to_string();
        e["c_norm"] = static_cast<double>(w.modulus_norm);
        e["abs_ks"] = static_cast<double>(w.abs_ks);
        e["im"] = static_cast<double>(ks.imag());
        e["weil_rhs"] = static_cast<double>(w.rhs);
        e["ratio"] = static_cast<double>(w.ratio);
        worst = std::max(worst, static_cast<double>(w.ratio));
        rows.push_back(e);
        csv += join_row({format_double(static_cast<double>(w.modulus_norm)), format_double(static_cast<double>(w.abs_ks)),
                         format_double(static_cast<double>(w.rhs)), format_double(static_cast<double>(w.ratio))});
      }
      o.result["field"] = f.description();
      o.result["rows"] = rows;
      o.result["max_ratio"] = worst;
      o.csv = csv;
      return o;
    };
  });

  // measure
  auto* meas_cmd = app.add_subcommand(
      "measure",
      "Measures on [-2,2] and on the spectral line.\n"
      "  sato-tate   (1/pi) sqrt(1 - x^2/4) dx\n"
      "  padic       the p-adic Sato-Tate measure (p+1) mu / ((p^1/2 + p^-1/2)^2 - x^2)\n"
      "  phi         sum_{l<=ord} X_{2l}(x) times the Sato-Tate measure\n"
      "  plancherel  Plancherel measure of parity xi: tanh/coth density on [1/4, inf) plus discrete-series atoms\n"
      "  v1          comparison measure dominating error terms\n"
      "  tilde-pl, tilde-v1  holomorphic (discrete-series) parts\n"
      "Intervals are half-open [lo, hi) for atoms.\n"
      "CSV and plot-data columns (interval measures): x,density,cdf");
  std::string meas_kind, meas_interval;
  std::int64_t meas_p = 2;
  int meas_ord = 0, meas_xi = 0, meas_moment = -1;
  bool meas_literal = false;
  std::optional<double> meas_cdf, meas_density;
  std::string meas_singleton, meas_singleton_xi;
  meas_cmd->add_option("kind", meas_kind, "sato-tate | padic | phi | plancherel | v1 | tilde-pl | tilde-v1")
      ->required()
      ->check(CLI::IsMember({"sato-tate", "padic", "phi", "plancherel", "v1", "tilde-pl", "tilde-v1"}));
  meas_cmd->add_option("--interval", meas_interval, "Region lo,hi (inf allowed); default [-2,2] for measures on [-2,2]");
  meas_cmd->add_option("--p", meas_p, "Prime for padic")->capture_default_str();
  meas_cmd->add_option("--ord", meas_ord, "Order for phi")->capture_default_str();
  meas_cmd->add_option("--xi", meas_xi, "Parity 0 or 1 for spectral measures")->capture_default_str();
  meas_cmd->add_flag("--literal", meas_literal, "Read the V1 middle range as a constant instead of h-weighted");
  meas_cmd->add_option("--cdf", meas_cdf, "Also report the distribution function at x");
  meas_cmd->add_option("--density", meas_density, "Also report the density at x");
  meas_cmd->add_option("--moment", meas_moment, "Also report the moment of X_l (phi only)");
  meas_cmd->add_option("--singleton", meas_singleton, "Weights b_j (comma list) for the holomorphic singleton mass");
  meas_cmd->add_option("--singleton-xi", meas_singleton_xi, "Parities xi_j (comma list, default all 0)");
  meas_cmd->callback([&] {
    command = "measure";
    action = [&]() -> Output {
      MeasureSpec s = parse_measure(meas_kind, meas_p, meas_ord, meas_xi, meas_literal);
      Output o;
      o.result["measure"] = s.name();
      double lo = -2, hi = 2;
      if (!meas_interval.empty()) std::tie(lo, hi) = parse_interval(meas_interval);
      else if (!s.on_interval() && meas_singleton.empty())
        fail(ErrorCode::InvalidArgument, "spectral measures need --interval");
      if (meas_singleton.empty() || !meas_interval.empty()) {
        o.result["interval"] = {lo, hi};
        o.result["mass"] = mass(s, lo, hi);
      }
      if (meas_cdf) o.result["cdf"] = cdf(s, *meas_cdf);
      if (meas_density) o.result["density"] = density(s, *meas_density);
      if (meas_moment >= 0) {
        if (s.kind != MeasureKind::Phi) fail(ErrorCode::InvalidArgument, "--moment applies to phi");
        o.result["moment"] = {{"ell", meas_moment},
                              {"value", phi_moment(meas_ord, meas_moment)},
                              {"expected", phi_moment_expected(meas_ord, meas_moment)}};
      }
      if (!meas_singleton.empty()) {
        auto b = parse_ints(meas_singleton);
        std::vector<int> xi = meas_singleton_xi.empty() ? std::vector<int>(b.size(), 0) : parse_ints(meas_singleton_xi);
        if (s.kind == MeasureKind::TildeV1) o.result["singleton"] = tilde_v1_singleton(xi, b, s.tilde_v1_exponent);
        else o.result["singleton"] = to_string(tilde_singleton(xi, b));
      }
      if (s.on_interval()) {
        std::string t = join_row({"x", "density", "cdf"});
        for (int i = 0; i <= 400; ++i) {
          double x = -2 + 4.0 * i / 400;
          t += join_row({format_double(x), format_double(density(s, x)), format_double(cdf(s, x))});
        }
        o.csv = t;
        o.plot_data = t;
      }
      return o;
    };
  });

  // sample
  auto* samp_cmd = app.add_subcommand(
      "sample", "Seeded inverse-CDF samples from a measure on [-2,2] (mt19937_64, 53-bit uniforms).\nCSV columns: x");
  std::string samp_kind = "sato-tate";
  std::size_t samp_n = 10;
  samp_cmd->add_option("kind", samp_kind, "sato-tate | padic | phi")
      ->check(CLI::IsMember({"sato-tate", "padic", "phi"}))
      ->capture_default_str();
  samp_cmd->add_option("--n", samp_n, "Number of samples")->capture_default_str();
  samp_cmd->add_option("--p", meas_p, "Prime for padic")->capture_default_str();
  samp_cmd->add_option("--ord", meas_ord, "Order for phi")->capture_default_str();
  samp_cmd->callback([&] {
    command = "sample";
    action = [&]() -> Output {
      MeasureSpec s = parse_measure(samp_kind, meas_p, meas_ord, 0, false);
      auto xs = sample(s, samp_n, seed);
      Output o;
      o.result["measure"] = s.name();
      o.result["samples"] = xs;
      std::string t = join_row({"x"});
      for (double x : xs) t += join_row({format_double(x)});
      o.csv = t;
      return o;
    };
  });

  // hecke
  auto* hecke_cmd = app.add_subcommand(
      "hecke",
      "Hecke operators at a prime P. power: lambda_{P^l} = X_l(lambda_P) with X_l(2 cos t) = sin((l+1)t)/sin t.\n"
      "cosets: upper triangular representatives (pi^{l-s}, beta; 0, pi^s), (N^{l+1}-1)/(N-1) of them.\n"
      "descent: for P a square in the narrow class group, b and totally positive eta with P b^2 = (eta), and a_s\n"
      "generating P^s b^l, with a_s^2/eta^l a totally positive unit exactly when 2s = l.\n"
      "relation: lambda_{p^l} c(r) = sum_s c(r p^{l-2s}) for p^l | r, in exact arithmetic.");
  hecke_cmd->require_subcommand(1);
  double hp_lambda = 0;
  int h_ell = 2, h_index = 0;
  std::string h_d = "5", h_lambda_q = "1";
  std::int64_t h_p = 2, h_r = 0;
  bool h_list = false;
  auto* hpow = hecke_cmd->add_subcommand("power", "Chebyshev values X_0..X_l at lambda.\nCSV columns: ell,value");
  hpow->add_option("--lambda", hp_lambda, "Normalized eigenvalue in [-2,2]")->required();
  hpow->add_option("--ell", h_ell, "Power l")->capture_default_str();
  hpow->callback([&] {
    command = "hecke power";
    action = [&]() -> Output {
      Output o;
      ojson rows = ojson::array();
      std::string t = join_row({"ell", "value"});
      for (int l = 0; l <= h_ell; ++l) {
        double v = hecke_power_eigenvalue(hp_lambda, l);
        rows.push_back({{"ell", l}, {"value", v}});
        t += join_row({std::to_string(l), format_double(v)});
      }
      o.result["lambda"] = hp_lambda;
      o.result["value"] = hecke_power_eigenvalue(hp_lambda, h_ell);
      o.result["table"] = rows;
      o.csv = t;
      return o;
    };
  });
  auto add_prime_opts = [&](CLI::App* sc) {
    sc->add_option("--d", h_d, "Squarefree D > 1, or Q")->capture_default_str();
    sc->add_option("--p", h_p, "Rational prime below P")->capture_default_str();
    sc->add_option("--index", h_index, "Which prime above p (0-based)")->capture_default_str();
    sc->add_option("--ell", h_ell, "Power l")->capture_default_str();
  };
  auto* hcos = hecke_cmd->add_subcommand("cosets", "Coset representatives of determinant P^l.\nCSV columns: s,beta_index,beta");
  add_prime_opts(hcos);
  hcos->add_flag("--list", h_list, "Include every representative in the JSON output");
  hcos->callback([&] {
    command = "hecke cosets";
    action = [&]() -> Output {
      Field f = Field::parse(h_d);
      PrimeIdeal P = pick_prime(f, h_p, h_index);
      auto reps = coset_reps(P, h_ell);
      Output o;
      o.result["prime"] = to_json(P);
      o.result["ell"] = h_ell;
      o.result["count"] = reps.size();
      o.result["closed_form"] = coset_count_closed_form(P.norm(), h_ell).str();
      o.result["inequivalent"] = coset_reps_inequivalent(P, h_ell, reps);
      std::string t = join_row({"s", "beta_index", "beta"});
      ojson arr = ojson::array();
      for (const auto& r : reps) {
        t += join_row({std::to_string(r.s), std::to_string(r.beta_index), "\"" + r.beta.to_string() + "\""});
        if (h_list) arr.push_back({{"s", r.s}, {"beta_index", r.beta_index}, {"beta", to_json(r.beta)}});
      }
      if (h_list) o.result["representatives"] = arr;
      o.csv = t;
      return o;
    };
  });
  auto* hdesc = hecke_cmd->add_subcommand("descent", "Descent package at P.");
  add_prime_opts(hdesc);
  hdesc->callback([&] {
    command = "hecke descent";
    action = [&]() -> Output {
      Field f = Field::parse(h_d);
      PrimeIdeal P = pick_prime(f, h_p, h_index);
      DescentData D = descent_data(P, h_ell);
      auto chk = verify_descent(D);
      Output o;
      o.result["descent"] = to_json(D);
      o.result["verified"] = chk.ok;
      o.result["failures"] = chk.failures;
      return o;
    };
  });
  auto* hrel = hecke_cmd->add_subcommand("relation", "Coefficient relation over Q for a synthetic multiplicative system.");
  hrel->add_option("--lambda", h_lambda_q, "Rational lambda_p, e.g. 3/2")->capture_default_str();
  hrel->add_option("--p", h_p, "Prime p")->capture_default_str();
  hrel->add_option("--ell", h_ell, "Power l")->capture_default_str();
  hrel->add_option("--r", h_r, "Index r divisible by p^l")->required();
  hrel->callback([&] {
    command = "hecke relation";
    action = [&]() -> Output {
      Output o;
      o.result["holds"] = verify_coefficient_relation(parse_rational(h_lambda_q), h_p, h_ell, h_r);
      return o;
    };
  });

  // bound
  auto* bound_cmd = app.add_subcommand(
      "bound",
      "Envelope estimates for the Kloosterman term. kloosterman: e^{t0 U |Q+|} ||phi_E|| prod_{Q+} |q|^rho prod_{Q-}\n"
      "|q|^-A with t0 = tau^2 (1+eps)/2, rho = rho1 + (1-rho1) eps, A = A1 + (1-A1) eps.\n"
      "euler: prod over prime ideals of (1 - N(P)^sigma)^-1, sigma = eps - 1/2 - 2 tau (1-eps), with an explicit tail\n"
      "bound beyond X. envelope: the per-place Bessel envelope min(a_j (4 pi |r r'|^1/2 / (|c| |gamma|^1/2))^{2 tau}, b_j).\n"
      "domination: over Q, the envelope-weighted Kloosterman tail against the assembled bound.");
  bound_cmd->require_subcommand(1);
  BoundFlags bflags;
  std::string bd = "Q", benv_r = "1", benv_rp = "1", benv_c = "1", benv_gamma = "1";
  std::int64_t bX = 100000, bdom_X = 2000, bdom_r = 1, bdom_rp = 1;
  auto* bk = bound_cmd->add_subcommand("kloosterman", "Assembled Kloosterman-term bound.");
  bflags.add(bk);
  bk->callback([&] {
    command = "bound kloosterman";
    action = [&]() -> Output {
      BoundParams P = bflags.params();
      auto k = kloosterman_term_bound(P);
      Output o;
      o.result["params"] = params_json(P);
      o.result["t0"] = k.t0;
      o.result["rho"] = k.rho;
      o.result["A"] = k.A;
      o.result["exp_factor"] = k.exp_factor;
      o.result["phi_e_norm"] = k.phi_e_norm;
      o.result["q_plus_factor"] = k.q_plus_factor;
      o.result["q_minus_factor"] = k.q_minus_factor;
      o.result["value"] = k.value;
      o.result["eisenstein_envelope"] = eisenstein_envelope(P);
      return o;
    };
  });
  auto* be = bound_cmd->add_subcommand("euler", "Truncated Euler product with tail bound.");
  bflags.add(be);
  be->add_option("--d", bd, "Squarefree D > 1, or Q")->capture_default_str();
  be->add_option("--X", bX, "Norm cutoff")->capture_default_str();
  be->callback([&] {
    command = "bound euler";
    action = [&]() -> Output {
      BoundParams P = bflags.params();
      auto e = euler_product_tail(P, Field::parse(bd), bX);
      Output o;
      o.result["params"] = params_json(P);
      o.result["X"] = bX;
      o.result["exponent"] = e.exponent;
      o.result["truncated"] = e.truncated;
      o.result["log_truncated"] = e.log_truncated;
      o.result["log_tail_bound"] = e.log_tail_bound;
      o.result["tail_bound"] = e.tail_bound;
      o.result["prime_ideals"] = e.primes_used;
      return o;
    };
  });
  auto* benv = bound_cmd->add_subcommand("envelope", "Bessel-transform envelope, one comma-separated value per place.");
  bflags.add(benv);
  benv->add_option("--r", benv_r, "r_j per place")->capture_default_str();
  benv->add_option("--rp", benv_rp, "r'_j per place")->capture_default_str();
  benv->add_option("--c", benv_c, "c_j per place")->capture_default_str();
  benv->add_option("--gamma", benv_gamma, "gamma_j per place")->capture_default_str();
  benv->callback([&] {
    command = "bound envelope";
    action = [&]() -> Output {
      BoundParams P = bflags.params();
      Output o;
      o.result["params"] = params_json(P);
      o.result["value"] =
          bessel_envelope(P, parse_doubles(benv_r), parse_doubles(benv_rp), parse_doubles(benv_c), parse_doubles(benv_gamma));
      return o;
    };
  });
  auto* bdom = bound_cmd->add_subcommand("domination", "Empirical Kloosterman tail over Q against the assembled bound.");
  bflags.add(bdom);
  bdom->add_option("--r", bdom_r, "r")->capture_default_str();
  bdom->add_option("--rp", bdom_rp, "r'")->capture_default_str();
  bdom->add_option("--X", bdom_X, "Largest modulus c")->capture_default_str();
  bdom->callback([&] {
    command = "bound domination";
    action = [&]() -> Output {
      BoundParams P = bflags.params();
      auto row = kloosterman_classical_row(bdom_r, bdom_rp, bdom_X);
      auto d = kloosterman_domination_over_q(P, bdom_r, bdom_rp, bdom_X, &row);
      Output o;
      o.result["params"] = params_json(P);
      o.result["X"] = bdom_X;
      o.result["empirical_tail"] = d.empirical_tail;
      o.result["bound"] = d.bound;
      o.result["constant"] = d.constant;
      o.result["ratio"] = d.ratio;
      o.result["dominated"] = d.dominated;
      return o;
    };
  });

  // fetch
  auto* fetch_cmd = app.add_subcommand(
      "fetch",
      "Newform Hecke eigenvalues from the LMFDB API (or recorded fixtures), normalized to lambda_p = a_p / p^{(k-1)/2}\n"
      "and checked against |lambda_p| <= 2. Results are cached as JSON lines keyed by the SHA-256 of the query.\n"
      "CSV columns: label,p,a_p,lambda_p");
  FetchFlags fflags;
  fflags.add(fetch_cmd);
  fetch_cmd->callback([&] {
    command = "fetch";
    action = [&]() -> Output {
      auto recs = fflags.run();
      Output o;
      ojson arr = ojson::array();
      std::string t = join_row({"label", "p", "a_p", "lambda_p"});
      for (const auto& r : recs) {
        arr.push_back(ojson::parse(to_json(r).dump()));
        for (const auto& [p, lam] : r.lambda) t += join_row({r.label, std::to_string(p), "\"" + r.raw.at(p) + "\"", format_double(lam)});
      }
      o.result["count"] = recs.size();
      o.result["records"] = arr;
      o.csv = t;
      return o;
    };
  });

  // test-dist
  auto* td_cmd = app.add_subcommand(
      "test-dist",
      "Equidistribution test of normalized eigenvalues lambda_P against Phi(ord) = sum_{l<=ord} X_{2l} mu: weighted KS\n"
      "distance, interval discrepancy, observed versus predicted mass of [lo,hi], and jackknife z-scores of the\n"
      "moments of X_l. --synthetic draws data from the limit law (lambda ~ Phi(ord), Casimir eigenvalues ~ Plancherel\n"
      "restricted to the spectral box); otherwise eigenvalues at p come from fetched newforms (ord 0, Sato-Tate).\n"
      "CSV columns: ell,moment,expected,std_error,z\n"
      "plot-data columns: x,empirical_cdf,target_cdf");
  bool td_synth = false;
  std::string td_d = "5", td_interval = "-2,2", td_box = "0.25,100";
  std::int64_t td_p = 11;
  int td_index = 0, td_ord = 1;
  std::size_t td_n = 10000;
  td_cmd->add_flag("--synthetic", td_synth, "Use synthetic data from the limit law");
  td_cmd->add_option("--d", td_d, "Field for synthetic data: squarefree D > 1, or Q")->capture_default_str();
  td_cmd->add_option("--p", td_p, "Rational prime below P")->capture_default_str();
  td_cmd->add_option("--index", td_index, "Which prime above p (0-based)")->capture_default_str();
  td_cmd->add_option("--ord", td_ord, "ord_P(r a d) for the synthetic target")->capture_default_str();
  td_cmd->add_option("--n", td_n, "Synthetic sample size")->capture_default_str();
  td_cmd->add_option("--interval", td_interval, "Eigenvalue interval lo,hi for the mass comparison")->capture_default_str();
  td_cmd->add_option("--box", td_box, "Spectral interval lo,hi used at every place")->capture_default_str();
  FetchFlags tflags;
  tflags.labels = "11.2.a.a,14.2.a.a,15.2.a.a,20.2.a.a,24.2.a.a,27.2.a.a,32.2.a.a,36.2.a.a";
  tflags.add(td_cmd);
  td_cmd->callback([&] {
    command = "test-dist";
    action = [&]() -> Output {
      auto [lo, hi] = parse_interval(td_interval);
      std::optional<Dataset> ds;
      std::optional<LimitLawContext> ctx;
      int ord = td_ord;
      if (td_synth) {
        Field f = Field::parse(td_d);
        PrimeIdeal P = pick_prime(f, td_p, td_index);
        auto [b0, b1] = parse_interval(td_box);
        SpectralBox box;
        for (int j = 0; j < f.degree(); ++j) box.places.push_back({PlaceClass::E, 0, {{b0, b1}}});
        ds = synthesize_dataset(f, P, ord, box, td_n, seed);
        ctx = LimitLawContext{f, box};
      } else {
        ord = 0;
        ds = to_dataset(tflags.run(), td_p, 0, WeightMode::Unit);
      }
      auto rep = equidist_report(*ds, lo, hi, ord, ctx);
      Output o;
      o.result = to_json(rep);
      o.result["synthetic"] = td_synth;
      std::string t = join_row({"ell", "moment", "expected", "std_error", "z"});
      for (const auto& m : rep.moments)
        t += join_row({std::to_string(m.ell), format_double(m.moment), format_double(m.expected), format_double(m.std_error),
                       format_double(m.z)});
      o.csv = t;
      o.plot_data = plot_data_csv(*ds, MeasureSpec::phi(ord));
      return o;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    ojson err;
    err["error"] = {{"code", code_name(e.code())}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }

  try {
    Format fmt = format == "csv" ? Format::Csv : format == "plot-data" ? Format::PlotData : Format::Json;
    Output out = action();
    std::string config_hash = sha256_hex(app.config_to_str(true, false));
    if (fmt == Format::Json) {
      ojson env;
      env["version"] = kVersion;
      env["command"] = command;
      env["seed"] = seed;
      env["config_hash"] = config_hash;
      env["result"] = out.result;
      std::cout << env.dump(2) << "\n";
    } else {
      const auto& body = fmt == Format::Csv ? out.csv : out.plot_data;
      if (!body) fail(ErrorCode::UnsupportedFormat, "'" + command + "' has no " + format + " output");
      std::cout << "# version=" << kVersion << " seed=" << seed << " config_hash=" << config_hash << "\n" << *body;
    }
  } catch (const Error& e) {
    ojson err;
    err["error"] = {{"code", code_name(e.code())}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    ojson err;
    err["error"] = {{"code", "InternalError"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
