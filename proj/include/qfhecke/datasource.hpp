#pragma once

// Hecke eigenvalue ingestion from the LMFDB REST API (or recorded fixtures),
// normalization to lambda_p = a_p / p^{(k-1)/2}, and a content-addressed
// JSON-lines cache.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <openssl/evp.h>

#include <httplib.h>
#include <json.hpp>

#include "qfhecke/arith.hpp"
#include "qfhecke/equidist.hpp"

namespace qfhecke {

using json = nlohmann::json;

struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpClient {
 public:
  virtual ~HttpClient() = default;
  // target is path plus query string, relative to the configured base URL
  virtual HttpResponse get(const std::string& target) = 0;
};

// Endpoint paths and field names of the upstream schema.
struct DataSourceConfig {
  std::string base_url = "https://www.lmfdb.org";
  std::string newforms_endpoint = "/api/mf_newforms/";
  std::string hecke_nf_endpoint = "/api/mf_hecke_nf/";
  std::string field_label = "label";
  std::string field_level = "level";
  std::string field_weight = "weight";
  std::string field_dim = "dim";
  std::string field_traces = "traces";
  std::string field_an = "an";
  std::string field_poly = "field_poly";
  std::string field_numerators = "hecke_ring_numerators";
  std::string field_denominators = "hecke_ring_denominators";
  std::string data_key = "data";
  std::string next_key = "next";
  double requests_per_second = 1.0;
  int max_retries = 3;
  double backoff_seconds = 1.0;
  int max_pages = 50;
};

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    fail(ErrorCode::InvalidArgument, "SHA-256 failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// Live client: one connection per base URL, rate limited, retrying transient
// failures with exponential backoff.
class NetworkHttpClient : public HttpClient {
 public:
  explicit NetworkHttpClient(DataSourceConfig cfg) : cfg_(std::move(cfg)), cli_(cfg_.base_url) {
    cli_.set_follow_location(true);
    cli_.set_connection_timeout(10);
    cli_.set_read_timeout(30);
  }

  HttpResponse get(const std::string& target) override {
    std::string last;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(std::chrono::duration<double>(cfg_.backoff_seconds * std::pow(2.0, attempt - 1)));
      throttle();
      auto res = cli_.Get(target);
      if (!res) {
        last = httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last = "HTTP " + std::to_string(res->status);
        continue;
      }
      return {res->status, res->body};
    }
    fail(ErrorCode::NetworkError, "GET " + target + " failed: " + last);
  }

 private:
  void throttle() {
    auto gap = std::chrono::duration<double>(1.0 / cfg_.requests_per_second);
    auto now = std::chrono::steady_clock::now();
    if (last_ && now - *last_ < gap) std::this_thread::sleep_for(gap - (now - *last_));
    last_ = std::chrono::steady_clock::now();
  }

  DataSourceConfig cfg_;
  httplib::Client cli_;
  std::optional<std::chrono::steady_clock::time_point> last_;
};

// Replays recorded responses: index.json maps request targets to files.
class FixtureHttpClient : public HttpClient {
 public:
  explicit FixtureHttpClient(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::ifstream in(dir_ / "index.json");
    if (!in) fail(ErrorCode::NetworkError, "fixture index missing in " + dir_.string());
    json idx;
    try {
      in >> idx;
    } catch (const json::exception& e) {
      fail(ErrorCode::SchemaError, std::string("fixture index: ") + e.what());
    }
    for (auto& [k, v] : idx.items()) index_[k] = v.get<std::string>();
  }

  HttpResponse get(const std::string& target) override {
    auto it = index_.find(target);
    if (it == index_.end()) fail(ErrorCode::NetworkError, "no recorded response for " + target);
    std::ifstream in(dir_ / it->second);
    if (!in) fail(ErrorCode::NetworkError, "fixture file missing: " + it->second);
    std::stringstream ss;
    ss << in.rdbuf();
    return {200, ss.str()};
  }

  std::vector<std::string> targets() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : index_) out.push_back(k);
    return out;
  }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> index_;
};

struct EigenvalueRecord {
  std::string label;
  std::string field = "Q";
  int weight = 2;
  std::int64_t level = 1;
  int embedding = 0;  // which real embedding of the coefficient field
  int hecke_degree = 1;
  std::map<std::int64_t, std::string> raw;  // p -> exact a_p
  std::map<std::int64_t, double> lambda;    // p -> a_p / p^{(k-1)/2}
  double w = 1;
  std::optional<double> nu;
  std::optional<int> q;

  bool operator==(const EigenvalueRecord&) const = default;
};

inline double normalize_eigenvalue(double a_p, std::int64_t p, int k) {
  double lam = a_p / std::pow(static_cast<double>(p), (k - 1) / 2.0);
  if (std::abs(lam) > 2 + 1e-6)
    fail(ErrorCode::RamanujanViolation, "a_" + std::to_string(p) + " = " + std::to_string(a_p) + " gives |lambda| = " +
                                            std::to_string(std::abs(lam)));
  return lam;
}

inline double normalize(const EigenvalueRecord& r, std::int64_t p) {
  auto it = r.lambda.find(p);
  if (it == r.lambda.end()) fail(ErrorCode::MissingEigenvalue, r.label + " has no eigenvalue at p = " + std::to_string(p));
  return it->second;
}

inline json to_json(const EigenvalueRecord& r) {
  json j;
  j["label"] = r.label;
  j["field"] = r.field;
  j["weight"] = r.weight;
  j["level"] = r.level;
  j["embedding"] = r.embedding;
  j["hecke_degree"] = r.hecke_degree;
  json raw = json::object(), lam = json::object();
  for (const auto& [p, v] : r.raw) raw[std::to_string(p)] = v;
  for (const auto& [p, v] : r.lambda) lam[std::to_string(p)] = v;
  j["a_p"] = raw;
  j["lambda_p"] = lam;
  j["w"] = r.w;
  if (r.nu) j["nu"] = *r.nu;
  if (r.q) j["q"] = *r.q;
  return j;
}

inline EigenvalueRecord record_from_json(const json& j) {
  try {
    EigenvalueRecord r;
    r.label = j.at("label").get<std::string>();
    r.field = j.at("field").get<std::string>();
    r.weight = j.at("weight").get<int>();
    r.level = j.at("level").get<std::int64_t>();
    r.embedding = j.at("embedding").get<int>();
    r.hecke_degree = j.at("hecke_degree").get<int>();
    for (auto& [k, v] : j.at("a_p").items()) r.raw[std::stoll(k)] = v.get<std::string>();
    for (auto& [k, v] : j.at("lambda_p").items()) r.lambda[std::stoll(k)] = v.get<double>();
    r.w = j.at("w").get<double>();
    if (j.contains("nu")) r.nu = j["nu"].get<double>();
    if (j.contains("q")) r.q = j["q"].get<int>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaError, std::string("cached record: ") + e.what());
  }
}

struct RecordQuery {
  std::vector<std::string> labels;                   // fetched one by one when nonempty
  std::int64_t level_min = 1, level_max = 1;
  int weight_min = 2, weight_max = 2;
  std::vector<int> dims{1};                         // coefficient field degrees
  std::int64_t max_prime = 97;

  // Canonical text form; the cache key is its SHA-256.
  std::string canonical() const {
    std::ostringstream os;
    os << "labels=";
    auto ls = labels;
    std::sort(ls.begin(), ls.end());
    for (const auto& l : ls) os << l << ',';
    os << ";level=" << level_min << '-' << level_max << ";weight=" << weight_min << '-' << weight_max << ";dims=";
    auto ds = dims;
    std::sort(ds.begin(), ds.end());
    for (int d : ds) os << d << ',';
    os << ";max_prime=" << max_prime;
    return os.str();
  }
};

enum class FetchMode { Network, CacheOnly, Fixture };

namespace detail {

inline const json& require_field(const json& j, const std::string& key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::SchemaError, ctx + ": missing field '" + key + "'");
  return j.at(key);
}

inline std::string url_encode(const std::string& s) {
  std::string out;
  char buf[4];
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '.' || c == '-' || c == '_' || c == '~') out += static_cast<char>(c);
    else {
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

// Real embeddings of an element sum_i c_i beta_i of a Hecke field of degree
// <= 2, where beta_i = (sum_k num[i][k] e^k) / den[i] and e is a root of poly.
// Embedding 0 sends e to the larger root.
inline std::vector<std::pair<std::string, double>> embed_coefficients(const std::vector<Rational>& c,
                                                                      const std::vector<BigInt>& poly,
                                                                      const std::vector<std::vector<BigInt>>& num,
                                                                      const std::vector<BigInt>& den,
                                                                      const std::string& ctx) {
  std::size_t deg = poly.size() - 1;
  if (deg < 1 || deg > 2) fail(ErrorCode::SchemaError, ctx + ": Hecke field degree " + std::to_string(deg) + " unsupported");
  if (c.size() != deg) fail(ErrorCode::SchemaError, ctx + ": coefficient vector of wrong length");
  // power-basis coordinates
  std::vector<Rational> pc(deg, 0);
  for (std::size_t i = 0; i < deg; ++i) {
    for (std::size_t k = 0; k < deg; ++k) pc[k] += c[i] * Rational(num[i][k], den[i]);
  }
  if (deg == 1) {
    return {{to_string(pc[0]), to_double(pc[0])}};
  }
  // poly[2] e^2 + poly[1] e + poly[0] = 0
  Rational A = poly[2], B = poly[1], C = poly[0];
  Rational disc = B * B - 4 * A * C;
  if (disc <= 0) fail(ErrorCode::SchemaError, ctx + ": Hecke field is not totally real");
  double sd = std::sqrt(to_double(disc));
  std::vector<std::pair<std::string, double>> out;
  for (int sg : {1, -1}) {
    double e = (-to_double(B) + sg * (A > 0 ? 1 : -1) * sd) / (2 * to_double(A));
    std::string exact = to_string(pc[0]) + (pc[1] >= 0 ? "+" : "") + to_string(pc[1]) + "*e";
    out.push_back({exact, to_double(pc[0]) + to_double(pc[1]) * e});
  }
  return out;
}

inline Rational json_rational(const json& v, const std::string& ctx) {
  if (v.is_number_unsigned()) return Rational(BigInt(v.get<std::uint64_t>()));
  if (v.is_number_integer()) return Rational(BigInt(v.get<std::int64_t>()));
  if (v.is_string()) return parse_rational(v.get<std::string>());
  fail(ErrorCode::SchemaError, ctx + ": expected an integer coefficient");
}

}  // namespace detail

class DataSource {
 public:
  DataSource(DataSourceConfig cfg, std::shared_ptr<HttpClient> client, std::optional<std::filesystem::path> cache_dir)
      : cfg_(std::move(cfg)), client_(std::move(client)), cache_dir_(std::move(cache_dir)) {}

  // Cache directory from QFHECKE_CACHE_DIR, when set.
  static std::optional<std::filesystem::path> env_cache_dir() {
    if (const char* d = std::getenv("QFHECKE_CACHE_DIR"); d && *d) return std::filesystem::path(d);
    return std::nullopt;
  }

  static bool env_offline() {
    const char* v = std::getenv("QFHECKE_OFFLINE");
    return v && *v && std::string(v) != "0";
  }

  std::vector<EigenvalueRecord> fetch(const RecordQuery& q, FetchMode mode) {
    std::optional<std::filesystem::path> path;
    if (cache_dir_ && mode != FetchMode::Fixture) path = *cache_dir_ / (sha256_hex(q.canonical()) + ".jsonl");
    if (path && std::filesystem::exists(*path)) return read_cache(*path);
    if (mode == FetchMode::CacheOnly) fail(ErrorCode::CacheMiss, "no cached result for " + q.canonical());
    if (!client_) fail(ErrorCode::NetworkError, "no HTTP client configured");
    auto recs = download(q);
    if (path) write_cache(*path, recs);
    return recs;
  }

  std::size_t requests_made() const { return requests_; }

  std::string label_target(const std::string& label) const {
    return cfg_.newforms_endpoint + "?" + cfg_.field_label + "=" + detail::url_encode(label) + "&_format=json&_fields=" +
           fields_param(false);
  }

  std::string range_target(std::int64_t level, int weight, int dim) const {
    return cfg_.newforms_endpoint + "?" + cfg_.field_level + "=i" + std::to_string(level) + "&" + cfg_.field_weight + "=i" +
           std::to_string(weight) + "&" + cfg_.field_dim + "=i" + std::to_string(dim) +
           "&char_order=i1&_format=json&_fields=" + fields_param(false);
  }

  std::string hecke_nf_target(const std::string& label) const {
    return cfg_.hecke_nf_endpoint + "?" + cfg_.field_label + "=" + detail::url_encode(label) + "&_format=json&_fields=" +
           fields_param(true);
  }

  static std::vector<EigenvalueRecord> read_cache(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) fail(ErrorCode::CacheMiss, "cannot read cache file " + p.string());
    std::vector<EigenvalueRecord> out;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        out.push_back(record_from_json(json::parse(line)));
      } catch (const json::parse_error& e) {
        fail(ErrorCode::SchemaError, std::string("cache line: ") + e.what());
      }
    }
    return out;
  }

  static void write_cache(const std::filesystem::path& p, const std::vector<EigenvalueRecord>& recs) {
    std::filesystem::create_directories(p.parent_path());
    auto tmp = p;
    tmp += ".tmp";
    {
      std::ofstream out(tmp);
      for (const auto& r : recs) out << to_json(r).dump() << '\n';
    }
    std::filesystem::rename(tmp, p);
  }

  // Records from one page of newform data (already parsed).
  std::vector<EigenvalueRecord> parse_newforms(const json& page, std::int64_t max_prime) {
    const json& data = detail::require_field(page, cfg_.data_key, "response");
    if (!data.is_array()) fail(ErrorCode::SchemaError, "response: '" + cfg_.data_key + "' is not an array");
    std::vector<EigenvalueRecord> out;
    for (const auto& item : data) {
      std::string label = detail::require_field(item, cfg_.field_label, "newform").get<std::string>();
      int dim = item.contains(cfg_.field_dim) ? item.at(cfg_.field_dim).get<int>() : 1;
      EigenvalueRecord base;
      base.label = label;
      base.level = detail::require_field(item, cfg_.field_level, label).get<std::int64_t>();
      base.weight = detail::require_field(item, cfg_.field_weight, label).get<int>();
      base.hecke_degree = dim;
      if (dim == 1) {
        const json& tr = detail::require_field(item, cfg_.field_traces, label);
        if (!tr.is_array()) fail(ErrorCode::SchemaError, label + ": traces is not an array");
        for (std::int64_t p : primes_up_to(max_prime)) {
          if (static_cast<std::size_t>(p) > tr.size()) break;
          const json& v = tr.at(static_cast<std::size_t>(p - 1));
          if (!v.is_number_integer()) fail(ErrorCode::SchemaError, label + ": non-integer trace at n = " + std::to_string(p));
          auto a = v.get<std::int64_t>();
          base.raw[p] = std::to_string(a);
          base.lambda[p] = normalize_eigenvalue(static_cast<double>(a), p, base.weight);
        }
        out.push_back(std::move(base));
      } else {
        for (auto& r : fetch_algebraic(base, max_prime)) out.push_back(std::move(r));
      }
    }
    return out;
  }

 private:
  json get_json(const std::string& target) {
    ++requests_;
    HttpResponse r = client_->get(target);
    if (r.status != 200) fail(ErrorCode::NetworkError, "GET " + target + " returned HTTP " + std::to_string(r.status));
    try {
      return json::parse(r.body);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::SchemaError, "response to " + target + " is not JSON: " + e.what());
    }
  }

  std::string fields_param(bool algebraic) const {
    if (algebraic) return cfg_.field_label + "," + cfg_.field_an + "," + cfg_.field_poly + "," + cfg_.field_numerators + "," + cfg_.field_denominators;
    return cfg_.field_label + "," + cfg_.field_level + "," + cfg_.field_weight + "," + cfg_.field_dim + "," + cfg_.field_traces;
  }

  std::vector<EigenvalueRecord> fetch_pages(std::string target, std::int64_t max_prime) {
    std::vector<EigenvalueRecord> out;
    for (int page = 0; page < cfg_.max_pages && !target.empty(); ++page) {
      json j = get_json(target);
      for (auto& r : parse_newforms(j, max_prime)) out.push_back(std::move(r));
      target.clear();
      if (j.contains(cfg_.next_key) && j[cfg_.next_key].is_string()) {
        std::string next = j[cfg_.next_key].get<std::string>();
        if (next.rfind(cfg_.base_url, 0) == 0) next = next.substr(cfg_.base_url.size());
        target = next;
      }
    }
    return out;
  }

  std::vector<EigenvalueRecord> download(const RecordQuery& q) {
    std::vector<EigenvalueRecord> out;
    if (!q.labels.empty()) {
      auto ls = q.labels;
      std::sort(ls.begin(), ls.end());
      for (const auto& l : ls) {
        for (auto& r : fetch_pages(label_target(l), q.max_prime)) out.push_back(std::move(r));
      }
    } else {
      for (std::int64_t N = q.level_min; N <= q.level_max; ++N) {
        for (int k = q.weight_min; k <= q.weight_max; ++k) {
          for (int d : q.dims) {
            for (auto& r : fetch_pages(range_target(N, k, d), q.max_prime)) out.push_back(std::move(r));
          }
        }
      }
    }
    std::stable_sort(out.begin(), out.end(), [](const EigenvalueRecord& a, const EigenvalueRecord& b) {
      return std::tie(a.label, a.embedding) < std::tie(b.label, b.embedding);
    });
    return out;
  }

  std::vector<EigenvalueRecord> fetch_algebraic(const EigenvalueRecord& base, std::int64_t max_prime) {
    json j = get_json(hecke_nf_target(base.label));
    const json& data = detail::require_field(j, cfg_.data_key, base.label);
    if (!data.is_array() || data.empty()) fail(ErrorCode::SchemaError, base.label + ": no Hecke field data");
    const json& item = data.at(0);
    std::vector<BigInt> poly;
    for (const auto& c : detail::require_field(item, cfg_.field_poly, base.label)) poly.push_back(detail::json_rational(c, base.label).convert_to<BigInt>());
    std::size_t deg = poly.size() - 1;
    std::vector<std::vector<BigInt>> num(deg, std::vector<BigInt>(deg, 0));
    std::vector<BigInt> den(deg, 1);
    if (item.contains(cfg_.field_numerators) && !item[cfg_.field_numerators].is_null()) {
      const json& nj = item[cfg_.field_numerators];
      for (std::size_t i = 0; i < deg; ++i) {
        for (std::size_t k = 0; k < deg; ++k) num[i][k] = detail::json_rational(nj.at(i).at(k), base.label).convert_to<BigInt>();
        den[i] = detail::json_rational(item.at(cfg_.field_denominators).at(i), base.label).convert_to<BigInt>();
      }
    } else {
      for (std::size_t i = 0; i < deg; ++i) num[i][i] = 1;
    }
    const json& an = detail::require_field(item, cfg_.field_an, base.label);
    std::vector<EigenvalueRecord> out(deg, base);
    for (std::size_t e = 0; e < deg; ++e) {
      out[e].embedding = static_cast<int>(e);
      out[e].label = base.label + "." + std::to_string(e + 1);
    }
    for (std::int64_t p : primes_up_to(max_prime)) {
      if (static_cast<std::size_t>(p) > an.size()) break;
      std::vector<Rational> c;
      for (const auto& v : an.at(static_cast<std::size_t>(p - 1))) c.push_back(detail::json_rational(v, base.label));
      auto emb = detail::embed_coefficients(c, poly, num, den, base.label);
      for (std::size_t e = 0; e < deg; ++e) {
        out[e].raw[p] = emb[e].first;
        out[e].lambda[p] = normalize_eigenvalue(emb[e].second, p, base.weight);
      }
    }
    return out;
  }

  DataSourceConfig cfg_;
  std::shared_ptr<HttpClient> client_;
  std::optional<std::filesystem::path> cache_dir_;
  std::size_t requests_ = 0;
};

enum class WeightMode { Unit, Provided };

inline Dataset to_dataset(const std::vector<EigenvalueRecord>& recs, std::int64_t p, int ord, WeightMode wm) {
  std::vector<DataPoint> pts;
  for (const auto& r : recs) pts.push_back({r.label, normalize(r, p), wm == WeightMode::Unit ? 1.0 : r.w, {}});
  std::stable_sort(pts.begin(), pts.end(), [](const DataPoint& a, const DataPoint& b) { return a.label < b.label; });
  return Dataset(std::move(pts), DatasetMeta{"Q", std::to_string(p), ord});
}

}  // namespace qfhecke
