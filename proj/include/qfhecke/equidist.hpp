#pragma once

// Weighted empirical measures of Hecke eigenvalues and the statistics used to
// compare them with Phi(ord): Kolmogorov-Smirnov distance, interval
// discrepancy, Chebyshev moment z-scores and the limit-law report.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfhecke/classgroup.hpp"
#include "qfhecke/measures.hpp"

namespace qfhecke {

struct DataPoint {
  std::string label;
  double lambda = 0;
  double weight = 1;
  std::vector<double> casimir;  // empty when no spectral data is attached
};

struct DatasetMeta {
  std::string field = "Q";
  std::string prime;
  int ord = 0;
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<DataPoint> pts, DatasetMeta meta = {}) : pts_(std::move(pts)), meta_(std::move(meta)) {
    for (const auto& p : pts_) {
      if (!(std::abs(p.lambda) <= 2 + 1e-6))
        fail(ErrorCode::RamanujanViolation, "eigenvalue " + std::to_string(p.lambda) + " of " + p.label + " outside [-2, 2]");
      if (!(p.weight >= 0)) fail(ErrorCode::InvalidArgument, "negative weight for " + p.label);
    }
    if (!pts_.empty() && total_weight() <= 0) fail(ErrorCode::TotalWeightZero, "dataset weights sum to zero");
  }

  const std::vector<DataPoint>& points() const { return pts_; }
  const DatasetMeta& meta() const { return meta_; }
  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  bool has_casimir() const { return !pts_.empty() && !pts_.front().casimir.empty(); }

  double total_weight() const {
    double w = 0;
    for (const auto& p : pts_) w += p.weight;
    return w;
  }

  void require_nonempty() const {
    if (pts_.empty()) fail(ErrorCode::EmptyDataset, "dataset is empty");
  }

  // Points ordered by (lambda, label), stably.
  std::vector<DataPoint> sorted() const {
    auto v = pts_;
    std::stable_sort(v.begin(), v.end(), [](const DataPoint& a, const DataPoint& b) {
      if (a.lambda != b.lambda) return a.lambda < b.lambda;
      return a.label < b.label;
    });
    return v;
  }

 private:
  std::vector<DataPoint> pts_;
  DatasetMeta meta_;
};

namespace detail {

// Distinct sample values with the weighted empirical CDF just after each one.
inline std::vector<std::pair<double, double>> empirical_steps(const Dataset& ds) {
  ds.require_nonempty();
  auto pts = ds.sorted();
  double W = ds.total_weight(), acc = 0;
  std::vector<std::pair<double, double>> steps;
  for (const auto& p : pts) {
    acc += p.weight;
    if (!steps.empty() && steps.back().first == p.lambda) steps.back().second = acc / W;
    else steps.emplace_back(p.lambda, acc / W);
  }
  steps.back().second = 1;
  return steps;
}

}  // namespace detail

// sup |F_emp - F| over both sides of every jump of the empirical CDF.
inline double ks_distance(const Dataset& ds, const MeasureSpec& spec) {
  auto steps = detail::empirical_steps(ds);
  double d = 0, before = 0;
  for (auto [x, after] : steps) {
    double F = cdf(spec, x);
    d = std::max({d, std::abs(after - F), std::abs(before - F)});
    before = after;
  }
  return std::min(d, 1.0);
}

inline double ks_two_sample(const Dataset& a, const Dataset& b) {
  auto sa = detail::empirical_steps(a), sb = detail::empirical_steps(b);
  std::size_t i = 0, j = 0;
  double fa = 0, fb = 0, d = 0;
  while (i < sa.size() || j < sb.size()) {
    double x = std::min(i < sa.size() ? sa[i].first : INFINITY, j < sb.size() ? sb[j].first : INFINITY);
    if (i < sa.size() && sa[i].first == x) fa = sa[i++].second;
    if (j < sb.size() && sb[j].first == x) fb = sb[j++].second;
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

// D+ + D-: the largest excess plus the largest deficit of the empirical
// measure, which bounds the discrepancy over all intervals.
inline double interval_discrepancy(const Dataset& ds, const MeasureSpec& spec) {
  auto steps = detail::empirical_steps(ds);
  double dplus = 0, dminus = 0, before = 0;
  for (auto [x, after] : steps) {
    double F = cdf(spec, x);
    dplus = std::max(dplus, after - F);
    dminus = std::max(dminus, F - before);
    before = after;
  }
  return dplus + dminus;
}

struct MomentRow {
  int ell = 0;
  double moment = 0;
  double expected = 0;
  double std_error = 0;
  double z = 0;  // NaN when the standard error vanishes and the moment is off target
};

// M_ell = sum w X_ell(lambda) / sum w, with a leave-one-out jackknife error.
inline std::vector<MomentRow> moment_test(const Dataset& ds, int ord, int ell_max) {
  ds.require_nonempty();
  if (ell_max < 0 || ell_max > 40) fail(ErrorCode::InvalidArgument, "ell_max must be in [0, 40]");
  const auto& pts = ds.points();
  double W = ds.total_weight();
  std::size_t n = pts.size();
  std::vector<MomentRow> out;
  std::vector<double> xs(n);
  for (int ell = 0; ell <= ell_max; ++ell) {
    double S = 0;
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = chebyshev_eval(ell, pts[i].lambda);
      S += pts[i].weight * xs[i];
    }
    MomentRow r;
    r.ell = ell;
    r.moment = ell == 0 ? 1.0 : S / W;
    r.expected = phi_moment_expected(ord, ell);
    double var = 0;
    if (n > 1) {
      double mean = 0;
      std::size_t used = 0;
      std::vector<double> loo(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        double wi = pts[i].weight;
        if (W - wi <= 0) continue;
        loo[i] = (S - wi * xs[i]) / (W - wi);
        mean += loo[i];
        ++used;
      }
      if (used > 1) {
        mean /= static_cast<double>(used);
        for (std::size_t i = 0; i < n; ++i) {
          if (W - pts[i].weight <= 0) continue;
          var += (loo[i] - mean) * (loo[i] - mean);
        }
        var *= static_cast<double>(used - 1) / static_cast<double>(used);
      }
    }
    r.std_error = std::sqrt(var);
    double diff = r.moment - r.expected;
    if (r.std_error > 0) r.z = diff / r.std_error;
    else r.z = std::abs(diff) < 1e-12 ? 0.0 : std::nan("");
    out.push_back(r);
  }
  return out;
}

// Largest gap between consecutive sorted eigenvalues inside [lo, hi],
// including the gaps to the ends.
inline double max_gap(const Dataset& ds, double lo = -1.9, double hi = 1.9) {
  ds.require_nonempty();
  double prev = lo, gap = 0;
  for (const auto& p : ds.sorted()) {
    if (p.lambda < lo || p.lambda > hi) continue;
    gap = std::max(gap, p.lambda - prev);
    prev = p.lambda;
  }
  return std::max(gap, hi - prev);
}

namespace detail {

// Sampler for Pl_xi restricted to [lo, hi): atoms chosen by mass, the
// continuous part by a tabulated inverse CDF in u = sqrt(lambda - 1/4).
class RestrictedPlancherel {
 public:
  RestrictedPlancherel(int xi, double lo, double hi) {
    MeasureSpec s = MeasureSpec::plancherel(xi);
    atoms_ = spectral_atoms(s, lo, hi);
    double a = std::max(lo, 0.25);
    if (hi > a) {
      u0_ = std::sqrt(a - 0.25);
      u1_ = std::sqrt(hi - 0.25);
      const int nodes = 1024;
      cum_.assign(nodes, 0);
      for (int i = 1; i < nodes; ++i) {
        double ua = u0_ + (u1_ - u0_) * (i - 1) / (nodes - 1), ub = u0_ + (u1_ - u0_) * i / (nodes - 1);
        cum_[static_cast<std::size_t>(i)] = cum_[static_cast<std::size_t>(i - 1)] + integrate([&](double u) {
          return xi == 0 ? 2 * u * std::tanh(kPi * u) : (u == 0 ? 2 / kPi : 2 * u / std::tanh(kPi * u));
        }, ua, ub);
      }
      cont_ = cum_.back();
    }
    total_ = cont_;
    for (const auto& at : atoms_) total_ += at.mass;
  }

  double total() const { return total_; }

  double draw(std::mt19937_64& rng) const {
    double t = uniform01(rng) * total_;
    for (const auto& at : atoms_) {
      if (t < at.mass) return at.at;
      t -= at.mass;
    }
    // continuous part: invert the cumulative table linearly
    auto it = std::upper_bound(cum_.begin(), cum_.end(), t);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cum_.begin()), cum_.size() - 1);
    if (i == 0) i = 1;
    double c0 = cum_[i - 1], c1 = cum_[i];
    double frac = c1 > c0 ? (t - c0) / (c1 - c0) : 0;
    double n = static_cast<double>(cum_.size() - 1);
    double u = u0_ + (u1_ - u0_) * ((static_cast<double>(i) - 1 + std::clamp(frac, 0.0, 1.0)) / n);
    return 0.25 + u * u;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cum_;
  double u0_ = 0, u1_ = 0, cont_ = 0, total_ = 0;
};

}  // namespace detail

// Data following the limit law: lambda_P ~ Phi(ord), Casimir eigenvalues ~
// Plancherel restricted to the box, unit weights.
inline Dataset synthesize_dataset(const Field& f, const PrimeIdeal& P, int ord, const SpectralBox& box, std::size_t n,
                                  std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "dataset size must be >= 1");
  if (!narrow_square_witness(P))
    fail(ErrorCode::NotNarrowSquare, P.ideal.to_string() + " is not a square in the narrow class group");
  if (!box.places.empty() && static_cast<int>(box.places.size()) != f.degree())
    fail(ErrorCode::InvalidArgument, "spectral box needs one place per real embedding");
  std::vector<std::vector<detail::RestrictedPlancherel>> samplers;
  std::vector<std::vector<double>> weights;
  for (const auto& pl : box.places) {
    std::vector<detail::RestrictedPlancherel> per;
    std::vector<double> w;
    for (auto [lo, hi] : pl.intervals) {
      if (!std::isfinite(lo) || !std::isfinite(hi)) fail(ErrorCode::UnboundedRegion, "box intervals must be bounded");
      per.emplace_back(pl.xi, lo, hi);
      w.push_back(per.back().total());
    }
    double tot = 0;
    for (double x : w) tot += x;
    if (!(tot > 0)) fail(ErrorCode::ZeroMassRegion, "spectral box has zero Plancherel mass");
    samplers.push_back(std::move(per));
    weights.push_back(std::move(w));
  }
  InverseCdfTable table(MeasureSpec::phi(ord));
  std::mt19937_64 rng(seed);
  std::vector<DataPoint> pts;
  pts.reserve(n);
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    DataPoint p;
    std::snprintf(buf, sizeof buf, "syn-%08zu", i);
    p.label = buf;
    p.lambda = table(uniform01(rng));
    for (std::size_t j = 0; j < samplers.size(); ++j) {
      double tot = 0;
      for (double x : weights[j]) tot += x;
      double t = uniform01(rng) * tot;
      std::size_t k = 0;
      while (k + 1 < weights[j].size() && t >= weights[j][k]) t -= weights[j][k++];
      p.casimir.push_back(samplers[j][k].draw(rng));
    }
    pts.push_back(std::move(p));
  }
  return Dataset(std::move(pts), DatasetMeta{f.label(), P.ideal.to_string(), ord});
}

struct ReportThresholds {
  double ks = 0.02;
  double z = 3.0;
  double ratio_band = 0.05;
  int ell_max = 10;
};

struct EquidistReport {
  std::size_t n = 0;
  double total_weight = 0;
  double lo = -2, hi = 2;
  double observed = 0;
  double predicted = 0;
  double ratio = 0;
  double ks = 0;
  double discrepancy = 0;
  std::vector<MomentRow> moments;
  std::optional<double> limit_constant;
  std::optional<double> plancherel_mass;
  bool pass = false;
};

struct LimitLawContext {
  Field field = Field::rational();
  SpectralBox box;
};

inline EquidistReport equidist_report(const Dataset& ds, double lo, double hi, int ord,
                                      const std::optional<LimitLawContext>& ctx = std::nullopt,
                                      const ReportThresholds& th = {}) {
  ds.require_nonempty();
  if (lo < -2 || hi > 2 || !(hi >= lo)) fail(ErrorCode::InvalidArgument, "interval must lie in [-2, 2]");
  MeasureSpec target = MeasureSpec::phi(ord);
  EquidistReport r;
  r.n = ds.size();
  r.total_weight = ds.total_weight();
  r.lo = lo;
  r.hi = hi;
  double in = 0;
  for (const auto& p : ds.points()) {
    if (p.lambda >= lo && p.lambda <= hi) in += p.weight;
  }
  r.observed = in / r.total_weight;
  r.predicted = (lo == -2 && hi == 2) ? 1.0 : phi_cdf(ord, hi) - phi_cdf(ord, lo);
  r.ratio = r.predicted > 0 ? r.observed / r.predicted : std::nan("");
  r.ks = ks_distance(ds, target);
  r.discrepancy = interval_discrepancy(ds, target);
  r.moments = moment_test(ds, ord, th.ell_max);
  if (ctx && ds.has_casimir()) {
    const Field& f = ctx->field;
    int d = f.degree();
    auto h = class_group(f, false).h;
    double pl = mass(MeasureKind::Plancherel, ctx->box);
    r.plancherel_mass = pl;
    r.limit_constant = std::pow(2.0, d) * std::sqrt(static_cast<double>(f.discriminant())) /
                       (std::pow(kPi, d) * static_cast<double>(h)) * pl * r.predicted;
  }
  bool ok = r.ks < th.ks && std::abs(r.ratio - 1) <= th.ratio_band;
  for (const auto& m : r.moments) ok = ok && std::isfinite(m.z) && std::abs(m.z) <= th.z;
  r.pass = ok;
  return r;
}

inline nlohmann::ordered_json to_json(const EquidistReport& r) {
  auto num = [](double v) -> nlohmann::ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return v;
  };
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["total_weight"] = r.total_weight;
  j["interval"] = {r.lo, r.hi};
  j["observed"] = r.observed;
  j["predicted"] = r.predicted;
  j["ratio"] = num(r.ratio);
  j["ks"] = r.ks;
  j["discrepancy"] = r.discrepancy;
  auto& mj = j["moments"] = nlohmann::ordered_json::array();
  for (const auto& m : r.moments) {
    mj.push_back({{"ell", m.ell}, {"moment", m.moment}, {"expected", m.expected}, {"std_error", m.std_error},
                  {"z", num(m.z)}});
  }
  if (r.limit_constant) {
    j["plancherel_mass"] = *r.plancherel_mass;
    j["limit_constant"] = *r.limit_constant;
  }
  j["pass"] = r.pass;
  return j;
}

// Plot data: x, empirical_cdf, target_cdf at every distinct sample value.
inline std::string plot_data_csv(const Dataset& ds, const MeasureSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  os << "x,empirical_cdf,target_cdf\n";
  for (auto [x, F] : detail::empirical_steps(ds)) os << x << ',' << F << ',' << cdf(spec, x) << '\n';
  return os.str();
}

}  // namespace qfhecke
