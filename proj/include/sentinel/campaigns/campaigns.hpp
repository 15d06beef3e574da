#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "sentinel/core/csv.hpp"
#include "sentinel/core/random.hpp"
#include "sentinel/geo/geo.hpp"

namespace sentinel::campaigns {

using geo::GeoPoint;

enum class Indicator { cervical, breast, oral };

inline const char* to_string(Indicator i) {
  switch (i) {
    case Indicator::cervical: return "cervical";
    case Indicator::breast: return "breast";
    case Indicator::oral: return "oral";
  }
  return "?";
}

inline std::optional<Indicator> parse_indicator(std::string_view s) {
  if (s == "cervical") return Indicator::cervical;
  if (s == "breast") return Indicator::breast;
  if (s == "oral") return Indicator::oral;
  return std::nullopt;
}

/// Share of women screened per district, in percent.
struct DistrictStat {
  std::string district;
  double cervical_pct = 0.0;
  double breast_pct = 0.0;
  double oral_pct = 0.0;
  GeoPoint centroid;

  double value(Indicator i) const {
    switch (i) {
      case Indicator::cervical: return cervical_pct;
      case Indicator::breast: return breast_pct;
      case Indicator::oral: return oral_pct;
    }
    return 0.0;
  }
  bool operator==(const DistrictStat&) const = default;
};

/// CSV with header district,cervical_pct,breast_pct,oral_pct,lat,lon.
inline std::vector<DistrictStat> load_district_stats(std::istream& in) {
  csv::Reader reader(in);
  geo::read_header(reader, {"district", "cervical_pct", "breast_pct", "oral_pct", "lat", "lon"});
  std::vector<DistrictStat> out;
  std::unordered_set<std::string> names;
  csv::Record rec;
  while (reader.next(rec)) {
    const auto row = reader.record_line();
    if (rec.size() == 1 && csv::trim(rec[0]).empty()) continue;
    if (rec.size() != 6) throw ParseError(row, std::min<std::size_t>(rec.size(), 6) + 1, "expected 6 fields");
    DistrictStat s;
    s.district = std::string(csv::trim(rec[0]));
    if (s.district.empty()) throw ValidationError("row " + std::to_string(row) + ": empty district name", {"district"});
    if (!names.insert(s.district).second) throw DuplicateIdError(s.district);
    const char* fields[] = {"cervical_pct", "breast_pct", "oral_pct"};
    double* dst[] = {&s.cervical_pct, &s.breast_pct, &s.oral_pct};
    for (int k = 0; k < 3; ++k) {
      auto v = parse_double(csv::trim(rec[static_cast<std::size_t>(k) + 1]));
      if (!v || *v < 0.0 || *v > 100.0)
        throw ValidationError("row " + std::to_string(row) + ": " + fields[k] + " must be a percentage", {fields[k]});
      *dst[k] = *v;
    }
    s.centroid = geo::parse_point(rec[4], rec[5], row);
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<DistrictStat> load_district_stats_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open district file '" + path + "'");
  return load_district_stats(in);
}

/// Descending by the indicator, ties by district name ascending.
inline std::vector<DistrictStat> rank_districts(std::vector<DistrictStat> stats, Indicator indicator) {
  if (stats.empty()) throw ValidationError("no district statistics to rank");
  std::sort(stats.begin(), stats.end(), [indicator](const DistrictStat& a, const DistrictStat& b) {
    const double va = a.value(indicator), vb = b.value(indicator);
    return va > vb || (va == vb && a.district < b.district);
  });
  return stats;
}

struct DistrictRanking {
  Indicator indicator = Indicator::cervical;
  double mean_cervical = 0.0;
  double mean_breast = 0.0;
  double mean_oral = 0.0;
  std::vector<DistrictStat> rows;
};

/// Ranking plus the unweighted mean of each indicator across districts.
inline DistrictRanking district_ranking(const std::vector<DistrictStat>& stats, Indicator indicator) {
  DistrictRanking r;
  r.indicator = indicator;
  r.rows = rank_districts(stats, indicator);
  for (const auto& s : stats) {
    r.mean_cervical += s.cervical_pct;
    r.mean_breast += s.breast_pct;
    r.mean_oral += s.oral_pct;
  }
  const double n = static_cast<double>(stats.size());
  r.mean_cervical /= n;
  r.mean_breast /= n;
  r.mean_oral /= n;
  return r;
}

inline std::string statewide_line(const DistrictRanking& r) {
  return "# statewide mean: cervical " + format_fixed(r.mean_cervical, 1) + "%, breast " +
         format_fixed(r.mean_breast, 1) + "%, oral " + format_fixed(r.mean_oral, 1) + "%";
}

inline void write_ranking_csv(std::ostream& os, const DistrictRanking& r) {
  os << statewide_line(r) << '\n';
  os << "rank,district," << to_string(r.indicator) << "_pct,cervical_pct,breast_pct,oral_pct,lat,lon\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& s = r.rows[i];
    csv::write_record(os, {std::to_string(i + 1), s.district, format_exact(s.value(r.indicator)),
                           format_exact(s.cervical_pct), format_exact(s.breast_pct), format_exact(s.oral_pct),
                           format_exact(s.centroid.lat()), format_exact(s.centroid.lon())});
  }
}

inline void write_ranking_text(std::ostream& os, const DistrictRanking& r) {
  os << statewide_line(r).substr(2) << "\n\n";
  std::size_t w = 8;
  for (const auto& s : r.rows) w = std::max(w, s.district.size());
  char buf[256];
  std::snprintf(buf, sizeof buf, "%4s  %-*s  %8s\n", "rank", static_cast<int>(w), "district", to_string(r.indicator));
  os << buf;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%4zu  %-*s  %7.1f%%\n", i + 1, static_cast<int>(w), r.rows[i].district.c_str(),
                  r.rows[i].value(r.indicator));
    os << buf;
  }
}

struct CasePoint {
  GeoPoint location;
  double weight = 1.0;
};

struct KMeansParams {
  std::size_t k = 3;
  std::uint64_t seed = 42;
  std::size_t max_iter = 300;
  double tol_km = 1e-6;       // stop when no centroid moves farther than this
  bool plus_plus_init = true;  // k-means++; plain random distinct points otherwise
  std::size_t restarts = 4;    // independent seedings, lowest final inertia kept
};

struct CampaignPlan {
  std::size_t k = 0;
  std::vector<GeoPoint> centroids;
  std::vector<std::size_t> assignments;  // per input case, index into centroids
  double inertia = 0.0;                  // sum of weight * squared distance, km^2
  std::size_t iterations = 0;
  std::vector<double> inertia_history;  // after every assignment step
  double reference_lat = 0.0;           // projection parallel, degrees
};

/// Local equirectangular projection in degree units: (lon * cos(ref), lat).
/// Squared distances scale to km^2 by (R * pi / 180)^2. Over a few hundred
/// kilometres the distortion against great-circle distance stays well under
/// one percent; the antimeridian is not handled.
class Projection {
 public:
  explicit Projection(double reference_lat)
      : ref_(reference_lat), c_(std::max(std::cos(geo::radians(reference_lat)), 1e-6)) {}
  double x(const GeoPoint& p) const { return p.lon() * c_; }
  double y(const GeoPoint& p) const { return p.lat(); }
  GeoPoint unproject(double x, double y) const {
    return GeoPoint(std::clamp(y, -90.0, 90.0), std::clamp(x / c_, -180.0, 180.0));
  }
  static double km2(double deg2) {
    const double s = geo::kEarthRadiusKm * std::numbers::pi / 180.0;
    return deg2 * s * s;
  }
  double reference() const { return ref_; }

 private:
  double ref_;
  double c_;
};

namespace detail {

struct XY {
  double x, y, w;
};

inline double d2(double ax, double ay, double bx, double by) { return (ax - bx) * (ax - bx) + (ay - by) * (ay - by); }

inline std::size_t nearest(const std::vector<XY>& centers, double x, double y) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = d2(centers[c].x, centers[c].y, x, y);
    if (d < bd) {
      bd = d;
      best = c;
    }
  }
  return best;
}

inline std::size_t sample_weighted(Rng& rng, const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

struct Run {
  std::vector<XY> centers;
  std::vector<std::size_t> assign;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::vector<double> history;
};

inline double assign_all(const std::vector<XY>& pts, const std::vector<XY>& centers, std::vector<std::size_t>& assign) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    assign[i] = nearest(centers, pts[i].x, pts[i].y);
    inertia += pts[i].w * d2(pts[i].x, pts[i].y, centers[assign[i]].x, centers[assign[i]].y);
  }
  return inertia;
}

inline Run lloyd(const std::vector<XY>& pts, std::size_t k, const KMeansParams& p, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = pts.size();
  Run run;
  std::vector<std::uint8_t> chosen(n, 0);
  if (p.plus_plus_init) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = pts[i].w;
    std::size_t first = sample_weighted(rng, w);
    run.centers.push_back(pts[first]);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    while (run.centers.size() < k) {
      const auto& c = run.centers.back();
      for (std::size_t i = 0; i < n; ++i) {
        best[i] = std::min(best[i], d2(pts[i].x, pts[i].y, c.x, c.y));
        w[i] = pts[i].w * best[i];
      }
      run.centers.push_back(pts[sample_weighted(rng, w)]);
    }
  } else {
    // uniform draws among points whose location is not yet a centre
    while (run.centers.size() < k) {
      std::vector<double> w(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        bool taken = false;
        for (const auto& c : run.centers) taken = taken || (c.x == pts[i].x && c.y == pts[i].y);
        w[i] = taken ? 0.0 : 1.0;
      }
      run.centers.push_back(pts[sample_weighted(rng, w)]);
    }
  }

  run.assign.assign(n, 0);
  for (std::size_t it = 0; it < p.max_iter; ++it) {
    run.inertia = assign_all(pts, run.centers, run.assign);
    run.history.push_back(run.inertia);
    ++run.iterations;
    std::vector<double> sx(k, 0.0), sy(k, 0.0), sw(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      sx[run.assign[i]] += pts[i].w * pts[i].x;
      sy[run.assign[i]] += pts[i].w * pts[i].y;
      sw[run.assign[i]] += pts[i].w;
    }
    std::vector<XY> next = run.centers;
    std::vector<std::uint8_t> used(n, 0);
    for (std::size_t c = 0; c < k; ++c) {
      if (sw[c] > 0.0) {
        next[c] = {sx[c] / sw[c], sy[c] / sw[c], 1.0};
        continue;
      }
      // empty cluster: move it onto the point farthest from its centre
      std::size_t far = 0;
      double fd = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        const auto& a = run.centers[run.assign[i]];
        const double d = d2(pts[i].x, pts[i].y, a.x, a.y);
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      used[far] = 1;
      next[c] = {pts[far].x, pts[far].y, 1.0};
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c)
      shift = std::max(shift, d2(next[c].x, next[c].y, run.centers[c].x, run.centers[c].y));
    run.centers = std::move(next);
    if (std::sqrt(Projection::km2(shift)) < p.tol_km) break;
  }
  run.inertia = assign_all(pts, run.centers, run.assign);
  run.history.push_back(run.inertia);
  return run;
}

}  // namespace detail

/// Weighted k-means (Lloyd) over case locations. Points are put into a
/// canonical (lat, lon, weight) order before seeding, so the result does not
/// depend on the input order.
inline CampaignPlan kmeans(const std::vector<CasePoint>& points, const KMeansParams& params) {
  if (params.k == 0) throw ValidationError("k must be at least 1", {"k"});
  for (const auto& p : points)
    if (!(p.weight > 0.0) || !std::isfinite(p.weight)) throw ValidationError("case weights must be positive", {"weight"});
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto &pa = points[a], &pb = points[b];
    if (pa.location.lat() != pb.location.lat()) return pa.location.lat() < pb.location.lat();
    if (pa.location.lon() != pb.location.lon()) return pa.location.lon() < pb.location.lon();
    if (pa.weight != pb.weight) return pa.weight < pb.weight;
    return a < b;
  });
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    if (i == 0 || points[order[i]].location != points[order[i - 1]].location) ++distinct;
  if (params.k > distinct)
    throw ValidationError("k = " + std::to_string(params.k) + " exceeds the " + std::to_string(distinct) +
                              " distinct case locations",
                          {"k"});

  double wsum = 0.0, lat_sum = 0.0;
  for (auto i : order) {
    wsum += points[i].weight;
    lat_sum += points[i].weight * points[i].location.lat();
  }
  const Projection proj(lat_sum / wsum);
  std::vector<detail::XY> pts;
  pts.reserve(order.size());
  for (auto i : order) pts.push_back({proj.x(points[i].location), proj.y(points[i].location), points[i].weight});

  detail::Run best;
  bool have = false;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, params.restarts); ++r) {
    auto run = detail::lloyd(pts, params.k, params, mix_seed(params.seed, r));
    if (!have || run.inertia < best.inertia) {
      best = std::move(run);
      have = true;
    }
  }

  CampaignPlan plan;
  plan.k = params.k;
  plan.reference_lat = proj.reference();
  for (const auto& c : best.centers) plan.centroids.push_back(proj.unproject(c.x, c.y));
  plan.assignments.assign(points.size(), 0);
  for (std::size_t s = 0; s < order.size(); ++s) plan.assignments[order[s]] = best.assign[s];
  plan.inertia = Projection::km2(best.inertia);
  plan.iterations = best.iterations;
  for (double h : best.history) plan.inertia_history.push_back(Projection::km2(h));
  return plan;
}

struct LabeledPlan {
  CampaignPlan plan;
  std::vector<std::string> centroid_districts;  // nearest district centroid per plan centroid
};

inline LabeledPlan plan_campaigns(const std::vector<DistrictStat>& stats, const std::vector<CasePoint>& cases,
                                  const KMeansParams& params) {
  if (stats.empty()) throw ValidationError("district statistics are required to label campaign sites");
  LabeledPlan out{kmeans(cases, params), {}};
  for (const auto& c : out.plan.centroids) {
    const DistrictStat* best = nullptr;
    double bd = std::numeric_limits<double>::infinity();
    for (const auto& s : stats) {
      const double d = geo::haversine_km(c, s.centroid);
      if (d < bd || (d == bd && best && s.district < best->district)) {
        bd = d;
        best = &s;
      }
    }
    out.centroid_districts.push_back(best->district);
  }
  return out;
}

/// CSV with header lat,lon[,weight]; weight defaults to 1.
inline std::vector<CasePoint> load_cases(std::istream& in) {
  csv::Reader reader(in);
  csv::Record header;
  if (!reader.next(header)) throw ParseError(1, 1, "missing header row");
  for (auto& h : header) h = std::string(csv::trim(h));
  const bool weighted = header.size() == 3 && header[2] == "weight";
  if (header.size() < 2 || header[0] != "lat" || header[1] != "lon" || (header.size() == 3 && !weighted) ||
      header.size() > 3)
    throw ParseError(1, 1, "expected header lat,lon[,weight]");
  std::vector<CasePoint> out;
  csv::Record rec;
  while (reader.next(rec)) {
    const auto row = reader.record_line();
    if (rec.size() == 1 && csv::trim(rec[0]).empty()) continue;
    if (rec.size() != header.size()) throw ParseError(row, rec.size() + 1, "wrong field count");
    CasePoint p{geo::parse_point(rec[0], rec[1], row), 1.0};
    if (weighted) {
      auto w = parse_double(csv::trim(rec[2]));
      if (!w || !(*w > 0.0)) throw ValidationError("row " + std::to_string(row) + ": weight must be positive", {"weight"});
      p.weight = *w;
    }
    out.push_back(p);
  }
  return out;
}

inline std::vector<CasePoint> load_cases_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open cases file '" + path + "'");
  return load_cases(in);
}

inline void write_plan_csv(std::ostream& os, const LabeledPlan& lp, const std::vector<CasePoint>& cases) {
  const auto& plan = lp.plan;
  std::vector<std::size_t> count(plan.k, 0);
  std::vector<double> weight(plan.k, 0.0);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    ++count[plan.assignments[i]];
    weight[plan.assignments[i]] += cases[i].weight;
  }
  os << "centroid,lat,lon,cases,total_weight,district\n";
  for (std::size_t c = 0; c < plan.k; ++c)
    csv::write_record(os, {std::to_string(c), format_exact(plan.centroids[c].lat()),
                           format_exact(plan.centroids[c].lon()), std::to_string(count[c]), format_exact(weight[c]),
                           lp.centroid_districts[c]});
}

}  // namespace sentinel::campaigns
