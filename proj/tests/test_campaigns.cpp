#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "sentinel/campaigns/campaigns.hpp"
#include "support.hpp"

using namespace sentinel;
using namespace sentinel::campaigns;
using geo::GeoPoint;

namespace {

DistrictStat stat(std::string name, double c, double b, double o, double lat = 17, double lon = 78) {
  return {std::move(name), c, b, o, GeoPoint(lat, lon)};
}

std::vector<CasePoint> blobs(std::mt19937_64& g, const std::vector<GeoPoint>& centres, std::size_t per,
                             double spread_deg, std::vector<std::size_t>* truth = nullptr) {
  std::normal_distribution<double> z(0.0, spread_deg);
  std::uniform_real_distribution<double> w(0.5, 3.0);
  std::vector<CasePoint> pts;
  for (std::size_t c = 0; c < centres.size(); ++c)
    for (std::size_t i = 0; i < per; ++i) {
      pts.push_back({GeoPoint(centres[c].lat() + z(g), centres[c].lon() + z(g)), w(g)});
      if (truth) truth->push_back(c);
    }
  return pts;
}

/// Exhaustive optimum over all assignments into exactly k non-empty groups,
/// in the same projected plane the solver uses. Returns inertia in km^2.
double exhaustive_inertia(const std::vector<CasePoint>& pts, std::size_t k, std::vector<std::size_t>* best_assign) {
  double wsum = 0, lat = 0;
  for (const auto& p : pts) {
    wsum += p.weight;
    lat += p.weight * p.location.lat();
  }
  const Projection proj(lat / wsum);
  const std::size_t n = pts.size();
  std::vector<std::size_t> a(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<double> sx(k, 0), sy(k, 0), sw(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sx[a[i]] += pts[i].weight * proj.x(pts[i].location);
      sy[a[i]] += pts[i].weight * proj.y(pts[i].location);
      sw[a[i]] += pts[i].weight;
    }
    bool nonempty = true;
    for (double w : sw) nonempty = nonempty && w > 0;
    if (nonempty) {
      double inertia = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = proj.x(pts[i].location) - sx[a[i]] / sw[a[i]];
        const double dy = proj.y(pts[i].location) - sy[a[i]] / sw[a[i]];
        inertia += pts[i].weight * (dx * dx + dy * dy);
      }
      if (inertia < best) {
        best = inertia;
        if (best_assign) *best_assign = a;
      }
    }
    std::size_t i = 0;
    while (i < n && ++a[i] == k) a[i++] = 0;
    if (i == n) break;
  }
  return Projection::km2(best);
}

/// Same partition up to relabeling.
bool same_partition(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.size() != b.size()) return false;
  std::map<std::size_t, std::size_t> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ab.emplace(a[i], b[i]).first->second != b[i] || ba.emplace(b[i], a[i]).first->second != a[i]) return false;
  }
  return true;
}

std::vector<DistrictStat> demo_districts() {
  return load_district_stats_file(testing_support::demo("districts.csv").string());
}

}  // namespace

TEST(Ranking, DescendingWithAlphabeticalTies) {
  const std::vector<DistrictStat> s{stat("Medak", 2.0, 0, 0), stat("Adilabad", 5.0, 0, 0), stat("Jangaon", 2.0, 0, 0),
                                    stat("Nalgonda", 3.5, 0, 0)};
  const auto r = rank_districts(s, Indicator::cervical);
  std::vector<std::string> names;
  for (const auto& d : r) names.push_back(d.district);
  EXPECT_EQ(names, (std::vector<std::string>{"Adilabad", "Nalgonda", "Jangaon", "Medak"}));
}

TEST(Ranking, SingleDistrictAndEmpty) {
  const auto r = rank_districts({stat("Mulugu", 1, 2, 3)}, Indicator::oral);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].district, "Mulugu");
  EXPECT_THROW(rank_districts({}, Indicator::oral), ValidationError);
}

TEST(Ranking, IsPermutationOrderedByIndicator) {
  const auto stats = demo_districts();
  for (auto ind : {Indicator::cervical, Indicator::breast, Indicator::oral}) {
    const auto r = rank_districts(stats, ind);
    ASSERT_EQ(r.size(), stats.size());
    std::multiset<std::string> a, b;
    for (const auto& s : stats) a.insert(s.district);
    for (const auto& s : r) b.insert(s.district);
    EXPECT_EQ(a, b);
    for (std::size_t i = 1; i < r.size(); ++i) {
      const double p = r[i - 1].value(ind), q = r[i].value(ind);
      ASSERT_TRUE(p > q || (p == q && r[i - 1].district < r[i].district));
    }
  }
}

TEST(Ranking, StatewideMeansOfDemoFixture) {
  const auto r = district_ranking(demo_districts(), Indicator::cervical);
  EXPECT_NEAR(r.mean_cervical, 3.3, 1e-9);
  EXPECT_NEAR(r.mean_breast, 0.3, 1e-9);
  EXPECT_NEAR(r.mean_oral, 2.3, 1e-9);
  std::ostringstream os;
  write_ranking_csv(os, r);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "# statewide mean: cervical 3.3%, breast 0.3%, oral 2.3%");
}

TEST(Districts, LoaderRejectsBadRows) {
  std::istringstream dup("district,cervical_pct,breast_pct,oral_pct,lat,lon\nA,1,1,1,17,78\nA,2,2,2,17,78\n");
  EXPECT_THROW(load_district_stats(dup), DuplicateIdError);
  std::istringstream pct("district,cervical_pct,breast_pct,oral_pct,lat,lon\nA,101,1,1,17,78\n");
  EXPECT_THROW(load_district_stats(pct), ValidationError);
}

TEST(KMeans, SymmetricFourPoints) {
  const std::vector<CasePoint> pts{{{0, 0}, 1}, {{0, 1}, 1}, {{10, 0}, 1}, {{10, 1}, 1}};
  KMeansParams p;
  p.k = 2;
  const auto plan = kmeans(pts, p);
  std::set<std::pair<double, double>> got;
  for (const auto& c : plan.centroids) got.insert({c.lat(), c.lon()});
  EXPECT_EQ(got, (std::set<std::pair<double, double>>{{0, 0.5}, {10, 0.5}}));
  EXPECT_EQ(plan.assignments[0], plan.assignments[1]);
  EXPECT_NE(plan.assignments[0], plan.assignments[2]);
}

TEST(KMeans, OneCentroidPerDistinctPointHasZeroInertia) {
  std::mt19937_64 g(1);
  const auto pts = blobs(g, {{17, 78}, {18, 79}}, 4, 0.3);
  KMeansParams p;
  p.k = pts.size();
  EXPECT_EQ(kmeans(pts, p).inertia, 0.0);
  p.k = pts.size() + 1;
  EXPECT_THROW(kmeans(pts, p), ValidationError);
  p.k = 0;
  EXPECT_THROW(kmeans(pts, p), ValidationError);
  auto dup = pts;
  dup.push_back(pts[0]);
  p.k = pts.size() + 1;
  EXPECT_THROW(kmeans(dup, p), ValidationError);
}

TEST(KMeans, SingleClusterIsWeightedMean) {
  const std::vector<CasePoint> pts{{{17, 78}, 1}, {{18, 79}, 3}, {{17.5, 78.2}, 2}};
  KMeansParams p;
  p.k = 1;
  const auto plan = kmeans(pts, p);
  EXPECT_NEAR(plan.centroids[0].lat(), (17 + 54 + 35) / 6.0, 1e-12);
  EXPECT_NEAR(plan.centroids[0].lon(), (78 + 237 + 156.4) / 6.0, 1e-12);
}

TEST(KMeans, RejectsNonPositiveWeights) {
  KMeansParams p;
  p.k = 1;
  EXPECT_THROW(kmeans({{{17, 78}, 0.0}}, p), ValidationError);
  EXPECT_THROW(kmeans({{{17, 78}, -1.0}}, p), ValidationError);
}

TEST(KMeans, InertiaNonIncreasingAndAssignmentsNearestOn100Instances) {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> lat(16, 19.5), lon(77.5, 81);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<CasePoint> pts;
    const std::size_t n = 5 + g() % 120;
    for (std::size_t i = 0; i < n; ++i) pts.push_back({GeoPoint(lat(g), lon(g)), 1.0 + static_cast<double>(g() % 5)});
    KMeansParams p;
    p.k = 1 + g() % 6;
    p.seed = g();
    p.plus_plus_init = trial % 2 == 0;
    const auto plan = kmeans(pts, p);
    for (std::size_t i = 1; i < plan.inertia_history.size(); ++i)
      ASSERT_LE(plan.inertia_history[i], plan.inertia_history[i - 1] * (1 + 1e-12)) << "trial " << trial;
    const Projection proj(plan.reference_lat);
    double recomputed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto d = [&](const GeoPoint& c) {
        const double dx = proj.x(pts[i].location) - proj.x(c), dy = proj.y(pts[i].location) - proj.y(c);
        return dx * dx + dy * dy;
      };
      const double mine = d(plan.centroids[plan.assignments[i]]);
      for (const auto& c : plan.centroids) ASSERT_LE(mine, d(c) + 1e-12);
      recomputed += pts[i].weight * mine;
    }
    EXPECT_NEAR(Projection::km2(recomputed), plan.inertia, 1e-6 * (1 + plan.inertia));
  }
}

TEST(KMeans, DeterministicAndOrderIndependent) {
  std::mt19937_64 g(3);
  auto pts = blobs(g, {{17, 78}, {18, 80}, {16.5, 79.5}}, 15, 0.4);
  KMeansParams p;
  p.k = 3;
  const auto a = kmeans(pts, p);
  const auto b = kmeans(pts, p);
  EXPECT_EQ(a.centroids, b.centroids);
  EXPECT_EQ(a.assignments, b.assignments);
  std::vector<std::size_t> perm(pts.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), g);
  std::vector<CasePoint> shuffled;
  for (auto i : perm) shuffled.push_back(pts[i]);
  const auto c = kmeans(shuffled, p);
  EXPECT_EQ(c.centroids, a.centroids);
  for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_EQ(c.assignments[i], a.assignments[perm[i]]);
}

TEST(KMeans, MatchesExhaustiveOptimumAtTwelvePoints) {
  std::mt19937_64 g(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto pts = blobs(g, {{17, 78}, {17.6, 79.4}, {18.6, 78.3}}, 4, 0.25);
    std::vector<std::size_t> oracle;
    const double best = exhaustive_inertia(pts, 3, &oracle);
    KMeansParams p;
    p.k = 3;
    p.seed = g();
    const auto plan = kmeans(pts, p);
    EXPECT_NEAR(plan.inertia, best, 1e-6 * best);
    EXPECT_TRUE(same_partition(plan.assignments, oracle));
  }
}

TEST(KMeans, ThirtyPointBlobsRecoverGeneratingPartition) {
  std::mt19937_64 g(5);
  std::vector<std::size_t> truth;
  const auto pts = blobs(g, {{16.5, 78}, {18.0, 80.5}, {19.3, 78.4}}, 10, 0.15, &truth);
  KMeansParams p;
  p.k = 3;
  const auto plan = kmeans(pts, p);
  EXPECT_TRUE(same_partition(plan.assignments, truth));
}

TEST(Plan, LabelsNearestDistrict) {
  const auto stats = demo_districts();
  auto find = [&](const std::string& n) {
    for (const auto& s : stats)
      if (s.district == n) return s;
    throw std::runtime_error(n);
  };
  const auto hyd = find("Hyderabad"), adb = find("Adilabad");
  std::mt19937_64 g(6);
  auto pts = blobs(g, {hyd.centroid}, 8, 0.01);
  KMeansParams p;
  p.k = 2;
  auto one = plan_campaigns(stats, pts, p);
  EXPECT_EQ(one.centroid_districts, (std::vector<std::string>{"Hyderabad", "Hyderabad"}));

  auto more = blobs(g, {adb.centroid}, 8, 0.01);
  pts.insert(pts.end(), more.begin(), more.end());
  const auto two = plan_campaigns(stats, pts, p);
  for (std::size_t c = 0; c < 2; ++c) {
    std::string manual;
    double bd = 1e300;
    for (const auto& s : stats) {
      const double d = geo::haversine_km(two.plan.centroids[c], s.centroid);
      if (d < bd) {
        bd = d;
        manual = s.district;
      }
    }
    EXPECT_EQ(two.centroid_districts[c], manual);
  }
  std::set<std::string> labels(two.centroid_districts.begin(), two.centroid_districts.end());
  EXPECT_EQ(labels, (std::set<std::string>{"Hyderabad", "Adilabad"}));
  EXPECT_THROW(plan_campaigns({}, pts, p), ValidationError);
}

TEST(Plan, CasesCsvAndPlanCsv) {
  std::istringstream in("lat,lon,weight\n17,78,2\n17.1,78.1,1\n18,79,4\n");
  const auto cases = load_cases(in);
  ASSERT_EQ(cases.size(), 3u);
  EXPECT_EQ(cases[2].weight, 4.0);
  std::istringstream bad("lat,lon,weight\n17,78,0\n");
  EXPECT_THROW(load_cases(bad), ValidationError);
  std::istringstream hdr("lon,lat\n");
  EXPECT_THROW(load_cases(hdr), ParseError);
  KMeansParams p;
  p.k = 2;
  const auto lp = plan_campaigns(demo_districts(), cases, p);
  std::ostringstream os;
  write_plan_csv(os, lp, cases);
  const auto text = os.str();
  EXPECT_EQ(text.rfind("centroid,lat,lon,cases,total_weight,district\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}
