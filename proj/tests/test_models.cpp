#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "sentinel/models/model.hpp"
#include "sentinel/models/ova.hpp"
#include "sentinel/models/persist.hpp"
#include "support.hpp"

using namespace sentinel;
using namespace sentinel::models;
using testing_support::random_matrix;

namespace {

LabeledMatrix matrix(const std::vector<std::vector<double>>& x, std::vector<int> y) {
  return LabeledMatrix::from_rows(x, std::move(y));
}

/// Exhaustive split search with exact integer arithmetic. Maximizing the
/// Gini decrease is maximizing S = sum_c l_c^2 / n_l + sum_c r_c^2 / n_r,
/// compared as fractions. First (feature, threshold) in scan order wins ties.
struct OracleSplit {
  std::size_t feature;
  double threshold;
  double decrease;
};

std::optional<OracleSplit> oracle_split(const LabeledMatrix& m, const std::vector<std::size_t>& features) {
  const std::size_t n = m.rows();
  const auto k = static_cast<std::size_t>(m.classes());
  std::vector<long long> total(k, 0);
  for (std::size_t i = 0; i < n; ++i) ++total[static_cast<std::size_t>(m.label(i))];
  long long parent_sq = 0;
  for (auto c : total) parent_sq += c * c;
  // best fraction num/den; parent is parent_sq / n
  long long best_num = parent_sq, best_den = static_cast<long long>(n);
  std::optional<OracleSplit> best;
  for (auto f : features) {
    std::vector<double> vals;
    for (std::size_t i = 0; i < n; ++i) vals.push_back(m.at(i, f));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    for (std::size_t v = 0; v + 1 < vals.size(); ++v) {
      const double thr = vals[v] + (vals[v + 1] - vals[v]) / 2.0;
      std::vector<long long> l(k, 0), r(k, 0);
      long long nl = 0, nr = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (m.at(i, f) <= vals[v]) {
          ++l[static_cast<std::size_t>(m.label(i))];
          ++nl;
        } else {
          ++r[static_cast<std::size_t>(m.label(i))];
          ++nr;
        }
      }
      long long ls = 0, rs = 0;
      for (std::size_t c = 0; c < k; ++c) {
        ls += l[c] * l[c];
        rs += r[c] * r[c];
      }
      const long long num = ls * nr + rs * nl, den = nl * nr;
      if (num * best_den > best_num * den) {
        best_num = num;
        best_den = den;
        // decrease = (S - parent_sq/n) / n
        const double s = static_cast<double>(num) / static_cast<double>(den);
        best = OracleSplit{f, thr, (s - static_cast<double>(parent_sq) / static_cast<double>(n)) / static_cast<double>(n)};
      }
    }
  }
  return best;
}

double brute_gini(const std::vector<int>& labels) {
  std::map<int, double> c;
  for (int y : labels) c[y] += 1;
  double s = 0;
  for (auto [k, v] : c) s += (v / labels.size()) * (v / labels.size());
  return 1 - s;
}

std::vector<std::size_t> all_features(std::size_t d) {
  std::vector<std::size_t> f(d);
  std::iota(f.begin(), f.end(), std::size_t{0});
  return f;
}

/// Two Gaussian-ish clouds; `gap` controls separability.
LabeledMatrix two_clouds(std::mt19937_64& g, std::size_t n, std::size_t d, double gap) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % 2);
    std::vector<double> row(d);
    for (std::size_t j = 0; j < d; ++j) row[j] = z(g) + (cls ? gap : -gap) * (j == 0 ? 1.0 : 0.3);
    x.push_back(row);
    y.push_back(cls);
  }
  return matrix(x, y);
}

std::string saved(const TrainedModel& m) {
  std::ostringstream os;
  save_model(os, m);
  return os.str();
}

TrainedModel reloaded(const TrainedModel& m) {
  std::istringstream in(saved(m));
  return load_model(in);
}

}  // namespace

// ---- gini and best_split ----

TEST(Gini, Examples) {
  EXPECT_DOUBLE_EQ(gini_impurity(std::vector<int>{1, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(gini_impurity(std::vector<int>{0, 0, 1, 1}), 0.5);
  EXPECT_NEAR(gini_impurity(std::vector<int>{0, 0, 1}), 4.0 / 9.0, 1e-15);
  EXPECT_THROW(gini_impurity(std::vector<int>{}), ValidationError);
}

TEST(Gini, BoundsOnRandomMultisets) {
  std::mt19937_64 g(3);
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + static_cast<int>(g() % 4);
    std::vector<int> ys(1 + g() % 40);
    for (auto& y : ys) y = static_cast<int>(g() % static_cast<std::uint64_t>(k));
    const double v = gini_impurity(ys);
    EXPECT_NEAR(v, brute_gini(ys), 1e-12);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0 - 1.0 / k + 1e-12);
  }
}

TEST(BestSplit, TwoPoints) {
  const auto m = matrix({{0}, {1}}, {0, 1});
  const auto s = best_split(m, all_features(1));
  ASSERT_TRUE(s);
  EXPECT_EQ(s->feature, 0u);
  EXPECT_DOUBLE_EQ(s->threshold, 0.5);
  EXPECT_DOUBLE_EQ(s->impurity_decrease, 0.5);
}

TEST(BestSplit, PureDataHasNoSplit) {
  EXPECT_FALSE(best_split(matrix({{0}, {1}, {2}}, {1, 1, 1}), all_features(1)));
}

TEST(BestSplit, SixPointsMatchEnumeration) {
  const auto m = matrix({{1, 5}, {2, 3}, {3, 8}, {4, 1}, {5, 9}, {6, 2}}, {0, 0, 1, 0, 1, 1});
  const auto s = best_split(m, all_features(2));
  const auto o = oracle_split(m, all_features(2));
  ASSERT_TRUE(s && o);
  EXPECT_EQ(s->feature, o->feature);
  EXPECT_EQ(s->threshold, o->threshold);
}

TEST(BestSplit, MatchesExhaustiveOracleOn200RandomInstances) {
  std::mt19937_64 g(2024);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + g() % 49, d = 1 + g() % 5;
    const int k = 2 + static_cast<int>(g() % 2);
    const auto m = random_matrix(g, n, d, k, 1 + static_cast<int>(g() % 8));
    const auto s = best_split(m, all_features(d));
    const auto o = oracle_split(m, all_features(d));
    if (s.has_value() != o.has_value()) {
      ++mismatches;
      continue;
    }
    if (!s) continue;
    if (s->feature != o->feature || s->threshold != o->threshold) ++mismatches;
    EXPECT_NEAR(s->impurity_decrease, o->decrease, 1e-12);
  }
  EXPECT_EQ(mismatches, 0);
}

// ---- tree ----

TEST(Tree, SingleRowIsOneLeaf) {
  const auto t = fit_tree(matrix({{3, 4}}, {1}), {});
  ASSERT_EQ(t.nodes.size(), 1u);
  EXPECT_EQ(t.predict(std::vector<double>{0, 0}), 1);
}

TEST(Tree, ConflictingDuplicatesTieToClassZero) {
  const auto t = fit_tree(matrix({{1, 1}, {1, 1}}, {1, 0}), {});
  ASSERT_EQ(t.nodes.size(), 1u);
  EXPECT_EQ(t.nodes[0].counts, (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(t.predict(std::vector<double>{1, 1}), 0);
}

TEST(Tree, MemorizesConflictFreeData) {
  std::mt19937_64 g(8);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 5 + g() % 200, d = 1 + g() % 6;
    std::uniform_real_distribution<double> u(-10, 10);
    std::vector<std::vector<double>> x(n, std::vector<double>(d));
    for (auto& r : x)
      for (auto& v : r) v = u(g);
    std::vector<int> y(n);
    for (auto& v : y) v = static_cast<int>(g() % 3);
    const auto m = matrix(x, y);
    const auto t = fit_tree(m, {});
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(t.predict(m.row(i)), y[i]);
    for (const auto& node : t.nodes) {
      if (node.is_leaf()) continue;
      ASSERT_GE(node.left, 0);
      ASSERT_GE(node.right, 0);
    }
  }
}

TEST(Tree, LeafCountsSumToSamples) {
  std::mt19937_64 g(9);
  const auto m = random_matrix(g, 120, 3, 2, 4);
  const auto t = fit_tree(m, {std::size_t{3}, 2});
  EXPECT_LE(t.depth(), 3u);
  std::size_t total = 0;
  for (const auto& n : t.nodes)
    if (n.is_leaf())
      for (auto c : n.counts) total += c;
  EXPECT_EQ(total, m.rows());
}

TEST(Tree, HandBuiltTraceAndThresholdGoesLeft) {
  TreeModel t;
  t.info.feature_names = {"a", "b"};
  t.nodes = {{1, 2.5, 1, 2, 0, {}}, {-1, 0, -1, -1, 0, {3, 0}}, {-1, 0, -1, -1, 1, {0, 2}}};
  EXPECT_EQ(t.predict(std::vector<double>{9, 2.0}), 0);
  EXPECT_EQ(t.predict(std::vector<double>{9, 2.5}), 0);
  EXPECT_EQ(t.predict(std::vector<double>{9, 3.0}), 1);
  EXPECT_THROW(t.predict(std::vector<double>{1}), ValidationError);
}

// ---- forest ----

TEST(Forest, DegenerateForestEqualsTree) {
  std::mt19937_64 g(10);
  const auto m = random_matrix(g, 80, 4, 2);
  ForestParams p;
  p.n_trees = 1;
  p.features_per_split = 4;
  p.bootstrap = false;
  const auto f = fit_forest(m, p);
  const auto t = fit_tree(m, {});
  EXPECT_EQ(f.trees[0].nodes, t.nodes);
}

TEST(Forest, DeterministicAndThreadIndependent) {
  std::mt19937_64 g(11);
  const auto m = random_matrix(g, 150, 5, 2);
  ForestParams p;
  p.n_trees = 12;
  p.threads = 1;
  const auto a = fit_forest(m, p);
  p.threads = 4;
  const auto b = fit_forest(m, p);
  EXPECT_EQ(a, b);
  p.seed = 43;
  EXPECT_NE(fit_forest(m, p).trees, a.trees);
}

TEST(Forest, VotesMatchRecountAndMajority) {
  std::mt19937_64 g(12);
  const auto m = random_matrix(g, 100, 4, 3);
  ForestParams p;
  p.n_trees = 15;
  const auto f = fit_forest(m, p);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<std::size_t> tally(3, 0);
    for (const auto& t : f.trees) ++tally[static_cast<std::size_t>(t.predict(m.row(i)))];
    ASSERT_EQ(f.votes(m.row(i)), tally);
    const auto best = static_cast<int>(std::max_element(tally.begin(), tally.end()) - tally.begin());
    ASSERT_EQ(f.predict(m.row(i)), best);
  }
}

TEST(Forest, ThreeVotesAndUnanimity) {
  auto leaf = [](int label) {
    TreeModel t;
    t.info.feature_names = {"a"};
    t.info.classes = 2;
    t.nodes = {{-1, 0, -1, -1, label, {1, 1}}};
    return t;
  };
  ForestModel f;
  f.info = leaf(0).info;
  f.trees = {leaf(1), leaf(1), leaf(0)};
  EXPECT_EQ(f.predict(std::vector<double>{0}), 1);
  f.trees = {leaf(1), leaf(0)};
  EXPECT_EQ(f.predict(std::vector<double>{0}), 0);
  std::mt19937_64 g(13);
  const auto m = random_matrix(g, 60, 3, 2);
  const auto t = fit_tree(m, {});
  f.info = t.info;
  f.trees = {t, t, t};
  for (std::size_t i = 0; i < m.rows(); ++i) EXPECT_EQ(f.predict(m.row(i)), t.predict(m.row(i)));
}

// ---- SGD and one-vs-all ----

TEST(Sgd, FourPointSeparableSet) {
  const auto m = matrix({{0, 0}, {0, 1}, {2, 0}, {2, 1}}, {0, 0, 1, 1});
  SgdParams p;
  p.epochs = 1000;
  const auto s = fit_sgd(m, p);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(s.predict(m.row(i)), m.label(i));
}

TEST(Sgd, ZeroEpochsGivesZeroWeights) {
  const auto m = matrix({{0, 0}, {2, 1}}, {0, 1});
  SgdParams p;
  p.epochs = 0;
  const auto s = fit_sgd(m, p);
  ASSERT_EQ(s.planes.size(), 1u);
  EXPECT_EQ(s.planes[0].weights, (std::vector<double>{0, 0}));
  EXPECT_EQ(s.planes[0].bias, 0.0);
  EXPECT_EQ(s.predict(std::vector<double>{5, 5}), 0);
}

TEST(Sgd, SameSeedSameWeights) {
  std::mt19937_64 g(14);
  const auto m = two_clouds(g, 60, 3, 1.0);
  EXPECT_EQ(fit_sgd(m, {}), fit_sgd(m, {}));
  SgdParams other;
  other.seed = 7;
  EXPECT_NE(fit_sgd(m, {}).planes, fit_sgd(m, other).planes);
}

TEST(Sgd, SeparableRandomInstancesReachFullTrainingAccuracy) {
  std::mt19937_64 g(15);
  std::uniform_real_distribution<double> u(-5, 5), ang(0, 2 * std::numbers::pi);
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double a = ang(g), off = u(g) * 0.4;
    const double w0 = std::cos(a), w1 = std::sin(a);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    while (x.size() < 40) {
      const double p0 = u(g), p1 = u(g);
      const double s = w0 * p0 + w1 * p1 + off;
      if (std::abs(s) < 0.5) continue;  // keep a margin
      x.push_back({p0, p1});
      y.push_back(s > 0 ? 1 : 0);
    }
    if (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), 0) == 0) {
      --trial;
      continue;
    }
    const auto m = matrix(x, y);
    SgdParams p;
    p.epochs = 1000;
    p.seed = g();
    const auto s = fit_sgd(m, p);
    bool all = true;
    for (std::size_t i = 0; i < m.rows(); ++i) all = all && s.predict(m.row(i)) == y[i];
    solved += all;
  }
  EXPECT_EQ(solved, 100);
}

namespace {
std::vector<LabeledMatrix> small_fixed_sets() {
  return {matrix({{0, 0}, {0, 1}, {2, 0}, {2, 1}}, {0, 0, 1, 1}),
          matrix({{0, 0}, {1, 1}, {1, 0}, {0, 1}, {0.5, 0.2}}, {0, 0, 1, 1, 1}),
          matrix({{-2}, {-1.5}, {-1}, {-0.2}, {0.3}, {1}, {1.4}, {2}}, {0, 0, 0, 1, 0, 1, 1, 1})};
}
std::vector<int> signs_of(const LabeledMatrix& m) {
  std::vector<int> s;
  for (int y : m.labels()) s.push_back(y == 1 ? 1 : -1);
  return s;
}
}  // namespace

TEST(Sgd, LogisticObjectiveNonIncreasingAfterBurnIn) {
  for (const auto& m : small_fixed_sets()) {
    for (double eta : {0.01, 0.003, 0.001}) {
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SgdParams p;
        p.loss = Loss::logistic;
        p.eta0 = eta;
        p.epochs = 500;
        p.seed = seed;
        const auto fit = fit_binary_sgd(m, signs_of(m), p);
        for (std::size_t e = 5; e < fit.objective.size(); ++e)
          ASSERT_LE(fit.objective[e], fit.objective[e - 1]) << "epoch " << e + 1 << " seed " << seed;
      }
    }
  }
}

// Hinge is non-smooth, so constant-ish steps oscillate around the kink; the
// rise per epoch stays within a step-sized envelope.
TEST(Sgd, HingeObjectiveOscillationIsStepBounded) {
  for (const auto& m : small_fixed_sets()) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      SgdParams p;
      p.eta0 = 0.01;
      p.epochs = 500;
      p.seed = seed;
      const auto fit = fit_binary_sgd(m, signs_of(m), p);
      for (std::size_t e = 5; e < fit.objective.size(); ++e)
        ASSERT_LE(fit.objective[e] - fit.objective[e - 1], p.eta0) << "epoch " << e + 1;
      EXPECT_LT(fit.objective.back(), fit.objective[4]);
    }
  }
}

TEST(Sgd, DivergenceNamesTheEpoch) {
  const auto m = matrix({{1e300, 1e300}, {-1e300, -1e300}}, {0, 1});
  SgdParams p;
  p.eta0 = 1e10;
  p.loss = Loss::hinge;
  try {
    fit_sgd(m, p);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.epoch(), 1u);
  }
}

namespace {
struct FixedLearner {
  double v;
  double decision_value(std::span<const double>) const { return v; }
};
}  // namespace

TEST(Ova, ArgmaxAndTieBreak) {
  const std::vector<double> x{0.0};
  EXPECT_EQ(ova_predict(std::vector<FixedLearner>{{0.2}, {0.9}, {-0.4}}, x), 1);
  EXPECT_EQ(ova_predict(std::vector<FixedLearner>{{0.5}, {0.5}, {0.5}}, x), 0);
  EXPECT_EQ(ova_predict(std::vector<FixedLearner>{{0.3}}, x), 1);
  EXPECT_EQ(ova_predict(std::vector<FixedLearner>{{-0.3}}, x), 0);
}

TEST(Ova, BinaryUsesOneLearnerAndMultiClassUsesK) {
  std::mt19937_64 g(17);
  const auto two = two_clouds(g, 50, 2, 2.0);
  const auto s2 = fit_sgd(two, {});
  ASSERT_EQ(s2.planes.size(), 1u);
  for (std::size_t i = 0; i < two.rows(); ++i)
    EXPECT_EQ(s2.predict(two.row(i)), s2.planes[0].decision_value(two.row(i)) > 0 ? 1 : 0);
  const auto three = random_matrix(g, 90, 3, 3);
  EXPECT_EQ(fit_sgd(three, {}).planes.size(), 3u);
  const auto missing = LabeledMatrix::from_rows({{0}, {1}}, {0, 2}, {}, 3);
  EXPECT_THROW(fit_sgd(missing, {}), ValidationError);
}

// ---- SVC ----

TEST(Svm, TwoPointAnalyticSolution) {
  const auto m = matrix({{0, 0}, {2, 0}}, {0, 1});
  SvmParams p;
  p.kernel = KernelKind::linear;
  p.C = 1000;
  const auto fit = fit_svc_detailed(m, p);
  EXPECT_NEAR(fit.alpha[0], 0.5, 1e-6);
  EXPECT_NEAR(fit.alpha[1], 0.5, 1e-6);
  double w0 = 0, w1 = 0;
  for (std::size_t i = 0; i < fit.model.support_count(); ++i) {
    w0 += fit.model.coef[i] * fit.model.support_vector(i)[0];
    w1 += fit.model.coef[i] * fit.model.support_vector(i)[1];
  }
  EXPECT_NEAR(w0, 1.0, 1e-6);
  EXPECT_NEAR(w1, 0.0, 1e-6);
  EXPECT_NEAR(fit.model.bias, -1.0, 1e-6);
  EXPECT_NEAR(fit.model.decision_value(std::vector<double>{1, 0}), 0.0, p.tolerance);
  EXPECT_NEAR(std::abs(fit.model.decision_value(std::vector<double>{2, 0})), 1.0, p.tolerance);
}

TEST(Svm, KktConditionsOn50RandomInstances) {
  std::mt19937_64 g(18);
  for (int trial = 0; trial < 50; ++trial) {
    const bool separable = trial % 2 == 0;
    const std::size_t n = 10 + g() % 60, d = 2 + g() % 3;
    const auto m = two_clouds(g, n, d, separable ? 4.0 : 0.6);
    SvmParams p;
    p.kernel = trial % 4 < 2 ? KernelKind::linear : KernelKind::rbf;
    p.C = std::vector<double>{0.5, 1.0, 10.0}[g() % 3];
    p.seed = g();
    const auto fit = fit_svc_detailed(m, p);
    ASSERT_TRUE(fit.model.converged);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = fit.alpha[i];
      const double yf = fit.signs[i] * fit.model.decision_value(m.row(i));
      ASSERT_GE(a, 0.0);
      ASSERT_LE(a, p.C);
      sum += a * fit.signs[i];
      if (a == 0.0) EXPECT_GE(yf, 1.0 - p.tolerance) << "trial " << trial;
      else if (a < p.C) EXPECT_NEAR(yf, 1.0, p.tolerance) << "trial " << trial;
      else EXPECT_LE(yf, 1.0 + p.tolerance) << "trial " << trial;
    }
    EXPECT_LE(std::abs(sum), 1e-8);
    for (double c : fit.model.coef) EXPECT_NE(c, 0.0);
  }
}

TEST(Svm, DuplicatedDataGivesSameBoundary) {
  std::mt19937_64 g(19);
  const auto m = two_clouds(g, 30, 2, 3.0);
  std::vector<std::size_t> twice;
  for (std::size_t i = 0; i < m.rows(); ++i) twice.insert(twice.end(), {i, i});
  SvmParams p;
  p.kernel = KernelKind::linear;
  p.C = 1e4;
  p.tolerance = 1e-6;
  const auto a = fit_svc(m, p);
  const auto b = fit_svc(m.select(twice), p);
  int checked = 0;
  for (double x0 = -6; x0 <= 6; x0 += 0.5)
    for (double x1 = -6; x1 <= 6; x1 += 0.5) {
      const std::vector<double> x{x0, x1};
      const double fa = a.decision_value(x);
      EXPECT_NEAR(fa, b.decision_value(x), 1e-3);
      if (std::abs(fa) > 1e-3) {
        EXPECT_EQ(a.predict(x), b.predict(x));
        ++checked;
      }
    }
  EXPECT_GT(checked, 500);
}

TEST(Svm, RbfLocality) {
  const auto m = matrix({{0, 0}, {10, 10}, {11, 10}, {10, 11}, {11, 11}}, {1, 0, 0, 0, 0});
  SvmParams p;
  p.gamma = 1.0;
  p.C = 10;
  const auto s = fit_svc(m, p);
  EXPECT_EQ(s.predict(std::vector<double>{0, 0}), 1);
  EXPECT_EQ(s.predict(std::vector<double>{10.5, 10.5}), 0);
}

TEST(Svm, RejectsBadParameters) {
  const auto m = matrix({{0}, {1}}, {0, 1});
  SvmParams p;
  p.gamma = 0.0;
  EXPECT_THROW(fit_svc(m, p), ValidationError);
  p.gamma = -1.0;
  EXPECT_THROW(fit_svc(m, p), ValidationError);
  SvmParams c;
  c.C = 0;
  EXPECT_THROW(fit_svc(m, c), ValidationError);
  EXPECT_THROW(fit_svc(LabeledMatrix::from_rows({{0}, {1}, {2}}, {0, 1, 2}), {}), ValidationError);
}

TEST(Svm, IterationCapFlagsUnconverged) {
  std::mt19937_64 g(20);
  const auto m = two_clouds(g, 60, 2, 0.3);
  SvmParams p;
  p.max_iterations = 3;
  const auto s = fit_svc(m, p);
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.iterations, 3u);
}

TEST(Svm, SeedOnlyAffectsSolveOrder) {
  std::mt19937_64 g(21);
  const auto m = two_clouds(g, 50, 3, 1.0);
  SvmParams a, b;
  b.seed = 99;
  const auto sa = fit_svc(m, a), sb = fit_svc(m, b);
  for (std::size_t i = 0; i < m.rows(); ++i)
    EXPECT_NEAR(sa.decision_value(m.row(i)), sb.decision_value(m.row(i)), 5e-3);
}

// ---- persistence ----

TEST(Persist, SaveLoadIsBitIdenticalForAllKinds) {
  std::mt19937_64 g(22);
  const auto m = two_clouds(g, 80, 4, 1.0);
  const auto probe = two_clouds(g, 200, 4, 1.5);
  ForestParams fp;
  fp.n_trees = 7;
  SvmParams sp;
  const std::vector<TrainedModel> all{fit_tree(m, {}), fit_forest(m, fp), fit_sgd(m, {}), fit_svc(m, sp)};
  for (const auto& model : all) {
    const auto back = reloaded(model);
    EXPECT_EQ(kind_name(back), kind_name(model));
    EXPECT_EQ(model_id(back), model_id(model));
    EXPECT_EQ(saved(back), saved(model));
    for (std::size_t i = 0; i < probe.rows(); ++i) {
      ASSERT_EQ(predict(back, probe.row(i)), predict(model, probe.row(i)));
      const auto ca = confidence(model, probe.row(i)), cb = confidence(back, probe.row(i));
      ASSERT_EQ(ca.kind, cb.kind);
      ASSERT_EQ(std::bit_cast<std::uint64_t>(ca.value), std::bit_cast<std::uint64_t>(cb.value));
    }
  }
}

TEST(Persist, HeaderAndRejections) {
  const auto text = saved(fit_tree(matrix({{0}, {1}}, {0, 1}), {}));
  EXPECT_EQ(text.rfind("sentinel-model v1 tree\n", 0), 0u);
  std::istringstream wrong("sentinel-model v9 tree\n");
  EXPECT_THROW(load_model(wrong), ValidationError);
  std::istringstream junk("hello\n");
  EXPECT_THROW(load_model(junk), ValidationError);
  auto broken = text;
  broken.replace(broken.find("node.0"), 6, "node.9");
  std::istringstream bad(broken);
  EXPECT_THROW(load_model(bad), ValidationError);
}

TEST(Model, IdsCarryKindAndFingerprint) {
  const auto a = matrix({{0}, {1}}, {0, 1});
  const auto b = matrix({{0}, {2}}, {0, 1});
  const auto ia = model_id(fit_tree(a, {})), ib = model_id(fit_tree(b, {}));
  EXPECT_EQ(ia.rfind("tree-v1-", 0), 0u);
  EXPECT_EQ(ia.size(), std::string("tree-v1-").size() + 16);
  EXPECT_NE(ia, ib);
  EXPECT_EQ(confidence(fit_tree(a, {}), std::vector<double>{0}).kind, "leaf_frequency");
  EXPECT_EQ(confidence(fit_svc(a, {}), std::vector<double>{0}).kind, "margin");
}
