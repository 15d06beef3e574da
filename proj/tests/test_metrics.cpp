#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "sentinel/metrics/metrics.hpp"

using namespace sentinel;
using namespace sentinel::metrics;

namespace {

std::vector<int> random_labels(std::mt19937_64& g, std::size_t n, int k) {
  std::vector<int> v(n);
  for (auto& x : v) x = static_cast<int>(g() % static_cast<std::uint64_t>(k));
  return v;
}

}  // namespace

TEST(Confusion, FourSampleExample) {
  const std::vector<int> t{1, 0, 1, 0}, p{1, 0, 0, 0};
  const auto cm = confusion(t, p);
  EXPECT_EQ(cm.classes, (std::vector<int>{0, 1}));
  EXPECT_EQ(cm.counts, (std::vector<std::vector<std::size_t>>{{2, 0}, {1, 1}}));
  EXPECT_DOUBLE_EQ(accuracy(cm), 0.75);
}

TEST(Confusion, PerfectPredictionIsDiagonal) {
  const std::vector<int> t{0, 2, 1, 2, 0};
  const auto cm = confusion(t, t);
  for (std::size_t i = 0; i < cm.size(); ++i)
    for (std::size_t j = 0; j < cm.size(); ++j) {
      if (i != j) {
        EXPECT_EQ(cm.counts[i][j], 0u);
      }
    }
  EXPECT_EQ(accuracy(cm), 1.0);
}

TEST(Confusion, ClassesFromEitherSequence) {
  const std::vector<int> t{0, 0}, p{0, 3};
  const auto cm = confusion(t, p);
  EXPECT_EQ(cm.classes, (std::vector<int>{0, 3}));
  EXPECT_EQ(cm.row_sum(1), 0u);
}

TEST(Confusion, Errors) {
  const std::vector<int> a{0, 1}, b{0};
  EXPECT_THROW(confusion(a, b), ValidationError);
  EXPECT_THROW(confusion(std::vector<int>{}, std::vector<int>{}), ValidationError);
  EXPECT_THROW(accuracy(ConfusionMatrix{}), ValidationError);
}

TEST(Confusion, RandomCaseMatchesIndependentTally) {
  std::mt19937_64 g(1);
  const auto t = random_labels(g, 200, 4), p = random_labels(g, 200, 4);
  std::map<std::pair<int, int>, std::size_t> tally;
  for (std::size_t i = 0; i < t.size(); ++i) ++tally[{t[i], p[i]}];
  const auto cm = confusion(t, p);
  for (std::size_t i = 0; i < cm.size(); ++i)
    for (std::size_t j = 0; j < cm.size(); ++j) {
      const auto it = tally.find({cm.classes[i], cm.classes[j]});
      EXPECT_EQ(cm.counts[i][j], it == tally.end() ? 0u : it->second);
    }
  EXPECT_EQ(cm.total(), 200u);
}

TEST(Report, ClassOneScores) {
  const std::vector<int> t{1, 0, 1, 0}, p{1, 0, 0, 0};
  const auto rep = classification_report(confusion(t, p));
  const auto& c1 = rep.per_class[1];
  EXPECT_EQ(c1.cls, 1);
  EXPECT_DOUBLE_EQ(c1.precision, 1.0);
  EXPECT_DOUBLE_EQ(c1.recall, 0.5);
  EXPECT_NEAR(c1.f1, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(c1.support, 2u);
  EXPECT_FALSE(rep.zero_division);
}

TEST(Report, ZeroDenominatorGivesZeroNotNaN) {
  const std::vector<int> t{0, 1, 1, 0}, p{0, 0, 0, 0};
  const auto rep = classification_report(confusion(t, p));
  EXPECT_EQ(rep.per_class[1].precision, 0.0);
  EXPECT_EQ(rep.per_class[1].f1, 0.0);
  EXPECT_TRUE(rep.zero_division);
  std::ostringstream os;
  write_report_text(os, rep);
  EXPECT_NE(os.str().find("zero denominator"), std::string::npos);
}

TEST(Report, IdentitiesOn100RandomSequences) {
  std::mt19937_64 g(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(g() % 4);
    const std::size_t n = 1 + g() % 300;
    const auto t = random_labels(g, n, k);
    auto p = t;
    for (auto& v : p)
      if (g() % 3 == 0) v = static_cast<int>(g() % static_cast<std::uint64_t>(k));
    const auto cm = confusion(t, p);
    const auto rep = classification_report(cm);
    std::size_t support = 0;
    for (std::size_t i = 0; i < cm.size(); ++i) {
      const auto expected = static_cast<std::size_t>(std::count(t.begin(), t.end(), cm.classes[i]));
      ASSERT_EQ(cm.row_sum(i), expected);
      ASSERT_EQ(rep.per_class[i].support, expected);
      support += rep.per_class[i].support;
      for (double v : {rep.per_class[i].precision, rep.per_class[i].recall, rep.per_class[i].f1}) {
        ASSERT_FALSE(std::isnan(v));
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
    }
    ASSERT_EQ(support, n);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += t[i] == p[i];
    ASSERT_NEAR(rep.accuracy, static_cast<double>(hits) / static_cast<double>(n), 1e-15);
    ASSERT_NEAR(rep.weighted.recall, rep.accuracy, 1e-12);
  }
}

TEST(Report, PositiveRecallIgnoresNegativeRelabeling) {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = random_labels(g, 80, 2), p = random_labels(g, 80, 2);
    t[0] = 1;
    const double before = classification_report(confusion(t, p)).per_class.back().recall;
    for (auto* v : {&t, &p})
      for (auto& x : *v)
        if (x == 0) x = -5;
    const auto rep = classification_report(confusion(t, p));
    EXPECT_EQ(rep.per_class.back().cls, 1);
    EXPECT_EQ(rep.per_class.back().recall, before);
  }
}

TEST(Report, CsvAndTextLayouts) {
  const std::vector<int> t{1, 0, 1, 0}, p{1, 0, 0, 0};
  const auto ev = evaluate(t, t, t, p);
  EXPECT_EQ(ev.train_accuracy(), 1.0);
  EXPECT_EQ(ev.test_accuracy(), 0.75);
  std::ostringstream csv;
  write_eval_csv(csv, ev);
  const auto s = csv.str();
  EXPECT_EQ(s.rfind("split,class,precision,recall,f1,support\n", 0), 0u);
  EXPECT_NE(s.find("train,accuracy,,,1,4"), std::string::npos);
  EXPECT_NE(s.find("test,accuracy,,,0.75,4"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 11);
  std::ostringstream txt;
  write_report_text(txt, ev.test);
  EXPECT_NE(txt.str().find("weighted avg"), std::string::npos);
  EXPECT_NE(txt.str().find("0.67"), std::string::npos);
}
