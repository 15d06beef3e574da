#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "sentinel/core/csv.hpp"
#include "sentinel/core/numfmt.hpp"
#include "sentinel/core/random.hpp"

using namespace sentinel;

namespace {

std::vector<csv::Record> read_all(const std::string& text) {
  std::istringstream in(text);
  csv::Reader r(in);
  std::vector<csv::Record> out;
  csv::Record rec;
  while (r.next(rec)) out.push_back(rec);
  return out;
}

}  // namespace

TEST(Csv, PlainAndQuoted) {
  const auto rows = read_all("a,b,c\n1,\"x, y\",\"say \"\"hi\"\"\"\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (csv::Record{"1", "x, y", "say \"hi\""}));
}

TEST(Csv, CrlfAndBom) {
  const auto rows = read_all("\xEF\xBB\xBFname,v\r\nx,1\r\ny,\r\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (csv::Record{"name", "v"}));
  EXPECT_EQ(rows[2], (csv::Record{"y", ""}));
}

TEST(Csv, EmbeddedNewlineKeepsLineNumbers) {
  std::istringstream in("h\n\"a\nb\"\nc\n");
  csv::Reader r(in);
  csv::Record rec;
  ASSERT_TRUE(r.next(rec));
  ASSERT_TRUE(r.next(rec));
  EXPECT_EQ(rec[0], "a\nb");
  ASSERT_TRUE(r.next(rec));
  EXPECT_EQ(r.record_line(), 4u);
}

TEST(Csv, MalformedQuotesThrow) {
  EXPECT_THROW(read_all("a\n\"open\n"), ParseError);
  EXPECT_THROW(read_all("a\n\"x\"y\n"), ParseError);
  EXPECT_THROW(read_all("a\nx\"y\n"), ParseError);
}

TEST(Csv, WriteReadRoundTrip) {
  const csv::Record rec{"plain", "with,comma", "with \"quote\"", "line\nbreak", " padded ", ""};
  std::ostringstream os;
  csv::write_record(os, rec);
  const auto back = read_all(os.str());
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], rec);
}

TEST(NumFmt, ExactRoundTrip) {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(g) * std::pow(10.0, static_cast<int>(g() % 40) - 20);
    const auto back = parse_double(format_exact(v));
    ASSERT_TRUE(back);
    EXPECT_EQ(*back, v);
  }
  EXPECT_EQ(format_exact(0.1), "0.1");
  EXPECT_EQ(format_exact(1.0), "1");
}

TEST(NumFmt, StrictParsing) {
  EXPECT_FALSE(parse_double(""));
  EXPECT_FALSE(parse_double("1.5x"));
  EXPECT_FALSE(parse_double("nan"));
  EXPECT_FALSE(parse_double("inf"));
  EXPECT_EQ(*parse_double("+2.5"), 2.5);
  EXPECT_EQ(*parse_int<int>("42"), 42);
  EXPECT_FALSE(parse_int<int>("4.2"));
}

TEST(Random, SameSeedSameStream) {
  Rng a(99), b(99), c(100);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Random, IndexStaysInRangeAndCoversIt) {
  Rng r(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 5000; ++i) {
    const auto v = r.index(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Random, ShuffleIsAPermutation) {
  Rng r(3);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  r.shuffle(std::span<int>(v));
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Random, MixSeedSeparatesStreams) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 1000; ++s) seeds.insert(mix_seed(42, s));
  EXPECT_EQ(seeds.size(), 1000u);
  static_assert(mix_seed(1, 2) == mix_seed(1, 2));
}

TEST(Errors, KindsMapToExitCodesAndStatuses) {
  EXPECT_EQ(exit_code(ValidationError("x").kind()), 2);
  EXPECT_EQ(exit_code(IoError("x").kind()), 3);
  EXPECT_EQ(exit_code(InvariantError("x").kind()), 70);
  EXPECT_EQ(http_status(NotFoundError("x").kind()), 404);
  EXPECT_EQ(http_status(ConsentError("x").kind()), 403);
  EXPECT_EQ(http_status(DuplicateIdError("x").kind()), 409);
  EXPECT_EQ(http_status(UnavailableError("x").kind()), 503);
  EXPECT_EQ(http_status(TransportError("x", 5).kind()), 502);
}
