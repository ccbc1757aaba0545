// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "phishgen/error.hpp"
#include "phishgen/metrics.hpp"

using namespace phishgen;

namespace {

// Reduced fraction, evaluated only at the end.
struct Ratio {
  std::uint64_t num, den;
  Ratio(std::uint64_t n, std::uint64_t d) : num(n / std::gcd(n, d)), den(d / std::gcd(n, d)) {}
  double value() const { return static_cast<double>(static_cast<long double>(num) / den); }
};

}  // namespace

TEST(Metrics, HandComputedTable) {
  const auto r = score({3, 1, 4, 2});
  EXPECT_DOUBLE_EQ(r.accuracy, 0.7);
  EXPECT_DOUBLE_EQ(*r.precision, 0.75);
  EXPECT_DOUBLE_EQ(*r.recall, 0.6);
  EXPECT_NEAR(*r.f1, 2.0 / 3.0, 1e-12);
}

TEST(Metrics, MatchesRationalOracle) {
  std::mt19937_64 gen(2024);
  for (int i = 0; i < 200; ++i) {
    ConfusionCounts c{gen() % 1000 + 1, gen() % 1000, gen() % 1000, gen() % 1000};
    const auto r = score(c);
    EXPECT_NEAR(r.accuracy, Ratio(c.tp + c.tn, c.total()).value(), 1e-12);
    EXPECT_NEAR(*r.precision, Ratio(c.tp, c.tp + c.fp).value(), 1e-12);
    if (c.tp + c.fn) EXPECT_NEAR(*r.recall, Ratio(c.tp, c.tp + c.fn).value(), 1e-12);
    EXPECT_NEAR(*r.f1, Ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn).value(), 1e-12);
  }
}

TEST(Metrics, PerfectAndDegenerate) {
  const auto perfect = score({5, 0, 5, 0});
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(*perfect.precision, 1.0);
  EXPECT_EQ(*perfect.recall, 1.0);
  EXPECT_EQ(*perfect.f1, 1.0);

  const auto no_positive_predictions = score({0, 0, 7, 3});
  EXPECT_FALSE(no_positive_predictions.precision);
  EXPECT_EQ(*no_positive_predictions.recall, 0.0);
  EXPECT_FALSE(no_positive_predictions.f1);

  const auto all_negative = score({0, 0, 9, 0});
  EXPECT_EQ(all_negative.accuracy, 1.0);
  EXPECT_FALSE(all_negative.precision);
  EXPECT_FALSE(all_negative.recall);

  EXPECT_THROW(score({0, 0, 0, 0}), Error);
}

TEST(Metrics, TallyCountsPairs) {
  using V = Verdict;
  const auto c = tally({{V::phishing, V::phishing},
                        {V::phishing, V::legitimate},
                        {V::legitimate, V::phishing},
                        {V::legitimate, V::legitimate},
                        {V::legitimate, V::legitimate}});
  EXPECT_EQ(c, (ConfusionCounts{1, 1, 2, 1}));
  EXPECT_THROW(tally({}), Error);
}

TEST(Metrics, ParsesVerdictFiles) {
  const auto rows = parse_verdicts("id,actual,predicted\na,phishing,legit\nb;1;1\nc\tbenign\tnegative\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].actual, Verdict::phishing);
  EXPECT_EQ(rows[0].predicted, Verdict::legitimate);
  EXPECT_EQ(rows[1].predicted, Verdict::phishing);
  EXPECT_EQ(rows[2].actual, Verdict::legitimate);
  EXPECT_THROW(parse_verdicts("a,phishing,maybe\n"), Error);
}

TEST(Metrics, JsonKeepsUndefinedAsNull) {
  const auto j = to_json(score({0, 0, 4, 0}));
  EXPECT_TRUE(j["precision"].is_null());
  EXPECT_EQ(j["accuracy"], 1.0);
}
