#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "antbounds/error.hpp"
#include "antbounds/panel.hpp"

using namespace antbounds;

namespace {

TwoPeriodPanel wide(const std::string& csv) {
  std::istringstream in(csv);
  return load_two_period(in, Layout::kWide);
}

TwoPeriodPanel long_panel(const std::string& csv) {
  std::istringstream in(csv);
  return load_two_period(in, Layout::kLong);
}

template <typename F>
ParseError parse_failure(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a ParseError";
  return ParseError(0, "", "");
}

TwoPeriodPanel random_panel(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> z;
  std::vector<TwoPeriodRecord> rows;
  for (std::size_t i = 0; i < n; ++i) {
    const int d = i < 2 ? 0 : (i < 4 ? 1 : static_cast<int>(rng() % 2));
    const double y0 = z(rng);
    rows.push_back({"u" + std::to_string(i), y0, 0.5 * y0 + z(rng) + d, d, std::nullopt});
  }
  return TwoPeriodPanel(std::move(rows));
}

}  // namespace

TEST(LoadTwoPeriod, WideBasic) {
  const auto p = wide("unit_id,y0,y1,d\na,1.0,3.0,1\nb,0.0,1.0,0\n");
  EXPECT_EQ(p.size(), 2u);
  EXPECT_EQ(p.n_treated(), 1u);
  EXPECT_DOUBLE_EQ(treatment_ratio(p), 0.5);
  EXPECT_FALSE(p.has_strata());
}

TEST(LoadTwoPeriod, WideToleratesBomCrlfAndColumnOrder) {
  const auto p = wide("\xEF\xBB\xBF" "d,unit_id,y1,y0\r\n1,a,3,1\r\n0,b,1,0\r\n");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p.rows()[0].unit_id, "a");
  EXPECT_EQ(p.rows()[0].y0, 1.0);
  EXPECT_EQ(p.rows()[0].y1, 3.0);
}

TEST(LoadTwoPeriod, WideWithStrata) {
  const auto p = wide("unit_id,y0,y1,d,stratum\na,1,3,1,x\nb,0,1,0,x\nc,1,2,1,y\nd,0,0,0,y\n");
  EXPECT_TRUE(p.has_strata());
  EXPECT_EQ(p.strata(), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(p.stratum_rows("y").size(), 2u);
}

TEST(LoadTwoPeriod, LongBasic) {
  const auto p = long_panel("unit_id,t,y,d\na,0,1,1\nb,1,1,0\na,1,3,1\nb,0,0,0\n");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p.rows()[0].y0, 1.0);
  EXPECT_EQ(p.rows()[0].y1, 3.0);
  EXPECT_EQ(p.rows()[1].y0, 0.0);
}

TEST(LoadTwoPeriod, LongMissingPeriod) {
  const auto e = parse_failure([] { long_panel("unit_id,t,y,d\na,0,1,1\nb,0,0,0\nb,1,1,0\n"); });
  EXPECT_NE(std::string(e.what()).find("missing period"), std::string::npos);
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.field(), "t");
}

TEST(LoadTwoPeriod, LongTreatmentNotConstant) {
  const auto e = parse_failure(
      [] { long_panel("unit_id,t,y,d\na,0,1,1\na,1,3,0\nb,0,0,0\nb,1,1,0\n"); });
  EXPECT_NE(std::string(e.what()).find("treatment not constant within unit"), std::string::npos);
  EXPECT_EQ(e.line(), 3u);
  EXPECT_EQ(e.field(), "d");
}

TEST(LoadTwoPeriod, LongDuplicatePeriod) {
  const auto e = parse_failure(
      [] { long_panel("unit_id,t,y,d\na,0,1,1\na,0,2,1\na,1,3,1\nb,0,0,0\nb,1,1,0\n"); });
  EXPECT_NE(std::string(e.what()).find("duplicate (unit, period)"), std::string::npos);
  EXPECT_EQ(e.line(), 3u);
}

TEST(LoadTwoPeriod, Errors) {
  EXPECT_EQ(parse_failure([] { wide("unit_id,y0,d\na,1,1\n"); }).field(), "y1");
  const auto nonnum = parse_failure([] { wide("unit_id,y0,y1,d\na,1,x,1\nb,0,1,0\n"); });
  EXPECT_EQ(nonnum.line(), 2u);
  EXPECT_EQ(nonnum.field(), "y1");
  EXPECT_NE(std::string(nonnum.what()).find("non-numeric"), std::string::npos);
  const auto bad_d = parse_failure([] { wide("unit_id,y0,y1,d\na,1,2,2\nb,0,1,0\n"); });
  EXPECT_EQ(bad_d.field(), "d");
  EXPECT_EQ(parse_failure([] { wide("unit_id,y0,y1,d\na,1,2,1\na,0,1,0\n"); }).field(),
            "unit_id");
  EXPECT_EQ(parse_failure([] { wide("unit_id,y0,y1,d,extra\na,1,2,1,0\n"); }).field(),
            "extra");
  EXPECT_THROW(wide(""), ParseError);
  // All-treated panels violate the panel invariant.
  EXPECT_THROW(wide("unit_id,y0,y1,d\na,1,2,1\nb,0,1,1\n"), DataError);
  EXPECT_THROW(wide("unit_id,y0,y1,d\na,1,nan,1\nb,0,1,0\n"), DataError);
}

TEST(TwoPeriodPanel, Invariants) {
  EXPECT_THROW(TwoPeriodPanel({{"a", 1, 2, 1, {}}, {"a", 0, 1, 0, {}}}), DataError);
  EXPECT_THROW(TwoPeriodPanel({{"a", 1, 2, 3, {}}, {"b", 0, 1, 0, {}}}), DataError);
  EXPECT_THROW(TwoPeriodPanel({{"a", 1, 2, 0, {}}, {"b", 0, 1, 0, {}}}), DataError);
}

TEST(TreatmentRatio, Examples) {
  std::vector<TwoPeriodRecord> rows;
  for (int i = 0; i < 5; ++i) rows.push_back({"u" + std::to_string(i), 0, 0, i < 2 ? 1 : 0, {}});
  EXPECT_DOUBLE_EQ(treatment_ratio(TwoPeriodPanel(rows)), 0.4);
  EXPECT_DOUBLE_EQ(treatment_ratio(TwoPeriodPanel({{"a", 0, 0, 1, {}}, {"b", 0, 0, 0, {}}})),
                   0.5);
}

TEST(GroupStats, ConstantGroups) {
  const TwoPeriodPanel p({{"a", 1, 3, 1, {}}, {"b", 1, 3, 1, {}}, {"c", 0, 1, 0, {}},
                          {"d", 0, 1, 0, {}}});
  const auto s = group_stats(p, GTransform::identity());
  EXPECT_EQ(s.mean[1][1], 3.0);
  EXPECT_EQ(s.mean[1][0], 1.0);
  EXPECT_EQ(s.mean[0][1], 1.0);
  EXPECT_EQ(s.mean[0][0], 0.0);
  for (int d = 0; d < 2; ++d) {
    EXPECT_EQ(s.var[d][0], 0.0);
    EXPECT_EQ(s.var[d][1], 0.0);
    EXPECT_EQ(s.cov[d], 0.0);
  }
  EXPECT_EQ(s.p_hat, 0.5);
}

TEST(GroupStats, HandVariance) {
  const TwoPeriodPanel p({{"a", 0, 2, 1, {}}, {"b", 0, 4, 1, {}}, {"c", 0, 1, 0, {}},
                          {"d", 0, 1, 0, {}}});
  const auto s = group_stats(p, GTransform::identity());
  EXPECT_DOUBLE_EQ(s.mean[1][1], 3.0);
  EXPECT_DOUBLE_EQ(s.var[1][1], 2.0);
}

TEST(GroupStats, IndicatorTransform) {
  const TwoPeriodPanel p({{"a", 0, 1, 1, {}}, {"b", 0, 3, 1, {}}, {"c", 0, 1, 0, {}},
                          {"d", 0, 1, 0, {}}});
  EXPECT_DOUBLE_EQ(group_stats(p, GTransform::indicator(2.0)).mean[1][1], 0.5);
  // Ties at the threshold count as 1.
  EXPECT_EQ(GTransform::indicator(2.0)(2.0), 1.0);
  EXPECT_EQ(GTransform::indicator(2.0)(2.0000001), 0.0);
}

TEST(GroupStats, InsufficientGroupSize) {
  const TwoPeriodPanel p({{"a", 0, 1, 1, {}}, {"b", 0, 3, 0, {}}, {"c", 0, 1, 0, {}}});
  try {
    group_stats(p, GTransform::identity());
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient group size"), std::string::npos);
  }
}

TEST(GroupStats, PermutationInvariantAndMatchesOnePassOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_panel(rng, 30);
    auto rows = p.rows();
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto a = group_stats(p, GTransform::identity());
    const auto b = group_stats(TwoPeriodPanel(rows), GTransform::identity());
    double sum[2][2] = {{0, 0}, {0, 0}};
    double cnt[2] = {0, 0};
    for (const auto& r : p.rows()) {
      sum[r.d][0] += r.y0;
      sum[r.d][1] += r.y1;
      cnt[r.d] += 1;
    }
    for (int d = 0; d < 2; ++d) {
      for (int t = 0; t < 2; ++t) {
        EXPECT_NEAR(a.mean[d][t], b.mean[d][t], 1e-12);
        EXPECT_NEAR(a.var[d][t], b.var[d][t], 1e-12);
        EXPECT_NEAR(a.mean[d][t], sum[d][t] / cnt[d], 1e-12);
      }
      EXPECT_NEAR(a.cov[d], b.cov[d], 1e-12);
      EXPECT_LE(std::abs(a.cov[d]), std::sqrt(a.var[d][0] * a.var[d][1]) + 1e-12);
    }
  }
}

TEST(GTransform, ParseAndDescribe) {
  EXPECT_EQ(parse_gtransform("identity").kind(), GTransform::Kind::kIdentity);
  const auto g = parse_gtransform("indicator:1.5");
  EXPECT_EQ(g.kind(), GTransform::Kind::kIndicator);
  EXPECT_EQ(g.threshold(), 1.5);
  EXPECT_THROW(parse_gtransform("log"), DomainError);
  EXPECT_THROW(parse_gtransform("indicator:abc"), DomainError);
  const auto sq = GTransform::custom("square", [](double y) { return y * y; });
  EXPECT_EQ(sq(3.0), 9.0);
  EXPECT_EQ(parse_layout("long"), Layout::kLong);
  EXPECT_THROW(parse_layout("tall"), DomainError);
}

TEST(LoadCohort, Basic) {
  std::istringstream in(
      "unit_id,t,y,e\na,1,0,2\na,2,1,2\nb,1,0,inf\nb,2,0.5,inf\nc,1,1,1\nc,2,2,1\n");
  const auto p = load_cohort(in);
  EXPECT_EQ(p.periods(), 2);
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(p.cohort_size(2), 1u);
  EXPECT_EQ(p.never_treated_size(), 1u);
  EXPECT_DOUBLE_EQ(p.share_treated_by(2), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(p.share_treated_by(1), 1.0 / 3.0);
  EXPECT_EQ(p.rows()[0].outcomes, (std::vector<double>{0.0, 1.0}));
}

TEST(LoadCohort, Errors) {
  std::istringstream missing("unit_id,t,y,e\na,1,0,2\nb,1,0,inf\nb,2,1,inf\n");
  EXPECT_THROW(load_cohort(missing), ParseError);
  std::istringstream no_never("unit_id,t,y,e\na,1,0,2\na,2,1,2\n");
  EXPECT_THROW(load_cohort(no_never), DataError);
  std::istringstream bad_e("unit_id,t,y,e\na,1,0,x\na,2,1,x\n");
  EXPECT_THROW(load_cohort(bad_e), ParseError);
  EXPECT_THROW(CohortPanel({{"a", {1.0}, std::nullopt}}), DataError);
  EXPECT_THROW(CohortPanel({{"a", {1.0, 2.0}, 3}, {"b", {1.0, 2.0}, std::nullopt}}), DataError);
}
