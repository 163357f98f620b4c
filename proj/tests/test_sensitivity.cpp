#include <gtest/gtest.h>

#include "antbounds/error.hpp"
#include "antbounds/inference.hpp"
#include "antbounds/sensitivity.hpp"

using namespace antbounds;

namespace {

const SignRegime kOpposite = SignRegime::make(1, -1);

std::vector<SweepPoint> pis(std::initializer_list<double> values) {
  std::vector<SweepPoint> out;
  for (double v : values) out.push_back({v, std::nullopt});
  return out;
}

}  // namespace

TEST(Sweep, ReadingApplication) {
  const auto res = sensitivity_sweep(0.013, 0.0046, 1000,
                                     pis({0.9, 0.1, 0.25, 0.5, 0.57, 0.75}), kOpposite, 0.95);
  ASSERT_EQ(res.rows.size(), 6u);
  const double expected[] = {0.0033193, 0.0023354, 0.00090295, 0.00055724, -0.00022908,
                             -0.00078572};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(res.rows[i].cs_lower, expected[i], 1e-7) << i;
    EXPECT_EQ(res.rows[i].set_upper, 0.013);
  }
  EXPECT_EQ(res.rows.front().pi, 0.1);
  ASSERT_TRUE(res.cutoff_pi);
  EXPECT_EQ(*res.cutoff_pi, 0.75);
  ASSERT_TRUE(res.refined_cutoff_pi);
  EXPECT_NEAR(*res.refined_cutoff_pi, 0.69415461636, 1e-8);
}

TEST(Sweep, RowsMatchSummaryMode) {
  const auto res = sensitivity_sweep(0.02, 0.004, 500, pis({0.0, 0.3, 0.6}), kOpposite, 0.9);
  for (const auto& row : res.rows) {
    const auto r = summary_mode_infer(0.02, 0.004, 500, row.pi, std::nullopt, kOpposite, 0.9);
    EXPECT_EQ(row.cs_lower, r.cs.lower);
    EXPECT_EQ(row.cs_upper, r.cs.upper);
    EXPECT_EQ(row.set_lower, r.interval.lower);
    EXPECT_EQ(row.c_n, r.cs.c_n);
  }
}

TEST(Sweep, MonotoneLowerEndpoint) {
  std::vector<SweepPoint> grid;
  for (int i = 0; i < 99; ++i) grid.push_back({i / 100.0, std::nullopt});
  const auto res = sensitivity_sweep(0.013, 0.0046, 1000, grid, kOpposite, 0.95);
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    EXPECT_LE(res.rows[i].cs_lower, res.rows[i - 1].cs_lower + 1e-15);
  }
}

TEST(Sweep, NoCutoffWhenRobust) {
  const auto res = sensitivity_sweep(0.035, 0.01, 1000, pis({0.0, 0.5, 0.9}), kOpposite, 0.95);
  EXPECT_FALSE(res.cutoff_pi);
  EXPECT_FALSE(res.refined_cutoff_pi);
}

TEST(Sweep, CutoffAtFirstGridPoint) {
  const auto res = sensitivity_sweep(0.001, 0.01, 1000, pis({0.0, 0.5}), kOpposite, 0.95);
  ASSERT_TRUE(res.cutoff_pi);
  EXPECT_EQ(*res.cutoff_pi, 0.0);
  EXPECT_FALSE(res.refined_cutoff_pi);
}

TEST(Sweep, EpsilonOrdering) {
  const auto res = sensitivity_sweep(
      0.013, 0.0046, 1000,
      {{0.5, 0.5}, {0.5, std::nullopt}, {0.2, 0.1}, {0.5, 0.0}}, kOpposite, 0.95);
  ASSERT_EQ(res.rows.size(), 4u);
  EXPECT_EQ(res.rows[0].pi, 0.2);
  EXPECT_FALSE(res.rows[1].epsilon);
  EXPECT_EQ(*res.rows[2].epsilon, 0.0);
  EXPECT_EQ(*res.rows[3].epsilon, 0.5);
  // epsilon = 0 reproduces the benchmark row.
  EXPECT_NEAR(res.rows[1].cs_lower, res.rows[2].cs_lower, 1e-15);
}

TEST(Sweep, Errors) {
  EXPECT_THROW(sensitivity_sweep(0.01, 0.01, 10, {}, kOpposite, 0.95), DomainError);
  EXPECT_THROW(sensitivity_sweep(0.01, 0.01, 10, pis({1.0}), kOpposite, 0.95), DomainError);
}
