#include <gtest/gtest.h>

#include <cmath>

#include "antbounds/error.hpp"
#include "antbounds/inference.hpp"
#include "antbounds/numerics.hpp"

using namespace antbounds;
using numerics::std_normal_cdf;

namespace {

const SignRegime kOpposite = SignRegime::make(1, -1);
const SignRegime kSame = SignRegime::make(1, 1);

TwoPeriodPanel diffs_panel() {
  // Treated diffs {1, 3}, control diffs {0, 2}.
  return TwoPeriodPanel({{"a", 0, 1, 1, {}}, {"b", 0, 3, 1, {}}, {"c", 0, 0, 0, {}},
                         {"d", 0, 2, 0, {}}});
}

}  // namespace

TEST(BoundVariances, HandExample) {
  const auto vc = bound_variances(diffs_panel(), GTransform::identity(), 0.5, kOpposite);
  EXPECT_NEAR(vc.sigma_m * vc.sigma_m, 8.0, 1e-12);
  EXPECT_NEAR(vc.sigma_u * vc.sigma_u, 8.0, 1e-12);
  EXPECT_NEAR(vc.sigma_l, std::sqrt(8.0) / 1.5, 1e-12);
  EXPECT_EQ(vc.sigma, vc.sigma_u);
  EXPECT_EQ(vc.n, 4u);
  EXPECT_NEAR(vc.standard_error(), std::sqrt(8.0) / 2.0, 1e-12);

  const auto same = bound_variances(diffs_panel(), GTransform::identity(), 0.5, kSame);
  EXPECT_NEAR(same.sigma_u, std::sqrt(8.0) * 2.0, 1e-12);
  EXPECT_NEAR(same.sigma_l, std::sqrt(8.0), 1e-12);
}

TEST(BoundVariances, Degenerate) {
  const TwoPeriodPanel p({{"a", 0, 2, 1, {}}, {"b", 1, 3, 1, {}}, {"c", 0, 1, 0, {}},
                          {"d", 4, 5, 0, {}}});
  const auto vc = bound_variances(p, GTransform::identity(), 0.3, kOpposite);
  EXPECT_NEAR(vc.sigma_u, 0.0, 1e-12);
  EXPECT_THROW(confidence_set(0.5, 1.0, vc, 0.95), DomainError);
  EXPECT_THROW(bound_variances(p, GTransform::identity(), 1.0, kSame), DomainError);
}

TEST(CriticalValue, Oracles) {
  // Root values from a 30-digit solve of Phi(C + r) - Phi(-C) = 0.95.
  EXPECT_NEAR(critical_value_cn(0.0, 1.0, 100, 0.95), 1.95996398454005, 1e-9);
  EXPECT_NEAR(critical_value_cn(0.1, 1.0, 100, 0.95), 1.68147744232815, 1e-9);
  EXPECT_NEAR(critical_value_cn(0.5, 1.0, 1, 0.95), 1.76971284735654, 1e-9);
  EXPECT_NEAR(critical_value_cn(3.0, 1.0, 1, 0.95), 1.64487012440453, 1e-9);
  EXPECT_NEAR(critical_value_cn(1e6, 1.0, 1, 0.95), 1.64485362695147, 1e-9);
}

TEST(CriticalValue, PropertiesAndErrors) {
  double prev = critical_value_cn(0.0, 1.0, 1, 0.9);
  for (double r = 0.05; r < 8.0; r += 0.05) {
    const double c = critical_value_cn(r, 1.0, 1, 0.9);
    EXPECT_LE(c, prev + 1e-12);
    EXPECT_GE(c, numerics::std_normal_quantile(0.9) - 1e-9);
    EXPECT_NEAR(std_normal_cdf(c + r) - std_normal_cdf(-c), 0.9, 1e-10);
    prev = c;
  }
  EXPECT_THROW(critical_value_cn(0.1, 1.0, 10, 0.5), DomainError);
  EXPECT_THROW(critical_value_cn(0.1, 1.0, 10, 1.0), DomainError);
  EXPECT_THROW(critical_value_cn(0.1, 0.0, 10, 0.95), DomainError);
  EXPECT_THROW(critical_value_cn(-0.1, 1.0, 10, 0.95), DomainError);
}

TEST(ConfidenceSet, PointIdentifiedLimit) {
  VarianceComponents vc;
  vc.sigma_l = vc.sigma_u = vc.sigma = vc.sigma_m = 2.0;
  vc.n = 16;
  const auto cs = confidence_set(1.0, 1.0, vc, 0.95);
  EXPECT_NEAR(cs.lower, 1.0 - 1.95996398454005 * 0.5, 1e-9);
  EXPECT_NEAR(cs.upper, 1.0 + 1.95996398454005 * 0.5, 1e-9);
  EXPECT_EQ(cs.delta_hat, 0.0);
  EXPECT_THROW(confidence_set(1.0, 0.5, vc, 0.95), DomainError);
}

TEST(ConfidenceSet, EqualExtension) {
  VarianceComponents vc;
  vc.sigma_l = 1.0;
  vc.sigma_u = vc.sigma = vc.sigma_m = 3.0;
  vc.n = 9;
  const auto cs = confidence_set(0.2, 0.7, vc, 0.9);
  EXPECT_NEAR(0.2 - cs.lower, cs.upper - 0.7, 1e-14);
  EXPECT_NEAR(0.2 - cs.lower, cs.c_n * 1.0, 1e-14);
  EXPECT_GE(cs.c_n, numerics::std_normal_quantile(0.9));
  EXPECT_LE(cs.c_n, numerics::std_normal_quantile(0.95));
}

TEST(PanelInfer, HandExample) {
  const auto r = panel_infer(diffs_panel(), GTransform::identity(), 0.5, std::nullopt,
                             kOpposite, 0.95);
  EXPECT_NEAR(r.interval.lower, 2.0 / 3.0, 1e-14);
  EXPECT_EQ(r.interval.upper, 1.0);
  // 30-digit oracle: C = 1.85564982871393, extension C * sqrt(8) / 2.
  EXPECT_NEAR(r.cs.c_n, 1.85564982871393094, 1e-9);
  EXPECT_NEAR(r.cs.lower, -1.95761848811588525, 1e-9);
  EXPECT_NEAR(r.cs.upper, 3.62428515478255192, 1e-9);
  EXPECT_NEAR(r.t_tilde, 1.0 / std::sqrt(2.0), 1e-12);
  ASSERT_TRUE(r.verdict);
  EXPECT_EQ(*r.verdict, RobustVerdict::kNotRobust);
}

TEST(Tstar, Oracles) {
  EXPECT_NEAR(tstar(0.95), 3.29914690427561, 1e-9);
  EXPECT_NEAR(tstar(0.6), 1.17074305862284, 1e-9);
  EXPECT_NEAR(tstar(0.99), 4.65281860937184, 1e-9);
  for (double a : {0.6, 0.99}) {
    const double t = tstar(a);
    EXPECT_NEAR(std_normal_cdf(t) - std_normal_cdf(-t / 2), a, 1e-10);
  }
  EXPECT_THROW(tstar(0.4), DomainError);
  EXPECT_THROW(tstar(1.0), DomainError);
}

TEST(RobustNullCheck, Examples) {
  EXPECT_EQ(robust_null_check(3.5, 0.95, kOpposite), RobustVerdict::kRobustlyRejected);
  EXPECT_EQ(robust_null_check(2.0, 0.95, kOpposite), RobustVerdict::kNotRobust);
  EXPECT_EQ(robust_null_check(-3.5, 0.95, kOpposite), RobustVerdict::kRobustlyRejected);
  try {
    robust_null_check(3.5, 0.95, kSame);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("robust-null check requires opposite signs"),
              std::string::npos);
  }
  EXPECT_STREQ(to_string(RobustVerdict::kNotRobust), "not-robust");
}

TEST(RobustNullCheck, AgreesWithSweep) {
  // Above t*, zero stays outside the CS for every pi on a fine grid.
  for (double t : {3.0, 3.31, 4.0}) {
    bool zero_outside = true;
    for (double pi = 0.0; pi < 0.9995; pi += 0.001) {
      const auto r = summary_mode_infer(t, 1.0, 100, pi, std::nullopt, kOpposite, 0.95);
      if (r.cs.contains(0.0)) zero_outside = false;
    }
    const bool rejected =
        robust_null_check(t, 0.95, kOpposite) == RobustVerdict::kRobustlyRejected;
    EXPECT_EQ(zero_outside, rejected) << t;
  }
}

TEST(SummaryMode, ReadingApplication) {
  auto r = summary_mode_infer(0.013, 0.0046, 1000, 0.5, std::nullopt, kOpposite, 0.95);
  EXPECT_NEAR(r.interval.lower, 0.013 / 1.5, 1e-15);
  EXPECT_EQ(r.interval.upper, 0.013);
  EXPECT_NEAR(r.cs.lower, 0.00090295, 1e-7);
  EXPECT_NEAR(r.cs.upper, 0.020764, 1e-6);
  EXPECT_NEAR(r.cs.c_n, 1.687765, 1e-5);
  EXPECT_EQ(*r.verdict, RobustVerdict::kNotRobust);

  r = summary_mode_infer(0.003, 0.0033, 1000, 0.5, std::nullopt, kOpposite, 0.95);
  EXPECT_NEAR(r.interval.lower, 0.002, 1e-15);
  EXPECT_NEAR(r.cs.lower, -0.0040415, 1e-6);
  EXPECT_NEAR(r.cs.upper, 0.0090415, 1e-6);
}

TEST(SummaryMode, InvariantToN) {
  const auto a = summary_mode_infer(0.013, 0.0046, 10, 0.5, std::nullopt, kOpposite, 0.95);
  const auto b = summary_mode_infer(0.013, 0.0046, 100000, 0.5, std::nullopt, kOpposite, 0.95);
  EXPECT_NEAR(a.cs.lower, b.cs.lower, 1e-12);
  EXPECT_NEAR(a.cs.upper, b.cs.upper, 1e-12);
}

TEST(SummaryMode, Errors) {
  EXPECT_THROW(summary_mode_infer(0.01, 0.0, 10, 0.5, std::nullopt, kOpposite, 0.95),
               DomainError);
  EXPECT_THROW(summary_mode_infer(0.01, 0.01, 10, 1.0, std::nullopt, kSame, 0.95),
               DomainError);
  EXPECT_THROW(summary_mode_infer(0.01, 0.01, 10, 0.5, 1.2, kSame, 0.95), DomainError);
  EXPECT_THROW(summary_mode_infer(0.01, 0.01, 10, 0.5, std::nullopt, kSame, 0.3),
               DomainError);
}

TEST(SummaryMode, NegativeMSwapsSides) {
  const auto r = summary_mode_infer(-0.9, 0.1, 100, 0.5, std::nullopt, kSame, 0.95);
  EXPECT_NEAR(r.interval.lower, -1.8, 1e-12);
  EXPECT_NEAR(r.interval.upper, -0.9, 1e-12);
  EXPECT_NEAR(r.variances.sigma_l, 2.0, 1e-12);
  EXPECT_NEAR(r.variances.sigma_u, 1.0, 1e-12);
  EXPECT_FALSE(r.verdict);
}
