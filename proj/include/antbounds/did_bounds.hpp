#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>

#include "antbounds/panel.hpp"

namespace antbounds {

/// Maintained signs of the treatment effect (mu) and the anticipatory effect
/// (tau). Only their product enters the bounds.
struct SignRegime {
  int sign_mu = 1;   // +1 or -1
  int sign_tau = 1;  // +1, -1 or 0

  /// Validates the sign values.
  static SignRegime make(int sign_mu, int sign_tau);

  /// sgn(tau * mu) in {-1, 0, +1}.
  int product() const noexcept { return sign_mu * sign_tau; }
  bool operator==(const SignRegime&) const = default;
};

enum class AssumptionTag {
  kBenchmark,
  kImperfect,
  kStaggered,
  kCic,
  kBoundedOutcome,
  kTrimming
};

std::string to_string(AssumptionTag tag);

/// Closed interval with the assumptions that produced it. Endpoints may be
/// infinite only for changes-in-changes results, where they stand for an
/// unbounded side.
struct IdentifiedInterval {
  double lower = 0.0;
  double upper = 0.0;
  AssumptionTag tag = AssumptionTag::kBenchmark;
  double pi_used = 0.0;
  std::optional<double> epsilon_used;
  std::optional<SignRegime> regime;

  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
  bool bounded() const noexcept;
  double width() const noexcept { return upper - lower; }
};

// Bounding policies for the anticipation probability among the treated.
struct PiConstant {
  double value = 0.0;
};
struct PiTreatmentRatio {};
/// Per-stratum bounds. An empty map means "treatment ratio within stratum".
struct PiPerStratum {
  std::map<std::string, double> values;
};
/// pi(e, s) = delta^(e - s) * P[E <= e].
struct PiStaggered {
  double delta = 0.5;
};
using PiPolicy = std::variant<PiConstant, PiTreatmentRatio, PiPerStratum,
                              PiStaggered>;

std::string describe(const PiPolicy& policy);

/// Resolves a scalar pi for a two-period panel. Per-stratum and staggered
/// policies have no scalar resolution and raise DomainError.
double resolve_pi(const PiPolicy& policy, const TwoPeriodPanel& panel);

/// Resolves pi for every stratum of the panel.
std::map<std::string, double> resolve_pi_per_stratum(
    const PiPolicy& policy, const TwoPeriodPanel& panel);

/// m_g = (mean11 - mean10) - (mean01 - mean00).
double did_estimand(const GroupStats& stats);
double did_estimand(const TwoPeriodPanel& panel, const GTransform& g);

/// Multipliers applied to m to get the two interval endpoints, unsorted.
/// Benchmark: {1, 1/(1 - s*pi)}; imperfect: {1/(1 + s*pi*eps),
/// 1/(1 - s*pi*(1 - eps))}.
struct EndpointFactors {
  double first = 1.0;
  double second = 1.0;
};

EndpointFactors benchmark_factors(double pi, const SignRegime& regime);
EndpointFactors imperfect_factors(double pi, double epsilon,
                                  const SignRegime& regime);

/// Interval m * [min(k1, k2), max(k1, k2)], sorted for either sign of m.
IdentifiedInterval scale_interval(double m, const EndpointFactors& k);

/// Benchmark identified set under perfect anticipation.
IdentifiedInterval identified_set_benchmark(double m, double pi,
                                            const SignRegime& regime);

/// Identified set when a share epsilon of anticipators guess their future
/// treatment status wrongly. epsilon = 0 reproduces the benchmark set.
IdentifiedInterval identified_set_imperfect(double m, double pi,
                                            double epsilon,
                                            const SignRegime& regime);

/// Sample analog of m_g(e, s, t): cohort-e change from s to t minus the
/// never-treated change. Periods are 1-based and must satisfy s < e <= t <= T.
double staggered_estimand(const CohortPanel& panel, int e, int s, int t,
                          const GTransform& g);

/// delta^(e - s) times the share of units first treated by period e.
double staggered_pi(int e, int s, double delta, const CohortPanel& panel);

/// Benchmark interval applied to m_g(e, s, t) with pi(e, s).
IdentifiedInterval identified_set_staggered(double m, double pi,
                                            const SignRegime& regime);

/// Per-stratum DID estimand; the propensity within each stratum is the
/// empirical treatment frequency of that stratum.
std::map<std::string, double> conditional_estimand(const TwoPeriodPanel& panel,
                                                   const GTransform& g);

std::map<std::string, IdentifiedInterval> conditional_identified_sets(
    const TwoPeriodPanel& panel, const GTransform& g, const PiPolicy& policy,
    const SignRegime& regime);

/// True when the sign of m contradicts the declared sign of mu.
bool sign_conflict(double m, const SignRegime& regime) noexcept;

/// Flips sign_mu to match sign(m) when they conflict (m = 0 never flips).
SignRegime auto_flip_sign(double m, const SignRegime& regime) noexcept;

}  // namespace antbounds
