#pragma once

#include <cstddef>
#include <optional>

#include "antbounds/did_bounds.hpp"
#include "antbounds/panel.hpp"

namespace antbounds {

/// Standard deviations of the sqrt(n)-scaled lower and upper bound
/// estimators. The two estimators are proportional to m-hat, so their
/// correlation is one and is not stored.
struct VarianceComponents {
  double sigma_l = 0.0;
  double sigma_u = 0.0;
  double sigma = 0.0;  // max(sigma_l, sigma_u)
  std::size_t n = 0;
  /// sqrt(n)-scaled standard deviation of m-hat itself.
  double sigma_m = 0.0;

  double standard_error() const;
};

struct ConfidenceSet {
  double lower = 0.0;
  double upper = 0.0;
  double c_n = 0.0;
  double alpha = 0.0;
  double delta_hat = 0.0;

  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

/// Plug-in variances for the bound estimators of a panel. The m-scale part is
/// (s11^2 + s10^2 - 2 cov1)/p + (s01^2 + s00^2 - 2 cov0)/(1 - p); each
/// endpoint scales it by the square of its multiplier (e.g. 1/(1 + pi)^2).
/// pi_hat is treated as nonrandom.
VarianceComponents bound_variances(const TwoPeriodPanel& panel,
                                   const GTransform& g, double pi_hat,
                                   const SignRegime& regime,
                                   std::optional<double> epsilon = std::nullopt);

/// Solves Phi(C + sqrt(n) delta_hat / sigma) - Phi(-C) = alpha for C.
/// The root lies between the one- and two-sided normal critical values.
double critical_value_cn(double delta_hat, double sigma, std::size_t n,
                         double alpha);

/// [mu_l - C_n sigma / sqrt(n), mu_u + C_n sigma / sqrt(n)].
ConfidenceSet confidence_set(double mu_l_hat, double mu_u_hat,
                             const VarianceComponents& vc, double alpha);

/// Positive root of Phi(t) - Phi(-t/2) = alpha.
double tstar(double alpha);

enum class RobustVerdict { kRobustlyRejected, kNotRobust };

const char* to_string(RobustVerdict v) noexcept;

/// Whether H0: mu = 0 is rejected for every pi, given the no-anticipation DID
/// t-statistic. Only defined when mu and tau have opposite signs.
RobustVerdict robust_null_check(double t_tilde, double alpha,
                                const SignRegime& regime);

struct InferenceResult {
  IdentifiedInterval interval;
  VarianceComponents variances;
  ConfidenceSet cs;
  /// m-hat divided by its standard error.
  double t_tilde = 0.0;
  std::optional<RobustVerdict> verdict;
};

/// Inference from (m-hat, SE) alone. `se` is the standard error of m-hat;
/// n only sets the sqrt(n) scale and does not change the result.
InferenceResult summary_mode_infer(double m_hat, double se, std::size_t n,
                                   double pi, std::optional<double> epsilon,
                                   const SignRegime& regime, double alpha);

/// Full pipeline on a panel: estimand, identified set, variances and CS.
InferenceResult panel_infer(const TwoPeriodPanel& panel, const GTransform& g,
                            double pi, std::optional<double> epsilon,
                            const SignRegime& regime, double alpha);

}  // namespace antbounds
