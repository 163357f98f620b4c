#include "antbounds/inference.hpp"

#include <algorithm>
#include <cmath>

#include "antbounds/error.hpp"
#include "antbounds/numerics.hpp"

namespace antbounds {

using numerics::std_normal_cdf;
using numerics::std_normal_quantile;

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0)) {
    throw DomainError("confidence level alpha must lie in (0.5, 1)");
  }
}

EndpointFactors factors_for(double pi, std::optional<double> epsilon,
                            const SignRegime& regime) {
  return epsilon ? imperfect_factors(pi, *epsilon, regime)
                 : benchmark_factors(pi, regime);
}

/// Assigns the endpoint multipliers to the lower and upper sides for the
/// sign of m, then scales sigma_m by each.
VarianceComponents scale_variances(double m, double sigma_m,
                                   const EndpointFactors& k, std::size_t n) {
  const double k_small = std::min(k.first, k.second);
  const double k_large = std::max(k.first, k.second);
  const double k_lower = m >= 0.0 ? k_small : k_large;
  const double k_upper = m >= 0.0 ? k_large : k_small;
  VarianceComponents vc;
  vc.sigma_m = sigma_m;
  vc.sigma_l = sigma_m * std::abs(k_lower);
  vc.sigma_u = sigma_m * std::abs(k_upper);
  vc.sigma = std::max(vc.sigma_l, vc.sigma_u);
  vc.n = n;
  return vc;
}

}  // namespace

double VarianceComponents::standard_error() const {
  return sigma / std::sqrt(static_cast<double>(n));
}

VarianceComponents bound_variances(const TwoPeriodPanel& panel,
                                   const GTransform& g, double pi_hat,
                                   const SignRegime& regime,
                                   std::optional<double> epsilon) {
  const auto stats = group_stats(panel, g);
  const double p = stats.p_hat;
  const double var_m = stats.diff_var(1) / p + stats.diff_var(0) / (1.0 - p);
  return scale_variances(did_estimand(stats), std::sqrt(std::max(var_m, 0.0)),
                         factors_for(pi_hat, epsilon, regime), panel.size());
}

double critical_value_cn(double delta_hat, double sigma, std::size_t n,
                         double alpha) {
  check_alpha(alpha);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("critical value needs a strictly positive sigma");
  }
  if (n == 0) throw DomainError("critical value needs n >= 1");
  if (!(delta_hat >= 0.0) || !std::isfinite(delta_hat)) {
    throw DomainError("interval width delta_hat must be finite and >= 0");
  }
  const double shift = std::sqrt(static_cast<double>(n)) * delta_hat / sigma;
  const double one_sided = std_normal_quantile(alpha);
  const double two_sided = std_normal_quantile(0.5 * (1.0 + alpha));
  auto f = [&](double c) {
    // Phi(c + shift) saturates at 1 long before the argument overflows.
    const double arg = std::min(c + shift, 40.0);
    return std_normal_cdf(arg) - std_normal_cdf(-c) - alpha;
  };
  const double root = numerics::solve_monotone(
      f, {one_sided - 0.1, two_sided + 0.1, 1e-12});
  return std::clamp(root, one_sided, two_sided);
}

ConfidenceSet confidence_set(double mu_l_hat, double mu_u_hat,
                             const VarianceComponents& vc, double alpha) {
  if (!(mu_l_hat <= mu_u_hat)) {
    throw DomainError("confidence set needs mu_l_hat <= mu_u_hat");
  }
  if (!(vc.sigma_l > 0.0 && vc.sigma_u > 0.0)) {
    throw DomainError(
        "bound estimators need strictly positive standard deviations");
  }
  ConfidenceSet cs;
  cs.alpha = alpha;
  cs.delta_hat = mu_u_hat - mu_l_hat;
  cs.c_n = critical_value_cn(cs.delta_hat, vc.sigma, vc.n, alpha);
  const double ext = cs.c_n * vc.standard_error();
  cs.lower = mu_l_hat - ext;
  cs.upper = mu_u_hat + ext;
  return cs;
}

double tstar(double alpha) {
  check_alpha(alpha);
  const double lo = std_normal_quantile(alpha);
  // At the root Phi(-t/2) < 1 - alpha, so t > 2 * Phi^-1(alpha); widen the
  // default [.., 6] bracket for alpha close to one.
  const double hi = std::max(6.0, 2.0 * lo + 1.0);
  auto f = [alpha](double t) {
    return std_normal_cdf(t) - std_normal_cdf(-0.5 * t) - alpha;
  };
  return numerics::solve_monotone(f, {lo, hi, 1e-12});
}

const char* to_string(RobustVerdict v) noexcept {
  return v == RobustVerdict::kRobustlyRejected ? "robustly-rejected"
                                               : "not-robust";
}

RobustVerdict robust_null_check(double t_tilde, double alpha,
                                const SignRegime& regime) {
  if (regime.product() != -1) {
    throw DomainError("robust-null check requires opposite signs");
  }
  return std::abs(t_tilde) > tstar(alpha) ? RobustVerdict::kRobustlyRejected
                                          : RobustVerdict::kNotRobust;
}

namespace {

InferenceResult finish(double m_hat, double pi, std::optional<double> epsilon,
                       const SignRegime& regime, double alpha,
                       const VarianceComponents& vc) {
  InferenceResult out;
  out.interval = epsilon ? identified_set_imperfect(m_hat, pi, *epsilon, regime)
                         : identified_set_benchmark(m_hat, pi, regime);
  out.variances = vc;
  out.cs = confidence_set(out.interval.lower, out.interval.upper, vc, alpha);
  out.t_tilde = m_hat / (vc.sigma_m / std::sqrt(static_cast<double>(vc.n)));
  if (regime.product() == -1) {
    out.verdict = robust_null_check(out.t_tilde, alpha, regime);
  }
  return out;
}

}  // namespace

InferenceResult summary_mode_infer(double m_hat, double se, std::size_t n,
                                   double pi, std::optional<double> epsilon,
                                   const SignRegime& regime, double alpha) {
  if (!(se > 0.0) || !std::isfinite(se)) {
    throw DomainError("summary mode needs se > 0");
  }
  if (!std::isfinite(m_hat)) throw DomainError("summary mode needs finite m");
  if (n == 0) throw DomainError("summary mode needs n >= 1");
  check_alpha(alpha);
  const double sigma_m = se * std::sqrt(static_cast<double>(n));
  const auto vc =
      scale_variances(m_hat, sigma_m, factors_for(pi, epsilon, regime), n);
  return finish(m_hat, pi, epsilon, regime, alpha, vc);
}

InferenceResult panel_infer(const TwoPeriodPanel& panel, const GTransform& g,
                            double pi, std::optional<double> epsilon,
                            const SignRegime& regime, double alpha) {
  check_alpha(alpha);
  const double m_hat = did_estimand(panel, g);
  const auto vc = bound_variances(panel, g, pi, regime, epsilon);
  return finish(m_hat, pi, epsilon, regime, alpha, vc);
}

}  // namespace antbounds
