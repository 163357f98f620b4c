#include "antbounds/numerics.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "antbounds/error.hpp"

namespace antbounds::numerics {

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) {
    throw DomainError("std_normal_cdf: argument must be finite");
  }
  // erfc keeps full relative precision in the lower tail.
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("std_normal_quantile: p must lie in (0, 1), got " +
                      std::to_string(p));
  }
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

int bisection_iterations(const Bracket& b) {
  return static_cast<int>(std::ceil(std::log2((b.hi - b.lo) / b.tol)));
}

double solve_monotone(const std::function<double(double)>& f,
                      const Bracket& bracket) {
  if (!(bracket.lo < bracket.hi) || !(bracket.tol > 0.0)) {
    throw DomainError("solve_monotone: bracket requires lo < hi and tol > 0");
  }
  double lo = bracket.lo;
  double hi = bracket.hi;
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw NoRootError();
  }
  const int budget = bisection_iterations(bracket);
  for (int i = 0; i < budget; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace antbounds::numerics
