#pragma once

#include <functional>

namespace antbounds::numerics {

/// Closed search interval for a scalar root, with an absolute tolerance on
/// the argument.
struct Bracket {
  double lo;
  double hi;
  double tol = 1e-10;
};

/// Standard normal CDF. Absolute error below 1e-12 on the whole real line.
double std_normal_cdf(double x);

/// Inverse of the standard normal CDF for p in (0, 1).
double std_normal_quantile(double p);

/// Bisection root finder for a weakly monotone function with a sign change
/// across the bracket. Throws NoRootError when f(lo) and f(hi) have the same
/// strict sign. Runs at most ceil(log2((hi - lo) / tol)) halvings.
double solve_monotone(const std::function<double(double)>& f,
                      const Bracket& bracket);

/// Iteration budget solve_monotone uses for a given bracket.
int bisection_iterations(const Bracket& bracket);

}  // namespace antbounds::numerics
