#include "antbounds/sensitivity.hpp"

#include <algorithm>

#include "antbounds/error.hpp"
#include "antbounds/inference.hpp"
#include "antbounds/numerics.hpp"

namespace antbounds {

namespace {

SweepRow evaluate(double m_hat, double se, std::size_t n, const SweepPoint& p,
                  const SignRegime& regime, double alpha) {
  const auto r =
      summary_mode_infer(m_hat, se, n, p.pi, p.epsilon, regime, alpha);
  return {p.pi,          p.epsilon,      r.interval.lower, r.interval.upper,
          r.cs.lower,    r.cs.upper,     r.cs.c_n};
}

bool point_less(const SweepPoint& a, const SweepPoint& b) {
  if (a.pi != b.pi) return a.pi < b.pi;
  if (a.epsilon.has_value() != b.epsilon.has_value()) {
    return !a.epsilon.has_value();
  }
  return a.epsilon.value_or(0.0) < b.epsilon.value_or(0.0);
}

}  // namespace

SweepResult sensitivity_sweep(double m_hat, double se, std::size_t n,
                              std::vector<SweepPoint> grid,
                              const SignRegime& regime, double alpha) {
  if (grid.empty()) throw DomainError("sensitivity sweep needs a grid");
  std::stable_sort(grid.begin(), grid.end(), point_less);

  SweepResult out;
  out.rows.reserve(grid.size());
  for (const auto& p : grid) {
    out.rows.push_back(evaluate(m_hat, se, n, p, regime, alpha));
  }

  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& row = out.rows[i];
    if (!row.cs_contains_zero()) continue;
    out.cutoff_pi = row.pi;
    // Previous grid point with the same epsilon whose CS excludes zero.
    for (std::size_t j = i; j-- > 0;) {
      const auto& prev = out.rows[j];
      if (prev.epsilon != row.epsilon || prev.pi == row.pi) continue;
      if (prev.cs_contains_zero()) break;
      // Distance from zero of the CS endpoint on m-hat's side of zero.
      auto gap = [&](double pi) {
        const auto r = evaluate(m_hat, se, n, {pi, row.epsilon}, regime, alpha);
        return m_hat >= 0.0 ? r.cs_lower : -r.cs_upper;
      };
      try {
        out.refined_cutoff_pi =
            numerics::solve_monotone(gap, {prev.pi, row.pi, 1e-10});
      } catch (const NoRootError&) {
        out.refined_cutoff_pi.reset();
      }
      break;
    }
    break;
  }
  return out;
}

}  // namespace antbounds
