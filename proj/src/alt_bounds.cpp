#include "antbounds/alt_bounds.hpp"

#include <cmath>
#include <vector>

#include "antbounds/cic_bounds.hpp"
#include "antbounds/error.hpp"

namespace antbounds {

namespace {

struct Means {
  double t1 = 0.0, c0 = 0.0, c1 = 0.0;
  std::size_t n1 = 0, n0 = 0;
};

Means group_means(const TwoPeriodPanel& panel, const GTransform& g) {
  Means m;
  for (const auto& r : panel.rows()) {
    if (r.d == 1) {
      m.t1 += g(r.y1);
      ++m.n1;
    } else {
      m.c0 += g(r.y0);
      m.c1 += g(r.y1);
      ++m.n0;
    }
  }
  if (m.n1 == 0 || m.n0 == 0) throw DataError("both groups must be nonempty");
  m.t1 /= static_cast<double>(m.n1);
  m.c0 /= static_cast<double>(m.n0);
  m.c1 /= static_cast<double>(m.n0);
  return m;
}

}  // namespace

double common_term(const TwoPeriodPanel& panel, const GTransform& g) {
  const Means m = group_means(panel, g);
  return (m.t1 - m.c1) + m.c0;
}

double common_term_weighted(const TwoPeriodPanel& panel, const GTransform& g) {
  const double n = static_cast<double>(panel.size());
  const double p = treatment_ratio(panel);
  double sum = 0.0;
  for (const auto& r : panel.rows()) {
    const double d = static_cast<double>(r.d);
    sum += (d - p) / (p * (1.0 - p)) * g(r.y1) + (1.0 - d) / (1.0 - p) * g(r.y0);
  }
  return sum / n;
}

IdentifiedInterval bounded_outcome_set(const TwoPeriodPanel& panel,
                                       const GTransform& g,
                                       const OutcomeBounds& bounds) {
  if (!(std::isfinite(bounds.a) && std::isfinite(bounds.b)) ||
      bounds.a > bounds.b) {
    throw DomainError("outcome bounds need finite a <= b");
  }
  for (const auto& r : panel.rows()) {
    const double v = g(r.y0);
    if (v < bounds.a || v > bounds.b) {
      throw DataError("bound violated by data: unit '" + r.unit_id +
                      "' has g(y0) = " + std::to_string(v) + " outside [" +
                      std::to_string(bounds.a) + ", " +
                      std::to_string(bounds.b) + "]");
    }
  }
  const double t = common_term(panel, g);
  IdentifiedInterval iv;
  iv.lower = t - bounds.b;
  iv.upper = t - bounds.a;
  iv.tag = AssumptionTag::kBoundedOutcome;
  return iv;
}

IdentifiedInterval trimming_set(const TwoPeriodPanel& panel,
                                const GTransform& g, double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) throw DomainError("eta must lie in [0, 1)");
  std::vector<double> treated;
  for (const auto& r : panel.rows()) {
    if (r.d == 1) treated.push_back(g(r.y0));
  }
  if (treated.size() < 2) throw DataError("trimming needs at least 2 treated units");
  const EmpiricalDistribution dist(treated);
  const double q_lo = dist.quantile(eta);
  const double q_hi = dist.quantile(1.0 - eta);

  double hi_sum = 0.0, lo_sum = 0.0;
  std::size_t hi_n = 0, lo_n = 0;
  for (double v : treated) {
    if (v >= q_lo) {
      hi_sum += v;
      ++hi_n;
    }
    if (v <= q_hi) {
      lo_sum += v;
      ++lo_n;
    }
  }
  if (hi_n == 0 || lo_n == 0) throw DataError("trim removes all treated units");

  const double t = common_term(panel, g);
  IdentifiedInterval iv;
  iv.lower = t - hi_sum / static_cast<double>(hi_n);
  iv.upper = t - lo_sum / static_cast<double>(lo_n);
  iv.tag = AssumptionTag::kTrimming;
  iv.pi_used = eta;
  return iv;
}

}  // namespace antbounds
