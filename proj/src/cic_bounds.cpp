#include "antbounds/cic_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "antbounds/error.hpp"

namespace antbounds {

namespace {

constexpr double kSnap = 1e-9;

// Index (0-based) of the left-continuous q-quantile in a sorted sample of n.
std::size_t quantile_index(double q, std::size_t n) {
  if (q <= 0.0) return 0;
  double x = q * static_cast<double>(n);
  const double r = std::round(x);
  if (std::abs(x - r) <= kSnap * std::max(1.0, x)) x = r;
  auto k = static_cast<std::size_t>(std::ceil(x));
  if (k == 0) k = 1;
  return std::min(k, n) - 1;
}

double transform_control(double z, const CicDistributions& d) {
  return d.control_t1.quantile(d.control_t0.cdf(z));
}

}  // namespace

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw DataError("empirical distribution of empty sample");
  for (double v : sorted_) {
    if (!std::isfinite(v)) {
      throw DataError("empirical distribution requires finite samples");
    }
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDistribution::cdf(double y) const {
  if (std::isnan(y)) throw DomainError("cdf argument is NaN");
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), y);
  return static_cast<double>(it - sorted_.begin()) /
         static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("quantile level must lie in [0, 1]");
  }
  return sorted_[quantile_index(q, sorted_.size())];
}

CicDistributions CicDistributions::from_panel(const TwoPeriodPanel& panel) {
  std::vector<double> t0, t1, c0, c1;
  for (const auto& r : panel.rows()) {
    if (r.d == 1) {
      t0.push_back(r.y0);
      t1.push_back(r.y1);
    } else {
      c0.push_back(r.y0);
      c1.push_back(r.y1);
    }
  }
  return CicDistributions{EmpiricalDistribution(std::move(t0)),
                          EmpiricalDistribution(std::move(t1)),
                          EmpiricalDistribution(std::move(c0)),
                          EmpiricalDistribution(std::move(c1))};
}

double CicDistributions::data_range() const {
  const double lo = std::min({treated_t0.min(), treated_t1.min(),
                              control_t0.min(), control_t1.min()});
  const double hi = std::max({treated_t0.max(), treated_t1.max(),
                              control_t0.max(), control_t1.max()});
  return hi - lo;
}

ExtendedReal ExtendedReal::finite(double v) {
  if (!std::isfinite(v)) throw DomainError("ExtendedReal::finite needs a finite value");
  return ExtendedReal(Kind::kFinite, v);
}

double ExtendedReal::value() const {
  if (!is_finite()) throw DomainError("value of an infinite bound");
  return value_;
}

double ExtendedReal::ordering_key() const noexcept {
  switch (kind_) {
    case Kind::kPosInf:
      return std::numeric_limits<double>::infinity();
    case Kind::kNegInf:
      return -std::numeric_limits<double>::infinity();
    case Kind::kFinite:
      break;
  }
  return value_;
}

double counterfactual_quantile(double q, const EmpiricalDistribution& treated_t0,
                               const EmpiricalDistribution& control_t0,
                               const EmpiricalDistribution& control_t1) {
  return control_t1.quantile(control_t0.cdf(treated_t0.quantile(q)));
}

double cic_m(double q, const CicDistributions& d) {
  return d.treated_t1.quantile(q) -
         counterfactual_quantile(q, d.treated_t0, d.control_t0, d.control_t1);
}

double phi_residual(double q, CicSide side, double x,
                    const CicDistributions& d) {
  const double a = d.treated_t0.quantile(q);
  const double b = d.treated_t1.quantile(q);
  const double z = side == CicSide::kUpper ? a - x : a + x;
  return b - transform_control(z, d) - x;
}

// The control transform h(z) is a step function that only changes where z
// crosses a control t = 0 sample point, so the residual b - h(z(x)) - x is
// linear with slope -1 between consecutive crossings and jumps at them.
// Walking the pieces outward from zero, the first point where the residual
// vanishes or changes sign (inside a piece or across a jump) is the root
// closest to zero.
std::optional<double> solve_phi(double q, CicSide side, int sign_mu,
                                const CicDistributions& d) {
  if (sign_mu != 1 && sign_mu != -1) throw DomainError("sign_mu must be +1 or -1");
  const double a = d.treated_t0.quantile(q);
  const double b = d.treated_t1.quantile(q);
  const double s = side == CicSide::kUpper ? -1.0 : 1.0;  // z = a + s x
  const double dir = static_cast<double>(sign_mu);
  const double bound = d.data_range();

  const double r0 = b - transform_control(a, d);
  if (r0 == 0.0) return 0.0;

  // Distances |x| from zero where the step function jumps.
  std::vector<double> cuts;
  for (double y : d.control_t0.sorted()) {
    const double dist = dir * s * (y - a);
    if (dist > 0.0 && dist < bound) cuts.push_back(dist);
  }
  cuts.push_back(bound);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto opposite = [](double u, double v) { return (u < 0.0) != (v < 0.0); };
  double prev = 0.0;
  double before = r0;  // residual just before the current piece starts
  for (double next : cuts) {
    if (next <= prev) continue;
    const double c = transform_control(a + s * dir * 0.5 * (prev + next), d);
    const double start = b - c - dir * prev;
    const double end = b - c - dir * next;
    if (start == 0.0 || opposite(before, start)) return dir * prev;
    if (end == 0.0 || opposite(start, end)) return b - c;
    before = end;
    prev = next;
  }
  return std::nullopt;
}

ExtendedReal shifted_quantile_bound(double q, double pi, CicSide side,
                                    const CicDistributions& d) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  if (!(pi >= 0.0 && pi < 1.0)) throw DomainError("pi must lie in [0, 1)");
  const double b = d.treated_t1.quantile(q);
  if (side == CicSide::kUpper) {
    if (q <= pi) return ExtendedReal::pos_inf();
    return ExtendedReal::finite(
        b - counterfactual_quantile(q - pi, d.treated_t0, d.control_t0,
                                    d.control_t1));
  }
  if (q >= 1.0 - pi) return ExtendedReal::neg_inf();
  return ExtendedReal::finite(
      b - counterfactual_quantile(q + pi, d.treated_t0, d.control_t0,
                                  d.control_t1));
}

CicBoundsResult cic_identified_set(double q, double pi,
                                   const SignRegime& regime,
                                   const CicDistributions& d) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  if (!(pi >= 0.0 && pi < 1.0)) throw DomainError("pi must lie in [0, 1)");
  const SignRegime r = SignRegime::make(regime.sign_mu, regime.sign_tau);
  constexpr double inf = std::numeric_limits<double>::infinity();

  CicBoundsResult out;
  out.q = q;
  out.m_q = cic_m(q, d);
  out.phi_u = solve_phi(q, CicSide::kUpper, r.sign_mu, d);
  out.phi_l = solve_phi(q, CicSide::kLower, r.sign_mu, d);
  if (!out.phi_u) {
    out.phi_u_opposite_sign_only =
        solve_phi(q, CicSide::kUpper, -r.sign_mu, d).has_value();
  }
  if (!out.phi_l) {
    out.phi_l_opposite_sign_only =
        solve_phi(q, CicSide::kLower, -r.sign_mu, d).has_value();
  }
  out.phi_tilde_u = shifted_quantile_bound(q, pi, CicSide::kUpper, d);
  out.phi_tilde_l = shifted_quantile_bound(q, pi, CicSide::kLower, d);

  const double m = out.m_q;
  const double pu_hi = out.phi_u.value_or(inf);
  const double pl_hi = out.phi_l.value_or(inf);
  const double pu_lo = out.phi_u.value_or(-inf);
  const double pl_lo = out.phi_l.value_or(-inf);
  const double tu = out.phi_tilde_u.ordering_key();
  const double tl = out.phi_tilde_l.ordering_key();

  double lower = m;
  double upper = m;
  if (r.sign_tau == 0) {
    // No anticipation effect: the quantile DID is point identifying.
  } else if (r.sign_mu > 0 && r.sign_tau > 0) {
    upper = std::min(pu_hi, tu);
  } else if (r.sign_mu > 0 && r.sign_tau < 0) {
    lower = std::max(pl_lo, tl);
  } else if (r.sign_mu < 0 && r.sign_tau > 0) {
    upper = std::min(pl_hi, tu);
  } else {
    lower = std::max(pu_lo, tl);
  }

  if (lower > upper) {
    out.diagnostic = "empty identified set: bounds cross at q = " +
                     std::to_string(q) + " (lower " + std::to_string(lower) +
                     " > upper " + std::to_string(upper) + ")";
    return out;
  }
  IdentifiedInterval iv;
  iv.lower = lower;
  iv.upper = upper;
  iv.tag = AssumptionTag::kCic;
  iv.pi_used = pi;
  iv.regime = r;
  out.interval = iv;
  if (!iv.bounded()) out.diagnostic = "one-sided: no finite bound on one side";
  return out;
}

}  // namespace antbounds
