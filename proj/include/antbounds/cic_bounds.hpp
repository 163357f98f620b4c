#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "antbounds/did_bounds.hpp"
#include "antbounds/panel.hpp"

namespace antbounds {

/// Empirical distribution of a finite sample.
///
/// cdf(y) = #{samples <= y} / n is right-continuous. quantile(q) is the
/// left-continuous generalized inverse inf{y : cdf(y) >= q} for q in (0, 1];
/// quantile(0) is taken as the sample minimum, the limit from the right.
/// Arguments within 1e-9 (relative) of a multiple of 1/n are snapped to it,
/// so that cdf values of one sample compose exactly with the quantile of
/// another.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> samples);

  double cdf(double y) const;
  double quantile(double q) const;

  std::span<const double> sorted() const noexcept { return sorted_; }
  std::size_t size() const noexcept { return sorted_.size(); }
  double min() const noexcept { return sorted_.front(); }
  double max() const noexcept { return sorted_.back(); }

 private:
  std::vector<double> sorted_;
};

/// The four group-by-period outcome distributions of a two-period panel.
struct CicDistributions {
  EmpiricalDistribution treated_t0;
  EmpiricalDistribution treated_t1;
  EmpiricalDistribution control_t0;
  EmpiricalDistribution control_t1;

  static CicDistributions from_panel(const TwoPeriodPanel& panel);
  /// max sample - min sample over all four distributions.
  double data_range() const;
};

/// Real number or a signed infinite sentinel. Infinite values are only
/// compared and rendered, never used in arithmetic.
class ExtendedReal {
 public:
  static ExtendedReal finite(double v);
  static ExtendedReal pos_inf() { return ExtendedReal(Kind::kPosInf, 0.0); }
  static ExtendedReal neg_inf() { return ExtendedReal(Kind::kNegInf, 0.0); }

  bool is_finite() const noexcept { return kind_ == Kind::kFinite; }
  bool is_pos_inf() const noexcept { return kind_ == Kind::kPosInf; }
  bool is_neg_inf() const noexcept { return kind_ == Kind::kNegInf; }
  /// Finite value; throws DomainError for a sentinel.
  double value() const;
  /// Finite value or +-infinity, for ordering only.
  double ordering_key() const noexcept;
  bool operator==(const ExtendedReal&) const = default;

 private:
  enum class Kind { kFinite, kPosInf, kNegInf };
  ExtendedReal(Kind kind, double v) : kind_(kind), value_(v) {}
  Kind kind_;
  double value_;
};

enum class CicSide { kUpper, kLower };

/// q-th quantile of the treated group's untreated outcome at t = 1:
/// F^-1_{control,1}(F_{control,0}(F^-1_{treated,0}(q))).
double counterfactual_quantile(double q, const EmpiricalDistribution& treated_t0,
                               const EmpiricalDistribution& control_t0,
                               const EmpiricalDistribution& control_t1);

/// Quantile DID analogue m(q): treated t = 1 quantile minus the
/// counterfactual quantile.
double cic_m(double q, const CicDistributions& dists);

/// Residual of the magnitude-restriction fixed point at x:
/// F^-1_{treated,1}(q) - F^-1_{control,1}(F_{control,0}(F^-1_{treated,0}(q) -+ x)) - x
/// with "-" on the upper side and "+" on the lower side.
double phi_residual(double q, CicSide side, double x,
                    const CicDistributions& dists);

/// Closest-to-zero root of phi_residual whose sign matches sign_mu, searched
/// on [0, B] or [-B, 0] with B the data range. Absent when no such root
/// exists.
std::optional<double> solve_phi(double q, CicSide side, int sign_mu,
                                const CicDistributions& dists);

/// Bound from the anticipation-probability restriction: quantile argument
/// shifted to q - pi (upper) or q + pi (lower). +inf when q <= pi (upper),
/// -inf when q >= 1 - pi (lower).
ExtendedReal shifted_quantile_bound(double q, double pi, CicSide side,
                                    const CicDistributions& dists);

struct CicBoundsResult {
  double q = 0.0;
  double m_q = 0.0;
  std::optional<double> phi_u;
  std::optional<double> phi_l;
  /// Set when solve_phi found only a root of the sign opposite to mu.
  bool phi_u_opposite_sign_only = false;
  bool phi_l_opposite_sign_only = false;
  ExtendedReal phi_tilde_u = ExtendedReal::pos_inf();
  ExtendedReal phi_tilde_l = ExtendedReal::neg_inf();
  /// Absent when the candidate bounds cross; see diagnostic.
  std::optional<IdentifiedInterval> interval;
  std::string diagnostic;
};

/// Quantile treatment effect bounds for the declared sign regime. The tighter
/// of the magnitude bound (phi) and the probability bound (phi tilde) is used.
CicBoundsResult cic_identified_set(double q, double pi,
                                   const SignRegime& regime,
                                   const CicDistributions& dists);

}  // namespace antbounds
