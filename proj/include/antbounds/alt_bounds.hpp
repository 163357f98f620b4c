#pragma once

#include "antbounds/did_bounds.hpp"
#include "antbounds/panel.hpp"

namespace antbounds {

/// Known support [a, b] of g(y0).
struct OutcomeBounds {
  double a = 0.0;
  double b = 1.0;
};

/// T = (mean11 - mean01) + mean00, the untreated-period counterfactual term
/// shared by the bounded-outcome and trimming bounds.
double common_term(const TwoPeriodPanel& panel, const GTransform& g);

/// The same quantity as a single weighted sample mean,
/// mean of (D - p)/(p (1 - p)) g(y1) + (1 - D)/(1 - p) g(y0).
double common_term_weighted(const TwoPeriodPanel& panel, const GTransform& g);

/// [T - b, T - a]. Every g(y0) must lie in [a, b].
IdentifiedInterval bounded_outcome_set(const TwoPeriodPanel& panel,
                                       const GTransform& g,
                                       const OutcomeBounds& bounds);

/// Trimming bounds: T minus the mean of treated g(y0) over the upper tail
/// {g(y0) >= q_eta} (lower endpoint) and over the lower tail
/// {g(y0) <= q_(1 - eta)} (upper endpoint). Ties are kept on both sides.
IdentifiedInterval trimming_set(const TwoPeriodPanel& panel,
                                const GTransform& g, double eta);

}  // namespace antbounds
