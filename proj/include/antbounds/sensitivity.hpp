#pragma once

#include <optional>
#include <vector>

#include "antbounds/did_bounds.hpp"

namespace antbounds {

struct SweepPoint {
  double pi = 0.0;
  std::optional<double> epsilon;
};

struct SweepRow {
  double pi = 0.0;
  std::optional<double> epsilon;
  double set_lower = 0.0;
  double set_upper = 0.0;
  double cs_lower = 0.0;
  double cs_upper = 0.0;
  double c_n = 0.0;

  bool cs_contains_zero() const noexcept {
    return cs_lower <= 0.0 && 0.0 <= cs_upper;
  }
};

struct SweepResult {
  /// Ordered by pi, then epsilon (rows without epsilon first).
  std::vector<SweepRow> rows;
  /// Smallest grid pi whose confidence set contains zero.
  std::optional<double> cutoff_pi;
  /// Root-solved pi where the CS endpoint nearest zero crosses it, bracketed
  /// by the grid point before the cutoff and the cutoff itself.
  std::optional<double> refined_cutoff_pi;
};

/// Identified and confidence sets over a grid of (pi, epsilon) in summary
/// statistics mode.
SweepResult sensitivity_sweep(double m_hat, double se, std::size_t n,
                              std::vector<SweepPoint> grid,
                              const SignRegime& regime, double alpha);

}  // namespace antbounds
