#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace antbounds {

/// One unit of a two-period panel. The anticipation status of the unit is not
/// part of the record: it is never observed.
struct TwoPeriodRecord {
  std::string unit_id;
  double y0 = 0.0;
  double y1 = 0.0;
  int d = 0;
  std::optional<std::string> stratum;
};

/// Validated, immutable two-period panel: unique unit ids, finite outcomes,
/// d in {0, 1}, and at least one treated and one control unit.
class TwoPeriodPanel {
 public:
  explicit TwoPeriodPanel(std::vector<TwoPeriodRecord> rows);

  const std::vector<TwoPeriodRecord>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t n_treated() const noexcept { return n_treated_; }
  std::size_t n_control() const noexcept { return rows_.size() - n_treated_; }

  /// True when at least one row carries a stratum label.
  bool has_strata() const noexcept;
  /// Sorted distinct stratum labels; rows without a label form the stratum "".
  std::vector<std::string> strata() const;
  /// Rows of one stratum, unvalidated (a stratum may lack a comparison group).
  std::vector<TwoPeriodRecord> stratum_rows(const std::string& label) const;

 private:
  std::vector<TwoPeriodRecord> rows_;
  std::size_t n_treated_ = 0;
};

struct CohortRecord {
  std::string unit_id;
  /// outcomes[k] is the outcome in period k + 1.
  std::vector<double> outcomes;
  /// First treatment period, or nullopt for never-treated units.
  std::optional<int> cohort;
};

/// Balanced multi-period panel with staggered adoption. Periods are 1..T,
/// T >= 2, and at least one unit is never treated.
class CohortPanel {
 public:
  explicit CohortPanel(std::vector<CohortRecord> rows);

  const std::vector<CohortRecord>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  int periods() const noexcept { return periods_; }
  std::size_t cohort_size(int e) const;
  std::size_t never_treated_size() const;
  /// Share of all units first treated at or before period e.
  double share_treated_by(int e) const;

 private:
  std::vector<CohortRecord> rows_;
  int periods_ = 0;
};

/// Measurable outcome transformation g(y) selecting the parameter family.
class GTransform {
 public:
  enum class Kind { kIdentity, kIndicator, kCustom };

  static GTransform identity();
  /// y -> 1 if y <= threshold else 0. Ties at the threshold count as 1.
  static GTransform indicator(double threshold);
  static GTransform custom(std::string name, std::function<double(double)> fn);

  double operator()(double y) const;
  Kind kind() const noexcept { return kind_; }
  double threshold() const noexcept { return threshold_; }
  /// "identity", "indicator:<u>" or the custom name.
  std::string describe() const;

 private:
  GTransform(Kind kind, double threshold, std::string name,
             std::function<double(double)> fn);

  Kind kind_;
  double threshold_ = 0.0;
  std::string name_;
  std::function<double(double)> fn_;
};

/// Parses "identity" or "indicator:<u>".
GTransform parse_gtransform(const std::string& text);

/// Group-by-period moments of g(Y). Index [d][t] with d, t in {0, 1}.
/// Variances and covariances use the n_d - 1 denominator.
struct GroupStats {
  double mean[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double var[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double cov[2] = {0.0, 0.0};
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  double p_hat = 0.0;

  /// Sample variance of g(y1) - g(y0) within group d.
  double diff_var(int d) const { return var[d][1] + var[d][0] - 2.0 * cov[d]; }
};

GroupStats group_stats(const TwoPeriodPanel& panel, const GTransform& g);

/// n1 / n.
double treatment_ratio(const TwoPeriodPanel& panel);

enum class Layout { kWide, kLong };

Layout parse_layout(const std::string& text);

/// Reads a comma-separated two-period panel with a header row.
/// Wide: unit_id,y0,y1,d[,stratum]. Long: unit_id,t,y,d[,stratum], t in {0,1}.
TwoPeriodPanel load_two_period(std::istream& in, Layout layout);
TwoPeriodPanel load_two_period_file(const std::string& path, Layout layout);

/// Reads a long cohort panel: unit_id,t,y,e with e a positive period or "inf".
CohortPanel load_cohort(std::istream& in);
CohortPanel load_cohort_file(const std::string& path);

}  // namespace antbounds
