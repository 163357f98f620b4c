#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "antbounds/did_bounds.hpp"
#include "antbounds/panel.hpp"

namespace antbounds {

enum class NoiseKind { kGaussian, kStudentT };

/// Information-density anticipation: U has density k u^(k-1) on (0, 1) and a
/// unit anticipates when U <= alpha_slope * p_treat.
struct ToyModel {
  double alpha_slope = 1.0;    // in (0, 1]
  double density_power = 1.0;  // k >= 1 (nondecreasing density)
};

struct DgpConfig {
  std::size_t n = 1000;
  double mu = 1.0;
  double tau = -0.5;   // pre-period anticipation shift
  double tau2 = 0.0;   // additional post-period shift of anticipators
  double lambda = 0.0; // P[A = 1 | D = 1]
  double epsilon = 0.0;
  double p_treat = 0.5;
  double base_control = 0.0;
  double base_treated = 0.5;
  double trend = 0.2;
  double noise_sd = 1.0;
  /// Share of noise variance carried by the unit effect common to all periods.
  double rho = 0.5;
  NoiseKind noise = NoiseKind::kGaussian;
  std::optional<ToyModel> toy;
  std::uint64_t seed = 1;
  /// Deliberately violates the assumptions of the estimator it is paired with.
  bool falsification = false;

  void validate() const;
  /// Sign regime implied by the true mu and tau.
  SignRegime regime() const;
  /// |tau| <= |mu| and lambda <= pi.
  bool satisfies_assumptions(double pi) const;
};

/// Panel plus the latent anticipation indicator of every unit, in row order:
/// +1 anticipates its status correctly, -1 anticipates the wrong status,
/// 0 does not anticipate. Toy-model anticipators are all coded +1.
struct SimulatedPanel {
  TwoPeriodPanel panel;
  std::vector<int> anticipation;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
/// Seed for replication `index` of stream `stream` under a master seed.
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t stream,
                               std::uint64_t index) noexcept;

/// Benchmark design: treated anticipators (probability lambda) shift their
/// pre-period outcome by tau and their post-period outcome by tau2.
SimulatedPanel generate_two_period(const DgpConfig& cfg);

/// Anticipators in both groups; a share epsilon guesses its status wrongly.
/// The pre-period shift applies to units that anticipate treatment.
SimulatedPanel generate_imperfect(const DgpConfig& cfg);

/// Threshold anticipation rule of the toy model in both groups. Only treated
/// anticipators shift their outcome.
SimulatedPanel generate_toy_anticipation(const DgpConfig& cfg);

struct StaggeredDesign {
  int periods = 3;
  /// Share of units first treated in period e, indexed e - 1. The remainder
  /// is never treated.
  std::vector<double> cohort_shares{0.0, 0.3, 0.3};
  /// h(e, s) = lambda * delta^(e - s).
  double delta = 0.5;
};

/// Staggered adoption. Cohort-e units get mu from period e on and, in a
/// pre-period s, anticipate with probability h(e, s) (nested across s).
CohortPanel generate_staggered(const DgpConfig& cfg,
                               const StaggeredDesign& design);

enum class CicDesign {
  /// y = u + t; treated U has density 2u, control U is uniform.
  kShift,
  /// y0 = u, y1 = 0.5 u + 1; U uniform in both groups.
  kContracting
};

/// Changes-in-changes design with a monotone production function. Treated
/// anticipators shift y0 by tau; the treatment adds mu to y1.
SimulatedPanel generate_cic(const DgpConfig& cfg, CicDesign design);

/// Untreated t = 1 quantile of the treated group in a CiC design.
double cic_counterfactual_truth(double q, CicDesign design);

struct CoveragePoint {
  double lambda = 0.0;
  double coverage = 0.0;
  double mean_set_length = 0.0;
  double mean_cs_length = 0.0;
  bool falsification = false;
};

struct CoverageReport {
  std::vector<CoveragePoint> points;
  std::size_t reps = 0;
  double alpha = 0.0;
  double pi = 0.0;
  std::uint64_t seed = 0;
  double min_coverage = 0.0;
};

/// Empirical coverage of the benchmark confidence set for the true mu, per
/// grid configuration. Configs violating the assumptions for `pi` must be
/// tagged as falsification; they are excluded from min_coverage.
CoverageReport coverage_study(const std::vector<DgpConfig>& grid, double pi,
                              double alpha, std::size_t reps,
                              std::uint64_t master_seed, unsigned workers = 1);

struct IdentityReport {
  double expected = 0.0;
  double mean_m_hat = 0.0;
  double mc_se = 0.0;
  std::size_t reps = 0;
  bool within_3se = false;
};

/// Monte Carlo mean of the DID estimate against mu - lambda (tau - tau2).
IdentityReport post_treatment_identity_check(const DgpConfig& cfg,
                                             std::size_t reps,
                                             unsigned workers = 1);

struct DecompositionCheck {
  std::string variant;
  double m_hat = 0.0;
  double expected = 0.0;
  double se = 0.0;
  bool ok() const;
};

/// Single large-sample draw: m-hat against mu - lambda tau.
DecompositionCheck decomposition_benchmark(const DgpConfig& cfg);
/// m-hat against mu - lambda (1 - 2 epsilon) tau.
DecompositionCheck decomposition_imperfect(const DgpConfig& cfg);
/// m(e, s, t) against mu - h(e, s) tau.
DecompositionCheck decomposition_staggered(const DgpConfig& cfg,
                                           const StaggeredDesign& design,
                                           int e, int s, int t);

enum class BoundFamily {
  kBenchmark,
  kImperfect,
  kStaggered,
  kBoundedOutcome,
  kTrimming,
  kCic
};

std::string to_string(BoundFamily family);

struct ContainmentSpec {
  BoundFamily family = BoundFamily::kBenchmark;
  DgpConfig cfg;
  double pi = 0.0;
  std::size_t reps = 50;
  StaggeredDesign staggered;
  int e = 3, s = 2, t = 3;
  /// Threshold of the indicator transform for bounded-outcome runs.
  double threshold = 0.5;
  double q = 0.5;
  CicDesign cic_design = CicDesign::kContracting;
};

struct ContainmentReport {
  BoundFamily family = BoundFamily::kBenchmark;
  double truth = 0.0;
  std::size_t reps = 0;
  std::size_t violations = 0;
  double mean_lower = 0.0;
  double mean_upper = 0.0;
  double sd_lower = 0.0;
  double sd_upper = 0.0;
  bool falsification = false;

  bool contained() const noexcept { return violations == 0; }
};

/// Replicated identified intervals at the config's sample size. A rep
/// violates containment when the truth falls outside the interval widened by
/// three across-replication standard deviations of each endpoint.
ContainmentReport containment_study(const ContainmentSpec& spec,
                                    unsigned workers = 1);

struct ToyCheck {
  double share_anticipating = 0.0;
  double share_treated = 0.0;
  double se = 0.0;
  /// share_anticipating <= share_treated + 3 se.
  bool ok() const noexcept { return share_anticipating <= share_treated + 3.0 * se; }
};

ToyCheck toy_bound_check(const DgpConfig& cfg);

/// Runs f(0), ..., f(count - 1) on up to `workers` threads. Each index is
/// processed exactly once; callers write results into per-index slots.
template <typename F>
void parallel_for(std::size_t count, unsigned workers, F&& f);

}  // namespace antbounds

#include "antbounds/detail/parallel_for.hpp"
