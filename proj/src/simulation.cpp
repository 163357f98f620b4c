#include "antbounds/simulation.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "antbounds/alt_bounds.hpp"
#include "antbounds/cic_bounds.hpp"
#include "antbounds/error.hpp"
#include "antbounds/inference.hpp"
#include "antbounds/numerics.hpp"

namespace antbounds {

namespace {

using Rng = std::mt19937_64;

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

class Draws {
 public:
  Draws(std::uint64_t seed, const DgpConfig& cfg)
      : rng_(seed), cfg_(cfg), t_(5.0) {}

  double uniform() { return unif_(rng_); }
  bool bernoulli(double p) { return uniform() < p; }

  double standard() {
    if (cfg_.noise == NoiseKind::kStudentT) return t_(rng_) * std::sqrt(3.0 / 5.0);
    return normal_(rng_);
  }

  /// Noise for one unit across `periods` periods.
  void unit_noise(std::vector<double>& out) {
    const double common = std::sqrt(cfg_.rho) * standard();
    const double idio = std::sqrt(1.0 - cfg_.rho);
    for (double& v : out) v = cfg_.noise_sd * (common + idio * standard());
  }

 private:
  Rng rng_;
  const DgpConfig& cfg_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::student_t_distribution<double> t_;
};

std::string unit_name(std::size_t i) { return "u" + std::to_string(i); }

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void validate_design(const StaggeredDesign& d) {
  if (d.periods < 2) throw DomainError("staggered design needs at least 2 periods");
  if (d.cohort_shares.size() != static_cast<std::size_t>(d.periods)) {
    throw DomainError("cohort_shares needs one entry per period");
  }
  double total = 0.0;
  for (double s : d.cohort_shares) {
    if (!probability(s)) throw DomainError("cohort shares must lie in [0, 1]");
    total += s;
  }
  if (total > 1.0 + 1e-12) throw DomainError("cohort shares sum above 1");
  if (!(d.delta >= 0.0 && d.delta <= 1.0)) throw DomainError("delta must lie in [0, 1]");
}

}  // namespace

void DgpConfig::validate() const {
  if (n < 4) throw DomainError("n must be at least 4");
  for (double v : {mu, tau, tau2, base_control, base_treated, trend, noise_sd}) {
    if (!std::isfinite(v)) throw DomainError("DGP parameters must be finite");
  }
  if (!probability(lambda)) throw DomainError("lambda must lie in [0, 1]");
  if (!probability(epsilon)) throw DomainError("epsilon must lie in [0, 1]");
  if (!(p_treat > 0.0 && p_treat < 1.0)) throw DomainError("p_treat must lie in (0, 1)");
  if (!probability(rho)) throw DomainError("rho must lie in [0, 1]");
  if (noise_sd < 0.0) throw DomainError("noise_sd must be nonnegative");
  if (toy) {
    if (!(toy->alpha_slope > 0.0 && toy->alpha_slope <= 1.0)) {
      throw DomainError("toy alpha_slope must lie in (0, 1]");
    }
    if (!(toy->density_power >= 1.0) || !std::isfinite(toy->density_power)) {
      throw DomainError("toy U density must be nondecreasing (power >= 1)");
    }
  }
}

SignRegime DgpConfig::regime() const {
  const int sm = mu >= 0.0 ? 1 : -1;
  const int st = tau > 0.0 ? 1 : (tau < 0.0 ? -1 : 0);
  return SignRegime::make(sm, st);
}

bool DgpConfig::satisfies_assumptions(double pi) const {
  return std::abs(tau) <= std::abs(mu) && lambda <= pi;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t stream,
                               std::uint64_t index) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index);
}

SimulatedPanel generate_two_period(const DgpConfig& cfg) {
  cfg.validate();
  Draws draw(cfg.seed, cfg);
  std::vector<TwoPeriodRecord> rows(cfg.n);
  std::vector<int> ant(cfg.n, 0);
  std::vector<double> noise(2);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const int d = draw.bernoulli(cfg.p_treat) ? 1 : 0;
    const bool a = draw.bernoulli(cfg.lambda) && d == 1;
    draw.unit_noise(noise);
    const double base = d == 1 ? cfg.base_treated : cfg.base_control;
    auto& r = rows[i];
    r.unit_id = unit_name(i);
    r.d = d;
    r.y0 = base + noise[0] + (a ? cfg.tau : 0.0);
    r.y1 = base + cfg.trend + noise[1] + d * cfg.mu + (a ? cfg.tau2 : 0.0);
    ant[i] = a ? 1 : 0;
  }
  return SimulatedPanel{TwoPeriodPanel(std::move(rows)), std::move(ant)};
}

SimulatedPanel generate_imperfect(const DgpConfig& cfg) {
  cfg.validate();
  Draws draw(cfg.seed, cfg);
  std::vector<TwoPeriodRecord> rows(cfg.n);
  std::vector<int> ant(cfg.n, 0);
  std::vector<double> noise(2);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const int d = draw.bernoulli(cfg.p_treat) ? 1 : 0;
    const bool anticipates = draw.bernoulli(cfg.lambda);
    const bool wrong = draw.bernoulli(cfg.epsilon);
    draw.unit_noise(noise);
    const int code = anticipates ? (wrong ? -1 : 1) : 0;
    // Units expecting treatment shift: correct treated, wrong controls.
    const bool shift = (d == 1 && code == 1) || (d == 0 && code == -1);
    const double base = d == 1 ? cfg.base_treated : cfg.base_control;
    auto& r = rows[i];
    r.unit_id = unit_name(i);
    r.d = d;
    r.y0 = base + noise[0] + (shift ? cfg.tau : 0.0);
    r.y1 = base + cfg.trend + noise[1] + d * cfg.mu + (shift ? cfg.tau2 : 0.0);
    ant[i] = code;
  }
  return SimulatedPanel{TwoPeriodPanel(std::move(rows)), std::move(ant)};
}

SimulatedPanel generate_toy_anticipation(const DgpConfig& cfg) {
  cfg.validate();
  if (!cfg.toy) throw DomainError("toy model parameters missing");
  const double cutoff = cfg.toy->alpha_slope * cfg.p_treat;
  Draws draw(cfg.seed, cfg);
  std::vector<TwoPeriodRecord> rows(cfg.n);
  std::vector<int> ant(cfg.n, 0);
  std::vector<double> noise(2);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const int d = draw.bernoulli(cfg.p_treat) ? 1 : 0;
    const double u = std::pow(draw.uniform(), 1.0 / cfg.toy->density_power);
    const bool a = u <= cutoff;
    draw.unit_noise(noise);
    const bool shift = a && d == 1;
    const double base = d == 1 ? cfg.base_treated : cfg.base_control;
    auto& r = rows[i];
    r.unit_id = unit_name(i);
    r.d = d;
    r.y0 = base + noise[0] + (shift ? cfg.tau : 0.0);
    r.y1 = base + cfg.trend + noise[1] + d * cfg.mu + (shift ? cfg.tau2 : 0.0);
    ant[i] = a ? 1 : 0;
  }
  return SimulatedPanel{TwoPeriodPanel(std::move(rows)), std::move(ant)};
}

CohortPanel generate_staggered(const DgpConfig& cfg,
                               const StaggeredDesign& design) {
  cfg.validate();
  validate_design(design);
  const int periods = design.periods;
  Draws draw(cfg.seed, cfg);
  std::vector<CohortRecord> rows(cfg.n);
  std::vector<double> noise(static_cast<std::size_t>(periods));
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const double c = draw.uniform();
    std::optional<int> cohort;
    double acc = 0.0;
    for (int e = 1; e <= periods; ++e) {
      acc += design.cohort_shares[e - 1];
      if (c < acc) {
        cohort = e;
        break;
      }
    }
    const double v = draw.uniform();
    draw.unit_noise(noise);
    auto& r = rows[i];
    r.unit_id = unit_name(i);
    r.cohort = cohort;
    r.outcomes.resize(noise.size());
    const double base = cohort ? cfg.base_treated : cfg.base_control;
    for (int t = 1; t <= periods; ++t) {
      double y = base + cfg.trend * (t - 1) + noise[t - 1];
      if (cohort) {
        const int e = *cohort;
        if (t >= e) {
          y += cfg.mu;
        } else if (v <= cfg.lambda * std::pow(design.delta, e - t)) {
          y += cfg.tau;
        }
      }
      r.outcomes[t - 1] = y;
    }
  }
  return CohortPanel(std::move(rows));
}

SimulatedPanel generate_cic(const DgpConfig& cfg, CicDesign design) {
  cfg.validate();
  Draws draw(cfg.seed, cfg);
  std::vector<TwoPeriodRecord> rows(cfg.n);
  std::vector<int> ant(cfg.n, 0);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const int d = draw.bernoulli(cfg.p_treat) ? 1 : 0;
    const bool a = draw.bernoulli(cfg.lambda) && d == 1;
    double u = draw.uniform();
    auto& r = rows[i];
    r.unit_id = unit_name(i);
    r.d = d;
    if (design == CicDesign::kShift) {
      if (d == 1) u = std::sqrt(u);
      r.y0 = u;
      r.y1 = u + 1.0;
    } else {
      r.y0 = u;
      r.y1 = 0.5 * u + 1.0;
    }
    if (a) r.y0 += cfg.tau;
    r.y1 += d * cfg.mu;
    ant[i] = a ? 1 : 0;
  }
  return SimulatedPanel{TwoPeriodPanel(std::move(rows)), std::move(ant)};
}

double cic_counterfactual_truth(double q, CicDesign design) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  return design == CicDesign::kShift ? std::sqrt(q) + 1.0 : 0.5 * q + 1.0;
}

CoverageReport coverage_study(const std::vector<DgpConfig>& grid, double pi,
                              double alpha, std::size_t reps,
                              std::uint64_t master_seed, unsigned workers) {
  if (grid.empty()) throw DomainError("coverage grid is empty");
  if (reps == 0) throw DomainError("reps must be positive");
  if (!(pi >= 0.0 && pi < 1.0)) throw DomainError("pi must lie in [0, 1)");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid[k].validate();
    if (!grid[k].satisfies_assumptions(pi) && !grid[k].falsification) {
      throw DomainError("grid config " + std::to_string(k) +
                        " violates the assumptions for pi = " +
                        std::to_string(pi) + " and is not tagged falsification");
    }
  }

  CoverageReport report;
  report.reps = reps;
  report.alpha = alpha;
  report.pi = pi;
  report.seed = master_seed;
  const GTransform g = GTransform::identity();

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const DgpConfig& base = grid[k];
    const SignRegime regime = base.regime();
    std::vector<int> covered(reps, 0);
    std::vector<double> set_len(reps, 0.0), cs_len(reps, 0.0);
    parallel_for(reps, workers, [&](std::size_t r) {
      DgpConfig cfg = base;
      cfg.seed = replication_seed(master_seed, k, r);
      const SimulatedPanel sim = generate_two_period(cfg);
      const double m = did_estimand(sim.panel, g);
      const IdentifiedInterval set = identified_set_benchmark(m, pi, regime);
      const VarianceComponents vc = bound_variances(sim.panel, g, pi, regime);
      const ConfidenceSet cs = confidence_set(set.lower, set.upper, vc, alpha);
      covered[r] = cs.contains(cfg.mu) ? 1 : 0;
      set_len[r] = set.width();
      cs_len[r] = cs.upper - cs.lower;
    });
    CoveragePoint pt;
    pt.lambda = base.lambda;
    pt.falsification = base.falsification;
    std::size_t hits = 0;
    for (int c : covered) hits += static_cast<std::size_t>(c);
    pt.coverage = static_cast<double>(hits) / static_cast<double>(reps);
    pt.mean_set_length = mean_of(set_len);
    pt.mean_cs_length = mean_of(cs_len);
    report.points.push_back(pt);
  }

  double min_cov = std::numeric_limits<double>::infinity();
  for (const auto& pt : report.points) {
    if (!pt.falsification) min_cov = std::min(min_cov, pt.coverage);
  }
  if (!std::isfinite(min_cov)) {
    for (const auto& pt : report.points) min_cov = std::min(min_cov, pt.coverage);
  }
  report.min_coverage = min_cov;
  return report;
}

IdentityReport post_treatment_identity_check(const DgpConfig& cfg,
                                             std::size_t reps,
                                             unsigned workers) {
  cfg.validate();
  if (reps < 2) throw DomainError("identity check needs at least 2 reps");
  std::vector<double> m(reps, 0.0);
  const GTransform g = GTransform::identity();
  parallel_for(reps, workers, [&](std::size_t r) {
    DgpConfig c = cfg;
    c.seed = replication_seed(cfg.seed, 0, r);
    m[r] = did_estimand(generate_two_period(c).panel, g);
  });
  IdentityReport out;
  out.reps = reps;
  out.expected = cfg.mu - cfg.lambda * (cfg.tau - cfg.tau2);
  out.mean_m_hat = mean_of(m);
  out.mc_se = sample_sd(m) / std::sqrt(static_cast<double>(reps));
  out.within_3se = std::abs(out.mean_m_hat - out.expected) <= 3.0 * out.mc_se;
  return out;
}

bool DecompositionCheck::ok() const {
  return std::abs(m_hat - expected) <= 3.0 * se;
}

namespace {

DecompositionCheck two_period_check(const TwoPeriodPanel& panel,
                                    double expected, std::string variant) {
  const GTransform g = GTransform::identity();
  DecompositionCheck out;
  out.variant = std::move(variant);
  out.m_hat = did_estimand(panel, g);
  out.expected = expected;
  const VarianceComponents vc =
      bound_variances(panel, g, 0.0, SignRegime::make(1, 0));
  out.se = vc.sigma_m / std::sqrt(static_cast<double>(vc.n));
  return out;
}

double staggered_se(const CohortPanel& panel, int e, int s, int t) {
  std::vector<double> treated, never;
  for (const auto& r : panel.rows()) {
    const double diff = r.outcomes[t - 1] - r.outcomes[s - 1];
    if (!r.cohort) {
      never.push_back(diff);
    } else if (*r.cohort == e) {
      treated.push_back(diff);
    }
  }
  if (treated.size() < 2 || never.size() < 2) {
    throw DataError("staggered groups too small for a standard error");
  }
  const double vt = sample_sd(treated), vn = sample_sd(never);
  return std::sqrt(vt * vt / treated.size() + vn * vn / never.size());
}

}  // namespace

DecompositionCheck decomposition_benchmark(const DgpConfig& cfg) {
  return two_period_check(generate_two_period(cfg).panel,
                          cfg.mu - cfg.lambda * (cfg.tau - cfg.tau2),
                          "benchmark");
}

DecompositionCheck decomposition_imperfect(const DgpConfig& cfg) {
  return two_period_check(
      generate_imperfect(cfg).panel,
      cfg.mu - cfg.lambda * (1.0 - 2.0 * cfg.epsilon) * (cfg.tau - cfg.tau2),
      "imperfect");
}

DecompositionCheck decomposition_staggered(const DgpConfig& cfg,
                                           const StaggeredDesign& design,
                                           int e, int s, int t) {
  const CohortPanel panel = generate_staggered(cfg, design);
  DecompositionCheck out;
  out.variant = "staggered";
  out.m_hat = staggered_estimand(panel, e, s, t, GTransform::identity());
  out.expected = cfg.mu - cfg.lambda * std::pow(design.delta, e - s) * cfg.tau;
  out.se = staggered_se(panel, e, s, t);
  return out;
}

std::string to_string(BoundFamily family) {
  switch (family) {
    case BoundFamily::kBenchmark:
      return "benchmark";
    case BoundFamily::kImperfect:
      return "imperfect";
    case BoundFamily::kStaggered:
      return "staggered";
    case BoundFamily::kBoundedOutcome:
      return "bounded_outcome";
    case BoundFamily::kTrimming:
      return "trimming";
    case BoundFamily::kCic:
      return "cic";
  }
  return "unknown";
}

namespace {

struct RepInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool empty = false;
};

double bounded_outcome_truth(const ContainmentSpec& spec) {
  if (spec.cfg.noise != NoiseKind::kGaussian) {
    throw DomainError("bounded-outcome truth needs Gaussian noise");
  }
  const auto& c = spec.cfg;
  const double loc = c.base_treated + c.trend;
  if (c.noise_sd == 0.0) {
    const double y0 = loc, y1 = loc + c.mu;
    return (y1 <= spec.threshold ? 1.0 : 0.0) - (y0 <= spec.threshold ? 1.0 : 0.0);
  }
  return numerics::std_normal_cdf((spec.threshold - loc - c.mu) / c.noise_sd) -
         numerics::std_normal_cdf((spec.threshold - loc) / c.noise_sd);
}

RepInterval containment_rep(const ContainmentSpec& spec, const DgpConfig& cfg) {
  const SignRegime regime = cfg.regime();
  const GTransform id = GTransform::identity();
  IdentifiedInterval iv;
  switch (spec.family) {
    case BoundFamily::kBenchmark:
      iv = identified_set_benchmark(
          did_estimand(generate_two_period(cfg).panel, id), spec.pi, regime);
      break;
    case BoundFamily::kImperfect:
      iv = identified_set_imperfect(
          did_estimand(generate_imperfect(cfg).panel, id), spec.pi,
          cfg.epsilon, regime);
      break;
    case BoundFamily::kStaggered: {
      const CohortPanel panel = generate_staggered(cfg, spec.staggered);
      const double m = staggered_estimand(panel, spec.e, spec.s, spec.t, id);
      const double pi =
          staggered_pi(spec.e, spec.s, spec.staggered.delta, panel);
      iv = identified_set_staggered(m, pi, regime);
      break;
    }
    case BoundFamily::kBoundedOutcome:
      iv = bounded_outcome_set(generate_two_period(cfg).panel,
                               GTransform::indicator(spec.threshold),
                               OutcomeBounds{0.0, 1.0});
      break;
    case BoundFamily::kTrimming:
      iv = trimming_set(generate_two_period(cfg).panel, id, spec.pi);
      break;
    case BoundFamily::kCic: {
      const auto dists =
          CicDistributions::from_panel(generate_cic(cfg, spec.cic_design).panel);
      const CicBoundsResult res = cic_identified_set(spec.q, spec.pi, regime, dists);
      if (!res.interval) return RepInterval{res.m_q, res.m_q, true};
      iv = *res.interval;
      break;
    }
  }
  return RepInterval{iv.lower, iv.upper, false};
}

// Sample SD over the finite entries.
double finite_sd(const std::vector<double>& v) {
  std::vector<double> f;
  for (double x : v) {
    if (std::isfinite(x)) f.push_back(x);
  }
  return sample_sd(f);
}

double finite_mean(const std::vector<double>& v) {
  std::vector<double> f;
  for (double x : v) {
    if (std::isfinite(x)) f.push_back(x);
  }
  if (f.empty()) return v.empty() ? 0.0 : v.front();
  return mean_of(f);
}

}  // namespace

ContainmentReport containment_study(const ContainmentSpec& spec,
                                    unsigned workers) {
  spec.cfg.validate();
  if (spec.reps < 2) throw DomainError("containment needs at least 2 reps");
  std::vector<RepInterval> reps(spec.reps);
  const auto stream = static_cast<std::uint64_t>(spec.family);
  parallel_for(spec.reps, workers, [&](std::size_t r) {
    DgpConfig cfg = spec.cfg;
    cfg.seed = replication_seed(spec.cfg.seed, stream, r);
    reps[r] = containment_rep(spec, cfg);
  });

  ContainmentReport out;
  out.family = spec.family;
  out.reps = spec.reps;
  out.falsification = spec.cfg.falsification;
  out.truth = spec.family == BoundFamily::kBoundedOutcome
                  ? bounded_outcome_truth(spec)
                  : spec.cfg.mu;

  std::vector<double> lo(spec.reps), hi(spec.reps);
  for (std::size_t r = 0; r < spec.reps; ++r) {
    lo[r] = reps[r].lower;
    hi[r] = reps[r].upper;
  }
  out.mean_lower = finite_mean(lo);
  out.mean_upper = finite_mean(hi);
  out.sd_lower = finite_sd(lo);
  out.sd_upper = finite_sd(hi);
  for (const auto& r : reps) {
    const bool miss = r.empty || out.truth < r.lower - 3.0 * out.sd_lower ||
                      out.truth > r.upper + 3.0 * out.sd_upper;
    if (miss) ++out.violations;
  }
  return out;
}

ToyCheck toy_bound_check(const DgpConfig& cfg) {
  const SimulatedPanel sim = generate_toy_anticipation(cfg);
  const double n = static_cast<double>(sim.panel.size());
  std::size_t anticipating = 0;
  for (int a : sim.anticipation) anticipating += a != 0 ? 1 : 0;
  ToyCheck out;
  out.share_anticipating = static_cast<double>(anticipating) / n;
  out.share_treated = static_cast<double>(sim.panel.n_treated()) / n;
  const double pa = out.share_anticipating, pd = out.share_treated;
  out.se = std::sqrt(pa * (1.0 - pa) / n + pd * (1.0 - pd) / n);
  return out;
}

}  // namespace antbounds
