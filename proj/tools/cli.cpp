#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "antbounds/alt_bounds.hpp"
#include "antbounds/cic_bounds.hpp"
#include "antbounds/did_bounds.hpp"
#include "antbounds/error.hpp"
#include "antbounds/inference.hpp"
#include "antbounds/panel.hpp"
#include "antbounds/report.hpp"
#include "antbounds/sensitivity.hpp"
#include "antbounds/simulation.hpp"

namespace antbounds::cli {

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Shortest text that parses back to the same double.
std::string full(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string interval_text(double lo, double hi) {
  return "[" + num(lo) + ", " + num(hi) + "]";
}

std::string paint(const Streams& io, const std::string& text, bool good) {
  if (!io.color) return text;
  return (good ? "\033[32m" : "\033[31m") + text + "\033[0m";
}

double parse_double(const std::string& flag, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw DomainError(flag + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& flag, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(flag, item));
  if (out.empty()) throw DomainError(flag + ": empty list");
  return out;
}

int parse_sign(const std::string& flag, const std::string& text, bool allow_zero) {
  if (text == "pos") return 1;
  if (text == "neg") return -1;
  if (text == "zero" && allow_zero) return 0;
  throw DomainError(flag + ": expected pos|neg" + (allow_zero ? "|zero" : "") +
                    ", got '" + text + "'");
}

PiPolicy parse_pi(const std::string& text) {
  if (text == "treatment-ratio") return PiTreatmentRatio{};
  if (text == "stratum") return PiPerStratum{};
  if (text.rfind("const:", 0) == 0) return PiConstant{parse_double("--pi", text.substr(6))};
  if (text.rfind("staggered:", 0) == 0) {
    return PiStaggered{parse_double("--pi", text.substr(10))};
  }
  throw DomainError("--pi: expected const:<v>|treatment-ratio|stratum|staggered:<delta>, got '" +
                    text + "'");
}

// Flags shared by estimate, infer, sensitivity and cic.
struct BoundFlags {
  std::string input;
  std::string layout = "wide";
  std::string g = "identity";
  std::string pi = "const:0";
  std::string sign_mu;
  std::string sign_tau;
  std::optional<double> epsilon;
  bool auto_flip = false;
  std::string format = "text";
  std::string cohort;
  std::vector<std::string> summary;
  double alpha = 0.95;

  SignRegime regime() const {
    return SignRegime::make(parse_sign("--sign-mu", sign_mu, false),
                            parse_sign("--sign-tau", sign_tau, true));
  }
};

void add_bound_flags(CLI::App* cmd, BoundFlags& f, bool with_input_required) {
  auto* in = cmd->add_option("--input", f.input, "Panel CSV file");
  if (with_input_required) in->required();
  cmd->add_option("--layout", f.layout, "wide|long")->capture_default_str();
  cmd->add_option("--g", f.g, "identity|indicator:<u>")->capture_default_str();
  cmd->add_option("--pi", f.pi, "const:<v>|treatment-ratio|stratum|staggered:<delta>")
      ->capture_default_str();
  cmd->add_option("--sign-mu", f.sign_mu, "pos|neg")->required();
  cmd->add_option("--sign-tau", f.sign_tau, "pos|neg|zero")->required();
  cmd->add_option("--epsilon", f.epsilon, "Wrong-anticipation share");
  cmd->add_flag("--auto-flip-sign", f.auto_flip, "Flip sign-mu to match the estimate");
  cmd->add_option("--format", f.format, "text|json|csv")->capture_default_str();
}

void check_format(const std::string& format, bool allow_csv) {
  if (format == "text" || format == "json" || (allow_csv && format == "csv")) return;
  throw DomainError("--format: unsupported value '" + format + "'");
}

SignRegime settle_regime(double m, SignRegime regime, const BoundFlags& f,
                         const Streams& io, Json& config) {
  if (sign_conflict(m, regime)) {
    if (f.auto_flip) {
      regime = auto_flip_sign(m, regime);
      io.err << "warning: estimate " << num(m)
             << " contradicts --sign-mu; sign flipped\n";
    } else {
      io.err << "warning: estimate " << num(m)
             << " contradicts --sign-mu; proceeding with the declared regime\n";
    }
  }
  config["regime"] = to_json(regime);
  return regime;
}

Json panel_digest(const TwoPeriodPanel& panel, const std::string& path) {
  return Json{{"path", path},
              {"rows", panel.size()},
              {"n_treated", panel.n_treated()},
              {"n_control", panel.n_control()}};
}

Json base_config(const BoundFlags& f) {
  Json c;
  c["g"] = f.g;
  c["pi_policy"] = f.pi;
  c["sign_mu"] = f.sign_mu;
  c["sign_tau"] = f.sign_tau;
  c["epsilon"] = f.epsilon ? Json(*f.epsilon) : Json(nullptr);
  c["auto_flip_sign"] = f.auto_flip;
  return c;
}

struct Summary {
  double m = 0.0;
  double se = 0.0;
  std::size_t n = 1;
};

Summary parse_summary(const std::vector<std::string>& items) {
  Summary s;
  bool have_m = false, have_se = false;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw DomainError("--summary: expected key=value, got '" + item + "'");
    }
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    if (key == "m") {
      s.m = parse_double("--summary m", val);
      have_m = true;
    } else if (key == "se") {
      s.se = parse_double("--summary se", val);
      have_se = true;
    } else if (key == "n") {
      const double n = parse_double("--summary n", val);
      if (n < 1 || n != std::floor(n)) throw DomainError("--summary n: expected a positive integer");
      s.n = static_cast<std::size_t>(n);
    } else {
      throw DomainError("--summary: unknown key '" + key + "'");
    }
  }
  if (!have_m || !have_se) throw DomainError("--summary: m and se are required");
  return s;
}

// ---------------------------------------------------------------- estimate

int cmd_estimate(const BoundFlags& f, const Streams& io) {
  check_format(f.format, false);
  const GTransform g = parse_gtransform(f.g);
  const PiPolicy policy = parse_pi(f.pi);
  SignRegime regime = f.regime();
  RunManifest manifest;
  manifest.command = "estimate";
  manifest.config = base_config(f);
  Json results;

  if (!f.cohort.empty()) {
    const auto est = parse_list("--cohort", f.cohort);
    if (est.size() != 3) throw DomainError("--cohort: expected e,s,t");
    const int e = static_cast<int>(est[0]), s = static_cast<int>(est[1]),
              t = static_cast<int>(est[2]);
    const CohortPanel panel = load_cohort_file(f.input);
    const double m = staggered_estimand(panel, e, s, t, g);
    double pi = 0.0;
    if (const auto* st = std::get_if<PiStaggered>(&policy)) {
      pi = staggered_pi(e, s, st->delta, panel);
    } else if (const auto* c = std::get_if<PiConstant>(&policy)) {
      pi = c->value;
    } else {
      throw DomainError("--pi: cohort panels take const:<v> or staggered:<delta>");
    }
    regime = settle_regime(m, regime, f, io, manifest.config);
    const IdentifiedInterval iv = identified_set_staggered(m, pi, regime);
    manifest.config["cohort"] = Json{{"e", e}, {"s", s}, {"t", t}};
    manifest.config["pi_resolved"] = pi;
    manifest.input = Json{{"path", f.input}, {"rows", panel.size()},
                          {"periods", panel.periods()},
                          {"never_treated", panel.never_treated_size()}};
    results = Json{{"m_hat", m}, {"pi", pi}, {"identified_set", to_json(iv)}};
    if (f.format == "json") {
      io.out << dump(make_report(manifest, results));
    } else {
      io.out << "m_hat(" << e << "," << s << "," << t << ") = " << num(m)
             << "\npi = " << num(pi) << " (" << describe(policy) << ")\n"
             << "identified set " << interval_text(iv.lower, iv.upper) << " ("
             << to_string(iv.tag) << ")\n";
    }
    return kOk;
  }

  const TwoPeriodPanel panel = load_two_period_file(f.input, parse_layout(f.layout));
  manifest.input = panel_digest(panel, f.input);

  if (std::holds_alternative<PiPerStratum>(policy)) {
    if (f.epsilon) throw DomainError("--epsilon is not supported with --pi stratum");
    const auto ms = conditional_estimand(panel, g);
    const auto pis = resolve_pi_per_stratum(policy, panel);
    Json strata = Json::array();
    std::ostringstream text;
    for (const auto& [label, m] : ms) {
      const SignRegime r = settle_regime(m, regime, f, io, manifest.config);
      const IdentifiedInterval iv = identified_set_benchmark(m, pis.at(label), r);
      strata.push_back(Json{{"stratum", label}, {"m_hat", m}, {"pi", pis.at(label)},
                            {"identified_set", to_json(iv)}});
      text << "stratum " << (label.empty() ? "(none)" : label) << ": m_hat = " << num(m)
           << ", pi = " << num(pis.at(label)) << ", set "
           << interval_text(iv.lower, iv.upper) << "\n";
    }
    manifest.config.erase("regime");
    results = Json{{"strata", strata}};
    if (f.format == "json") {
      io.out << dump(make_report(manifest, results));
    } else {
      io.out << text.str();
    }
    return kOk;
  }

  const double pi = resolve_pi(policy, panel);
  const double m = did_estimand(panel, g);
  regime = settle_regime(m, regime, f, io, manifest.config);
  const IdentifiedInterval iv = f.epsilon
                                    ? identified_set_imperfect(m, pi, *f.epsilon, regime)
                                    : identified_set_benchmark(m, pi, regime);
  manifest.config["pi_resolved"] = pi;
  results = Json{{"m_hat", m}, {"pi", pi}, {"identified_set", to_json(iv)}};
  if (f.format == "json") {
    io.out << dump(make_report(manifest, results));
  } else {
    io.out << "m_hat = " << num(m) << "\npi = " << num(pi) << " (" << describe(policy)
           << ")\nidentified set " << interval_text(iv.lower, iv.upper) << " ("
           << to_string(iv.tag) << ", s = " << regime.product() << ")\n";
  }
  return kOk;
}

// ------------------------------------------------------------------- infer

struct Estimate {
  double m = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  std::optional<TwoPeriodPanel> panel;
};

double scalar_pi(const PiPolicy& policy, const std::optional<TwoPeriodPanel>& panel) {
  if (const auto* c = std::get_if<PiConstant>(&policy)) {
    if (!(c->value >= 0.0 && c->value < 1.0)) throw DomainError("--pi: value must lie in [0, 1)");
    return c->value;
  }
  if (!panel) throw DomainError("--pi: summary mode takes const:<v> only");
  if (!std::holds_alternative<PiTreatmentRatio>(policy)) {
    throw DomainError("--pi: this command takes const:<v> or treatment-ratio");
  }
  return resolve_pi(policy, *panel);
}

Estimate load_estimate(const BoundFlags& f, RunManifest& manifest) {
  Estimate e;
  if (!f.summary.empty()) {
    if (!f.input.empty()) throw DomainError("--summary and --input are exclusive");
    const Summary s = parse_summary(f.summary);
    e.m = s.m;
    e.se = s.se;
    e.n = s.n;
    manifest.input = Json{{"summary", Json{{"m", s.m}, {"se", s.se}, {"n", s.n}}}};
    return e;
  }
  if (f.input.empty()) throw DomainError("either --input or --summary is required");
  e.panel.emplace(load_two_period_file(f.input, parse_layout(f.layout)));
  manifest.input = panel_digest(*e.panel, f.input);
  const GTransform g = parse_gtransform(f.g);
  e.m = did_estimand(*e.panel, g);
  const VarianceComponents vc = bound_variances(*e.panel, g, 0.0, SignRegime::make(1, 0));
  e.n = vc.n;
  e.se = vc.sigma_m / std::sqrt(static_cast<double>(vc.n));
  return e;
}

int cmd_infer(const BoundFlags& f, const Streams& io) {
  check_format(f.format, false);
  RunManifest manifest;
  manifest.command = "infer";
  manifest.config = base_config(f);
  manifest.config["alpha"] = f.alpha;
  const PiPolicy policy = parse_pi(f.pi);
  const Estimate est = load_estimate(f, manifest);
  const double pi = scalar_pi(policy, est.panel);
  manifest.config["pi_resolved"] = pi;
  const SignRegime regime = settle_regime(est.m, f.regime(), f, io, manifest.config);

  const InferenceResult r =
      est.panel ? panel_infer(*est.panel, parse_gtransform(f.g), pi, f.epsilon, regime, f.alpha)
                : summary_mode_infer(est.m, est.se, est.n, pi, f.epsilon, regime, f.alpha);
  Json results = to_json(r);
  results["m_hat"] = est.m;
  results["se"] = est.se;
  if (f.format == "json") {
    io.out << dump(make_report(manifest, results));
    return kOk;
  }
  io.out << "m_hat = " << num(est.m) << " (se " << num(est.se) << ")\n"
         << "pi = " << num(pi) << "\n"
         << "identified set " << interval_text(r.interval.lower, r.interval.upper) << "\n"
         << "confidence set " << interval_text(r.cs.lower, r.cs.upper) << " at alpha "
         << num(f.alpha) << " (C_n = " << num(r.cs.c_n) << ")\n"
         << "sigma_l = " << num(r.variances.sigma_l) << ", sigma_u = "
         << num(r.variances.sigma_u) << ", n = " << r.variances.n << "\n"
         << "t_tilde = " << num(r.t_tilde) << "\n";
  if (r.verdict) {
    io.out << "robust null check: "
           << paint(io, to_string(*r.verdict), *r.verdict == RobustVerdict::kRobustlyRejected)
           << " (t* = " << num(tstar(f.alpha)) << ")\n";
  }
  return kOk;
}

// ------------------------------------------------------------- sensitivity

int cmd_sensitivity(const BoundFlags& f, const std::string& pi_grid,
                    const std::string& eps_grid, const Streams& io) {
  check_format(f.format, true);
  RunManifest manifest;
  manifest.command = "sensitivity";
  manifest.config = base_config(f);
  manifest.config.erase("pi_policy");
  manifest.config["alpha"] = f.alpha;
  manifest.config["pi_grid"] = parse_list("--pi-grid", pi_grid);
  const Estimate est = load_estimate(f, manifest);
  const SignRegime regime = settle_regime(est.m, f.regime(), f, io, manifest.config);

  std::vector<SweepPoint> grid;
  const auto pis = parse_list("--pi-grid", pi_grid);
  std::vector<std::optional<double>> eps;
  if (eps_grid.empty()) {
    eps.push_back(f.epsilon);
  } else {
    for (double e : parse_list("--epsilon-grid", eps_grid)) eps.emplace_back(e);
    manifest.config["epsilon_grid"] = parse_list("--epsilon-grid", eps_grid);
  }
  for (double p : pis) {
    for (const auto& e : eps) grid.push_back({p, e});
  }
  const SweepResult r = sensitivity_sweep(est.m, est.se, est.n, grid, regime, f.alpha);

  std::string summary = "cutoff_pi=" + (r.cutoff_pi ? full(*r.cutoff_pi) : "none") +
                        " refined_cutoff_pi=" +
                        (r.refined_cutoff_pi ? full(*r.refined_cutoff_pi) : "none");
  if (f.format == "json") {
    Json results = to_json(r);
    results["m_hat"] = est.m;
    results["se"] = est.se;
    io.out << dump(make_report(manifest, results));
  } else if (f.format == "csv") {
    io.out << "pi,epsilon,set_l,set_u,cs_l,cs_u\n";
    for (const auto& row : r.rows) {
      io.out << full(row.pi) << "," << (row.epsilon ? full(*row.epsilon) : "") << ","
             << full(row.set_lower) << "," << full(row.set_upper) << ","
             << full(row.cs_lower) << "," << full(row.cs_upper) << "\n";
    }
    io.err << "# " << summary << "\n";
  } else {
    io.out << "pi        epsilon   set                       cs\n";
    for (const auto& row : r.rows) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-9s %-9s %-25s %s", num(row.pi).c_str(),
                    row.epsilon ? num(*row.epsilon).c_str() : "-",
                    interval_text(row.set_lower, row.set_upper).c_str(),
                    interval_text(row.cs_lower, row.cs_upper).c_str());
      io.out << buf << (row.cs_contains_zero() ? "  contains 0" : "") << "\n";
    }
    io.out << "robustness cutoff: "
           << (r.cutoff_pi ? "pi = " + num(*r.cutoff_pi) : "none on grid");
    if (r.refined_cutoff_pi) io.out << " (refined " << num(*r.refined_cutoff_pi) << ")";
    io.out << "\n";
  }
  return kOk;
}

// --------------------------------------------------------------------- cic

std::string extended_text(const ExtendedReal& x) {
  return x.is_finite() ? num(x.value()) : "unbounded";
}

int cmd_cic(const BoundFlags& f, const std::string& qs, const Streams& io) {
  check_format(f.format, false);
  RunManifest manifest;
  manifest.command = "cic";
  manifest.config = base_config(f);
  manifest.config.erase("g");
  manifest.config.erase("epsilon");
  if (f.epsilon) throw DomainError("--epsilon is not supported by cic");
  const TwoPeriodPanel panel = load_two_period_file(f.input, parse_layout(f.layout));
  manifest.input = panel_digest(panel, f.input);
  const double pi = scalar_pi(parse_pi(f.pi), panel);
  manifest.config["pi_resolved"] = pi;
  const auto levels = parse_list("--q", qs);
  manifest.config["q"] = levels;
  const SignRegime regime = f.regime();
  manifest.config["regime"] = to_json(regime);
  const auto dists = CicDistributions::from_panel(panel);

  Json rows = Json::array();
  std::ostringstream text;
  text << "q       m_q       phi_u     phi_l     phi~_u    phi~_l    interval\n";
  for (double q : levels) {
    const CicBoundsResult r = cic_identified_set(q, pi, regime, dists);
    rows.push_back(to_json(r));
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-7s %-9s %-9s %-9s %-9s %-9s ", num(q).c_str(),
                  num(r.m_q).c_str(), r.phi_u ? num(*r.phi_u).c_str() : "unbounded",
                  r.phi_l ? num(*r.phi_l).c_str() : "unbounded",
                  extended_text(r.phi_tilde_u).c_str(), extended_text(r.phi_tilde_l).c_str());
    text << buf;
    if (r.interval) {
      const auto& iv = *r.interval;
      text << "[" << (std::isfinite(iv.lower) ? num(iv.lower) : "unbounded") << ", "
           << (std::isfinite(iv.upper) ? num(iv.upper) : "unbounded") << "]";
    } else {
      text << "empty";
    }
    if (!r.diagnostic.empty()) text << "  (" << r.diagnostic << ")";
    text << "\n";
  }
  if (f.format == "json") {
    io.out << dump(make_report(manifest, Json{{"rows", rows}}));
  } else {
    io.out << text.str();
  }
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimFlags {
  std::string scenario;
  std::optional<std::size_t> n;
  std::optional<std::size_t> reps;
  std::uint64_t seed = 20240611;
  unsigned workers = 1;
  std::string format = "json";
  std::optional<double> mu, tau, lambda, epsilon, pi, tau1, tau2, alpha;
  std::optional<double> min_coverage;
  std::string noise = "gaussian";
  bool falsification = false;
  double alpha_slope = 1.0;
  double density_power = 2.0;
  double delta = 0.5;
  std::string shares = "0,0.3,0.3";
  std::string cohort = "3,2,3";
};

unsigned resolve_workers(unsigned w) {
  if (w > 0) return w;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

DgpConfig sim_config(const SimFlags& f, std::size_t n_default, double mu, double tau,
                     double lambda) {
  DgpConfig c;
  c.n = f.n.value_or(n_default);
  c.mu = f.mu.value_or(mu);
  c.tau = f.tau.value_or(tau);
  c.lambda = f.lambda.value_or(lambda);
  c.epsilon = f.epsilon.value_or(0.0);
  if (f.noise == "gaussian") {
    c.noise = NoiseKind::kGaussian;
  } else if (f.noise == "t5") {
    c.noise = NoiseKind::kStudentT;
  } else {
    throw DomainError("--noise: expected gaussian|t5, got '" + f.noise + "'");
  }
  c.seed = f.seed;
  c.falsification = f.falsification;
  return c;
}

void require_tag(const DgpConfig& cfg, double pi) {
  if (!cfg.satisfies_assumptions(pi) && !cfg.falsification) {
    throw DomainError("configuration violates the maintained assumptions for pi = " + num(pi) +
                      "; pass --falsification to run it anyway");
  }
}

int cmd_simulate(const SimFlags& f, const Streams& io) {
  check_format(f.format, false);
  const unsigned workers = resolve_workers(f.workers);
  RunManifest manifest;
  manifest.command = "simulate";
  manifest.seed = f.seed;
  Json results;
  bool passed = true;
  std::ostringstream text;

  if (f.scenario == "benchmark") {
    const double pi = f.pi.value_or(0.4);
    const double alpha = f.alpha.value_or(0.95);
    const std::size_t reps = f.reps.value_or(2000);
    std::vector<DgpConfig> grid;
    const std::vector<double> lambdas =
        f.lambda ? std::vector<double>{*f.lambda} : std::vector<double>{0.0, pi / 2.0, pi};
    for (double lam : lambdas) {
      DgpConfig c = sim_config(f, 500, 1.0, -0.5, lam);
      c.lambda = lam;
      require_tag(c, pi);
      grid.push_back(c);
    }
    const CoverageReport r = coverage_study(grid, pi, alpha, reps, f.seed, workers);
    const double mc = std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(reps));
    const double threshold = f.min_coverage.value_or(reps >= 2000 ? 0.945 : alpha - 3.0 * mc);
    const bool falsification = f.falsification;
    passed = falsification || r.min_coverage >= threshold;
    manifest.config = to_json(grid.front());
    manifest.config.erase("lambda");
    manifest.config.erase("seed");
    manifest.config["lambda_grid"] = lambdas;
    manifest.config["scenario"] = f.scenario;
    results = to_json(r);
    results["threshold"] = threshold;
    results["falsification"] = falsification;
    results["passed"] = passed;
    for (const auto& p : r.points) {
      text << "lambda = " << num(p.lambda) << ": coverage " << num(p.coverage)
           << ", mean CS length " << num(p.mean_cs_length) << "\n";
    }
    text << "min coverage " << num(r.min_coverage) << " (threshold " << num(threshold) << ")\n";
  } else if (f.scenario == "imperfect" || f.scenario == "staggered") {
    const bool stag = f.scenario == "staggered";
    ContainmentSpec spec;
    spec.family = stag ? BoundFamily::kStaggered : BoundFamily::kImperfect;
    spec.cfg = sim_config(f, stag ? 30000 : 20000, 1.0, -0.5, 0.3);
    if (!stag) spec.cfg.epsilon = f.epsilon.value_or(0.2);
    spec.pi = f.pi.value_or(0.4);
    spec.reps = f.reps.value_or(50);
    Json extra;
    if (stag) {
      spec.staggered.cohort_shares = parse_list("--shares", f.shares);
      spec.staggered.periods = static_cast<int>(spec.staggered.cohort_shares.size());
      spec.staggered.delta = f.delta;
      const auto est = parse_list("--cohort", f.cohort);
      if (est.size() != 3) throw DomainError("--cohort: expected e,s,t");
      spec.e = static_cast<int>(est[0]);
      spec.s = static_cast<int>(est[1]);
      spec.t = static_cast<int>(est[2]);
      double share = 0.0;
      for (int e = 1; e <= spec.e && e <= spec.staggered.periods; ++e) {
        share += spec.staggered.cohort_shares[e - 1];
      }
      spec.pi = share;  // lambda must not exceed P[E <= e]
      extra = Json{{"cohort_shares", spec.staggered.cohort_shares},
                   {"delta", spec.staggered.delta},
                   {"e", spec.e}, {"s", spec.s}, {"t", spec.t}};
    }
    require_tag(spec.cfg, spec.pi);
    const ContainmentReport r = containment_study(spec, workers);
    const DecompositionCheck d =
        stag ? decomposition_staggered(spec.cfg, spec.staggered, spec.e, spec.s, spec.t)
             : decomposition_imperfect(spec.cfg);
    passed = spec.cfg.falsification || r.contained();
    manifest.config = to_json(spec.cfg);
    manifest.config.erase("seed");
    manifest.config["scenario"] = f.scenario;
    manifest.config["pi"] = spec.pi;
    manifest.config["reps"] = spec.reps;
    if (stag) manifest.config["design"] = extra;
    results = Json{{"containment", to_json(r)}, {"decomposition", to_json(d)},
                   {"falsification", spec.cfg.falsification}, {"passed", passed}};
    text << f.scenario << " containment: " << r.violations << " violations in " << r.reps
         << " reps (mean interval " << interval_text(r.mean_lower, r.mean_upper)
         << ", truth " << num(r.truth) << ")\n"
         << "decomposition: m_hat " << num(d.m_hat) << " vs " << num(d.expected) << " (se "
         << num(d.se) << ")\n";
  } else if (f.scenario == "toy") {
    DgpConfig c = sim_config(f, 20000, 1.0, -0.5, 0.0);
    c.toy = ToyModel{f.alpha_slope, f.density_power};
    const std::size_t reps = f.reps.value_or(20);
    std::vector<ToyCheck> checks(reps);
    parallel_for(reps, workers, [&](std::size_t r) {
      DgpConfig rc = c;
      rc.seed = replication_seed(f.seed, 0, r);
      checks[r] = toy_bound_check(rc);
    });
    Json arr = Json::array();
    std::size_t ok = 0;
    double share_a = 0.0, share_d = 0.0;
    for (const auto& ch : checks) {
      arr.push_back(to_json(ch));
      ok += ch.ok() ? 1 : 0;
      share_a += ch.share_anticipating;
      share_d += ch.share_treated;
    }
    passed = ok == reps;
    manifest.config = to_json(c);
    manifest.config.erase("seed");
    manifest.config["scenario"] = f.scenario;
    manifest.config["reps"] = reps;
    results = Json{{"checks", arr}, {"ok", ok}, {"passed", passed}};
    text << "toy model: P[A=1] " << num(share_a / reps) << " vs P[D=1] " << num(share_d / reps)
         << "; bound holds in " << ok << " of " << reps << " panels\n";
  } else if (f.scenario == "identity") {
    DgpConfig c = sim_config(f, 20000, 1.0, 0.4, 0.5);
    c.tau = f.tau1.value_or(f.tau.value_or(0.4));
    c.tau2 = f.tau2.value_or(0.1);
    const std::size_t reps = f.reps.value_or(200);
    const IdentityReport r = post_treatment_identity_check(c, reps, workers);
    passed = r.within_3se;
    manifest.config = to_json(c);
    manifest.config.erase("seed");
    manifest.config["scenario"] = f.scenario;
    results = to_json(r);
    results["passed"] = passed;
    text << "post-treatment identity: mean m_hat " << num(r.mean_m_hat) << " vs "
         << num(r.expected) << " (MC se " << num(r.mc_se) << ")\n";
  } else {
    throw DomainError("--scenario: expected benchmark|imperfect|toy|staggered|identity, got '" +
                      f.scenario + "'");
  }

  if (f.format == "json") {
    io.out << dump(make_report(manifest, results));
  } else {
    io.out << text.str() << paint(io, passed ? "PASS" : "FAIL", passed) << "\n";
  }
  return passed ? kOk : kThresholdFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, const Streams& io) {
  CLI::App app{"Bounds for difference-in-differences under anticipation"};
  app.name("antbounds");
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  BoundFlags est, inf, sens, cic;
  auto* c_est = app.add_subcommand("estimate", "Point estimate and identified set");
  add_bound_flags(c_est, est, true);
  c_est->add_option("--cohort", est.cohort, "e,s,t for a staggered cohort panel");

  auto* c_inf = app.add_subcommand("infer", "Identified set and confidence set");
  add_bound_flags(c_inf, inf, false);
  c_inf->add_option("--summary", inf.summary, "m=<v> se=<v> n=<v>")->expected(2, 3);
  c_inf->add_option("--alpha", inf.alpha, "Confidence level")->capture_default_str();

  std::string pi_grid, eps_grid;
  auto* c_sens = app.add_subcommand("sensitivity", "Sweep over anticipation bounds");
  add_bound_flags(c_sens, sens, false);
  c_sens->add_option("--summary", sens.summary, "m=<v> se=<v> n=<v>")->expected(2, 3);
  c_sens->add_option("--alpha", sens.alpha, "Confidence level")->capture_default_str();
  c_sens->add_option("--pi-grid", pi_grid, "Comma-separated pi values")->required();
  c_sens->add_option("--epsilon-grid", eps_grid, "Comma-separated epsilon values");

  std::string qs;
  cic.layout = "long";
  auto* c_cic = app.add_subcommand("cic", "Changes-in-changes quantile bounds");
  add_bound_flags(c_cic, cic, true);
  c_cic->add_option("--q", qs, "Comma-separated quantile levels")->required();

  SimFlags sim;
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo verification scenarios");
  c_sim->add_option("--scenario", sim.scenario, "benchmark|imperfect|toy|staggered|identity")
      ->required();
  c_sim->add_option("--n", sim.n, "Units per panel");
  c_sim->add_option("--reps", sim.reps, "Replications");
  c_sim->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  c_sim->add_option("--workers", sim.workers, "Worker threads (0 = all cores)")
      ->capture_default_str();
  c_sim->add_option("--format", sim.format, "json|text")->capture_default_str();
  c_sim->add_option("--mu", sim.mu, "True treatment effect");
  c_sim->add_option("--tau", sim.tau, "True anticipatory effect");
  c_sim->add_option("--lambda", sim.lambda, "True anticipation probability");
  c_sim->add_option("--epsilon", sim.epsilon, "Wrong-anticipation share");
  c_sim->add_option("--pi", sim.pi, "Bound supplied to the estimator");
  c_sim->add_option("--alpha", sim.alpha, "Confidence level");
  c_sim->add_option("--min-coverage", sim.min_coverage, "Coverage threshold");
  c_sim->add_option("--tau1", sim.tau1, "Pre-period anticipation shift (identity)");
  c_sim->add_option("--tau2", sim.tau2, "Post-period anticipation shift (identity)");
  c_sim->add_option("--noise", sim.noise, "gaussian|t5")->capture_default_str();
  c_sim->add_option("--alpha-slope", sim.alpha_slope, "Toy model slope")->capture_default_str();
  c_sim->add_option("--density-power", sim.density_power, "Toy model U density power")
      ->capture_default_str();
  c_sim->add_option("--delta", sim.delta, "Staggered discount")->capture_default_str();
  c_sim->add_option("--shares", sim.shares, "Staggered cohort shares")->capture_default_str();
  c_sim->add_option("--cohort", sim.cohort, "Staggered e,s,t")->capture_default_str();
  c_sim->add_flag("--falsification", sim.falsification, "Tag as a falsification run");

  std::vector<std::string> argv_store{"antbounds"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      io.out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(version()) + "\n"
                                                               : app.help());
      return kOk;
    }
    io.err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (c_est->parsed()) return cmd_estimate(est, io);
    if (c_inf->parsed()) return cmd_infer(inf, io);
    if (c_sens->parsed()) return cmd_sensitivity(sens, pi_grid, eps_grid, io);
    if (c_cic->parsed()) return cmd_cic(cic, qs, io);
    if (c_sim->parsed()) return cmd_simulate(sim, io);
  } catch (const NumericalError& e) {
    io.err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    io.err << "internal error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}

}  // namespace antbounds::cli
