#include "antbounds/report.hpp"

#include <cmath>

namespace antbounds {

#ifndef ANTBOUNDS_VERSION
#define ANTBOUNDS_VERSION "0.0.0"
#endif

const char* version() noexcept { return ANTBOUNDS_VERSION; }

Json number_or_unbounded(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return "unbounded";
}

namespace {

Json extended(const ExtendedReal& x) {
  return x.is_finite() ? Json(x.value()) : Json("unbounded");
}

template <typename T>
Json optional_number(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json to_json(const RunManifest& m) {
  Json j;
  j["command"] = m.command;
  j["tool_version"] = version();
  j["config"] = m.config;
  j["input"] = m.input;
  if (m.seed) j["seed"] = *m.seed;
  return j;
}

Json to_json(const SignRegime& r) {
  return Json{{"sign_mu", r.sign_mu}, {"sign_tau", r.sign_tau}};
}

Json to_json(const IdentifiedInterval& iv) {
  Json j;
  j["lower"] = number_or_unbounded(iv.lower);
  j["upper"] = number_or_unbounded(iv.upper);
  j["assumptions"] = to_string(iv.tag);
  j["pi_used"] = iv.pi_used;
  j["epsilon_used"] = optional_number(iv.epsilon_used);
  j["regime"] = iv.regime ? to_json(*iv.regime) : Json(nullptr);
  return j;
}

Json to_json(const VarianceComponents& vc) {
  return Json{{"sigma_l", vc.sigma_l}, {"sigma_u", vc.sigma_u},
              {"sigma", vc.sigma},     {"sigma_m", vc.sigma_m},
              {"n", vc.n}};
}

Json to_json(const ConfidenceSet& cs) {
  return Json{{"lower", cs.lower},
              {"upper", cs.upper},
              {"c_n", cs.c_n},
              {"alpha", cs.alpha},
              {"delta_hat", cs.delta_hat}};
}

Json to_json(const InferenceResult& r) {
  Json j;
  j["identified_set"] = to_json(r.interval);
  j["variances"] = to_json(r.variances);
  j["confidence_set"] = to_json(r.cs);
  j["t_tilde"] = r.t_tilde;
  j["robust_null"] = r.verdict ? Json(to_string(*r.verdict)) : Json(nullptr);
  return j;
}

Json to_json(const SweepResult& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"pi", row.pi},
                        {"epsilon", optional_number(row.epsilon)},
                        {"set_l", row.set_lower},
                        {"set_u", row.set_upper},
                        {"cs_l", row.cs_lower},
                        {"cs_u", row.cs_upper},
                        {"c_n", row.c_n}});
  }
  Json j;
  j["rows"] = std::move(rows);
  j["cutoff_pi"] = optional_number(r.cutoff_pi);
  j["refined_cutoff_pi"] = optional_number(r.refined_cutoff_pi);
  return j;
}

Json to_json(const CicBoundsResult& r) {
  Json j;
  j["q"] = r.q;
  j["m_q"] = r.m_q;
  j["phi_u"] = r.phi_u ? Json(*r.phi_u) : Json("unbounded");
  j["phi_l"] = r.phi_l ? Json(*r.phi_l) : Json("unbounded");
  j["phi_u_opposite_sign_only"] = r.phi_u_opposite_sign_only;
  j["phi_l_opposite_sign_only"] = r.phi_l_opposite_sign_only;
  j["phi_tilde_u"] = extended(r.phi_tilde_u);
  j["phi_tilde_l"] = extended(r.phi_tilde_l);
  j["interval"] = r.interval ? to_json(*r.interval) : Json(nullptr);
  j["diagnostic"] = r.diagnostic;
  return j;
}

Json to_json(const DgpConfig& c) {
  Json j;
  j["n"] = c.n;
  j["mu"] = c.mu;
  j["tau"] = c.tau;
  j["tau2"] = c.tau2;
  j["lambda"] = c.lambda;
  j["epsilon"] = c.epsilon;
  j["p_treat"] = c.p_treat;
  j["base_control"] = c.base_control;
  j["base_treated"] = c.base_treated;
  j["trend"] = c.trend;
  j["noise_sd"] = c.noise_sd;
  j["rho"] = c.rho;
  j["noise"] = c.noise == NoiseKind::kGaussian ? "gaussian" : "student_t5";
  if (c.toy) {
    j["toy"] = Json{{"alpha_slope", c.toy->alpha_slope},
                    {"density_power", c.toy->density_power}};
  }
  j["seed"] = c.seed;
  j["falsification"] = c.falsification;
  return j;
}

Json to_json(const CoverageReport& r) {
  Json points = Json::array();
  for (const auto& p : r.points) {
    points.push_back(Json{{"lambda", p.lambda},
                          {"coverage", p.coverage},
                          {"mean_set_length", p.mean_set_length},
                          {"mean_cs_length", p.mean_cs_length},
                          {"falsification", p.falsification}});
  }
  Json j;
  j["reps"] = r.reps;
  j["alpha"] = r.alpha;
  j["pi"] = r.pi;
  j["seed"] = r.seed;
  j["points"] = std::move(points);
  j["min_coverage"] = r.min_coverage;
  return j;
}

Json to_json(const IdentityReport& r) {
  return Json{{"expected", r.expected},
              {"mean_m_hat", r.mean_m_hat},
              {"mc_se", r.mc_se},
              {"reps", r.reps},
              {"within_3se", r.within_3se}};
}

Json to_json(const DecompositionCheck& r) {
  return Json{{"variant", r.variant},
              {"m_hat", r.m_hat},
              {"expected", r.expected},
              {"se", r.se},
              {"ok", r.ok()}};
}

Json to_json(const ContainmentReport& r) {
  return Json{{"family", to_string(r.family)},
              {"truth", r.truth},
              {"reps", r.reps},
              {"violations", r.violations},
              {"mean_lower", number_or_unbounded(r.mean_lower)},
              {"mean_upper", number_or_unbounded(r.mean_upper)},
              {"sd_lower", r.sd_lower},
              {"sd_upper", r.sd_upper},
              {"falsification", r.falsification},
              {"contained", r.contained()}};
}

Json to_json(const ToyCheck& r) {
  return Json{{"share_anticipating", r.share_anticipating},
              {"share_treated", r.share_treated},
              {"se", r.se},
              {"ok", r.ok()}};
}

Json make_report(const RunManifest& manifest, Json results) {
  Json j;
  j["manifest"] = to_json(manifest);
  j["results"] = std::move(results);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace antbounds
