#include "antbounds/did_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "antbounds/error.hpp"

namespace antbounds {

SignRegime SignRegime::make(int sign_mu, int sign_tau) {
  if (sign_mu != 1 && sign_mu != -1) {
    throw DomainError("sign_mu must be +1 or -1");
  }
  if (sign_tau < -1 || sign_tau > 1) {
    throw DomainError("sign_tau must be +1, -1 or 0");
  }
  return SignRegime{sign_mu, sign_tau};
}

std::string to_string(AssumptionTag tag) {
  switch (tag) {
    case AssumptionTag::kBenchmark:
      return "benchmark";
    case AssumptionTag::kImperfect:
      return "imperfect";
    case AssumptionTag::kStaggered:
      return "staggered";
    case AssumptionTag::kCic:
      return "cic";
    case AssumptionTag::kBoundedOutcome:
      return "bounded_outcome";
    case AssumptionTag::kTrimming:
      return "trimming";
  }
  return "unknown";
}

bool IdentifiedInterval::bounded() const noexcept {
  return std::isfinite(lower) && std::isfinite(upper);
}

namespace {

void check_pi(double pi) {
  if (!(pi >= 0.0 && pi < 1.0)) {
    throw DomainError("unbounded identified set requires pi < 1 (pi must lie "
                      "in [0, 1))");
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string describe(const PiPolicy& policy) {
  return std::visit(
      Overloaded{
          [](const PiConstant& p) { return "const:" + fmt(p.value); },
          [](const PiTreatmentRatio&) { return std::string("treatment-ratio"); },
          [](const PiPerStratum&) { return std::string("stratum"); },
          [](const PiStaggered& p) { return "staggered:" + fmt(p.delta); },
      },
      policy);
}

double resolve_pi(const PiPolicy& policy, const TwoPeriodPanel& panel) {
  const double pi = std::visit(
      Overloaded{
          [](const PiConstant& p) { return p.value; },
          [&](const PiTreatmentRatio&) { return treatment_ratio(panel); },
          [](const PiPerStratum&) -> double {
            throw DomainError("per-stratum pi has no scalar value");
          },
          [](const PiStaggered&) -> double {
            throw DomainError("staggered pi needs a cohort panel");
          },
      },
      policy);
  check_pi(pi);
  return pi;
}

std::map<std::string, double> resolve_pi_per_stratum(
    const PiPolicy& policy, const TwoPeriodPanel& panel) {
  std::map<std::string, double> out;
  for (const auto& label : panel.strata()) {
    const auto rows = panel.stratum_rows(label);
    double pi = 0.0;
    if (const auto* per = std::get_if<PiPerStratum>(&policy)) {
      if (per->values.empty()) {
        const auto treated = std::count_if(
            rows.begin(), rows.end(), [](const auto& r) { return r.d == 1; });
        pi = static_cast<double>(treated) / static_cast<double>(rows.size());
      } else {
        auto it = per->values.find(label);
        if (it == per->values.end()) {
          throw DomainError("no pi supplied for stratum '" + label + "'");
        }
        pi = it->second;
      }
    } else if (std::holds_alternative<PiTreatmentRatio>(policy)) {
      pi = treatment_ratio(panel);
    } else {
      pi = resolve_pi(policy, panel);
    }
    check_pi(pi);
    out[label] = pi;
  }
  return out;
}

double did_estimand(const GroupStats& s) {
  const double m = (s.mean[1][1] - s.mean[1][0]) - (s.mean[0][1] - s.mean[0][0]);
  if (!std::isfinite(m)) throw NumericalError("DID estimate overflowed");
  return m;
}

double did_estimand(const TwoPeriodPanel& panel, const GTransform& g) {
  return did_estimand(group_stats(panel, g));
}

EndpointFactors benchmark_factors(double pi, const SignRegime& regime) {
  check_pi(pi);
  const int s = regime.product();
  return {1.0, 1.0 / (1.0 - s * pi)};
}

EndpointFactors imperfect_factors(double pi, double epsilon,
                                  const SignRegime& regime) {
  check_pi(pi);
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw DomainError("epsilon must lie in [0, 1]");
  }
  const int s = regime.product();
  const double den1 = 1.0 + s * pi * epsilon;
  const double den2 = 1.0 - s * pi * (1.0 - epsilon);
  if (!(den1 > 0.0) || !(den2 > 0.0)) {
    throw DomainError("unbounded identified set: nonpositive denominator");
  }
  return {1.0 / den1, 1.0 / den2};
}

IdentifiedInterval scale_interval(double m, const EndpointFactors& k) {
  const double a = m * k.first;
  const double b = m * k.second;
  IdentifiedInterval out;
  out.lower = std::min(a, b);
  out.upper = std::max(a, b);
  return out;
}

IdentifiedInterval identified_set_benchmark(double m, double pi,
                                            const SignRegime& regime) {
  auto out = scale_interval(m, benchmark_factors(pi, regime));
  out.tag = AssumptionTag::kBenchmark;
  out.pi_used = pi;
  out.regime = regime;
  return out;
}

IdentifiedInterval identified_set_imperfect(double m, double pi,
                                            double epsilon,
                                            const SignRegime& regime) {
  auto out = scale_interval(m, imperfect_factors(pi, epsilon, regime));
  out.tag = AssumptionTag::kImperfect;
  out.pi_used = pi;
  out.epsilon_used = epsilon;
  out.regime = regime;
  return out;
}

double staggered_estimand(const CohortPanel& panel, int e, int s, int t,
                          const GTransform& g) {
  if (!(s >= 1 && s < e && e <= t && t <= panel.periods())) {
    throw DomainError("staggered estimand needs 1 <= s < e <= t <= T (got s=" +
                      std::to_string(s) + ", e=" + std::to_string(e) +
                      ", t=" + std::to_string(t) + ")");
  }
  double sum_cohort = 0.0;
  double sum_never = 0.0;
  std::size_t n_cohort = 0;
  std::size_t n_never = 0;
  for (const auto& r : panel.rows()) {
    const double change = g(r.outcomes[t - 1]) - g(r.outcomes[s - 1]);
    if (!r.cohort) {
      sum_never += change;
      ++n_never;
    } else if (*r.cohort == e) {
      sum_cohort += change;
      ++n_cohort;
    }
  }
  if (n_cohort == 0) {
    throw DomainError("cohort " + std::to_string(e) + " is empty");
  }
  return sum_cohort / static_cast<double>(n_cohort) -
         sum_never / static_cast<double>(n_never);
}

double staggered_pi(int e, int s, double delta, const CohortPanel& panel) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("discount delta must lie in (0, 1)");
  }
  if (!(s < e)) throw DomainError("staggered pi needs s < e");
  return std::pow(delta, e - s) * panel.share_treated_by(e);
}

IdentifiedInterval identified_set_staggered(double m, double pi,
                                            const SignRegime& regime) {
  auto out = identified_set_benchmark(m, pi, regime);
  out.tag = AssumptionTag::kStaggered;
  return out;
}

std::map<std::string, double> conditional_estimand(const TwoPeriodPanel& panel,
                                                   const GTransform& g) {
  std::map<std::string, double> out;
  for (const auto& label : panel.strata()) {
    auto rows = panel.stratum_rows(label);
    const auto treated = std::count_if(rows.begin(), rows.end(),
                                       [](const auto& r) { return r.d == 1; });
    const auto control = static_cast<std::ptrdiff_t>(rows.size()) - treated;
    if (treated == 0 || control == 0) {
      throw DataError("stratum '" + label + "' lacks comparison group");
    }
    out[label] = did_estimand(TwoPeriodPanel(std::move(rows)), g);
  }
  return out;
}

std::map<std::string, IdentifiedInterval> conditional_identified_sets(
    const TwoPeriodPanel& panel, const GTransform& g, const PiPolicy& policy,
    const SignRegime& regime) {
  const auto m = conditional_estimand(panel, g);
  const auto pi = resolve_pi_per_stratum(policy, panel);
  std::map<std::string, IdentifiedInterval> out;
  for (const auto& [label, value] : m) {
    out[label] = identified_set_benchmark(value, pi.at(label), regime);
  }
  return out;
}

bool sign_conflict(double m, const SignRegime& regime) noexcept {
  return (m > 0.0 && regime.sign_mu < 0) || (m < 0.0 && regime.sign_mu > 0);
}

SignRegime auto_flip_sign(double m, const SignRegime& regime) noexcept {
  if (!sign_conflict(m, regime)) return regime;
  return SignRegime{-regime.sign_mu, regime.sign_tau};
}

}  // namespace antbounds
