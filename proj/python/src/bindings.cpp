#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <string>
#include <vector>

#include "antbounds/alt_bounds.hpp"
#include "antbounds/cic_bounds.hpp"
#include "antbounds/did_bounds.hpp"
#include "antbounds/error.hpp"
#include "antbounds/inference.hpp"
#include "antbounds/numerics.hpp"
#include "antbounds/report.hpp"
#include "antbounds/sensitivity.hpp"
#include "antbounds/simulation.hpp"

namespace py = pybind11;
using namespace antbounds;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw DomainError("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

TwoPeriodPanel make_panel(const Array& y0, const Array& y1, const IntArray& d,
                          const std::optional<std::vector<std::string>>& strata) {
  const auto v0 = to_vector(y0), v1 = to_vector(y1);
  if (d.ndim() != 1 || v0.size() != v1.size() || v0.size() != static_cast<std::size_t>(d.size())) {
    throw DomainError("y0, y1 and d must be one-dimensional and of equal length");
  }
  if (strata && strata->size() != v0.size()) {
    throw DomainError("strata must have one label per unit");
  }
  std::vector<TwoPeriodRecord> rows(v0.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = {std::to_string(i), v0[i], v1[i], d.data()[i],
               strata ? std::optional<std::string>((*strata)[i]) : std::nullopt};
  }
  return TwoPeriodPanel(std::move(rows));
}

SignRegime regime(int sign_mu, int sign_tau) { return SignRegime::make(sign_mu, sign_tau); }

py::dict simulated(const SimulatedPanel& s) {
  const std::size_t n = s.panel.size();
  Array y0(n), y1(n);
  IntArray d(n), a(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = s.panel.rows()[i];
    y0.mutable_data()[i] = r.y0;
    y1.mutable_data()[i] = r.y1;
    d.mutable_data()[i] = r.d;
    a.mutable_data()[i] = s.anticipation[i];
  }
  py::dict out;
  out["y0"] = y0;
  out["y1"] = y1;
  out["d"] = d;
  out["anticipation"] = a;
  return out;
}

// Results cross the boundary as plain dicts through the report serializer.
py::object as_python(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Difference-in-differences bounds under anticipation";
  m.attr("__version__") = version();

  static py::exception<Error> base_error(m, "AntboundsError");
  static py::exception<DomainError> domain_error(m, "DomainError", base_error.ptr());
  static py::exception<DataError> data_error(m, "DataError", base_error.ptr());
  static py::exception<NumericalError> numerical_error(m, "NumericalError", base_error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      domain_error(e.what());
    } catch (const DataError& e) {
      data_error(e.what());
    } catch (const NumericalError& e) {
      numerical_error(e.what());
    } catch (const Error& e) {
      base_error(e.what());
    }
  });

  py::class_<SignRegime>(m, "SignRegime")
      .def(py::init(&regime), py::arg("sign_mu"), py::arg("sign_tau"))
      .def_readonly("sign_mu", &SignRegime::sign_mu)
      .def_readonly("sign_tau", &SignRegime::sign_tau)
      .def("product", &SignRegime::product)
      .def("__repr__", [](const SignRegime& r) {
        return "SignRegime(" + std::to_string(r.sign_mu) + ", " + std::to_string(r.sign_tau) +
               ")";
      });

  py::class_<IdentifiedInterval>(m, "IdentifiedInterval")
      .def_readonly("lower", &IdentifiedInterval::lower)
      .def_readonly("upper", &IdentifiedInterval::upper)
      .def_readonly("pi_used", &IdentifiedInterval::pi_used)
      .def_readonly("epsilon_used", &IdentifiedInterval::epsilon_used)
      .def_property_readonly("assumptions",
                             [](const IdentifiedInterval& iv) { return to_string(iv.tag); })
      .def("contains", &IdentifiedInterval::contains)
      .def("width", &IdentifiedInterval::width)
      .def("__repr__", [](const IdentifiedInterval& iv) {
        return "IdentifiedInterval([" + std::to_string(iv.lower) + ", " +
               std::to_string(iv.upper) + "], " + to_string(iv.tag) + ")";
      });

  m.def("std_normal_cdf", &numerics::std_normal_cdf, py::arg("x"));
  m.def("std_normal_quantile", &numerics::std_normal_quantile, py::arg("p"));

  m.def(
      "did_estimand",
      [](const Array& y0, const Array& y1, const IntArray& d, const std::string& g) {
        return did_estimand(make_panel(y0, y1, d, std::nullopt), parse_gtransform(g));
      },
      py::arg("y0"), py::arg("y1"), py::arg("d"), py::arg("g") = "identity");
  m.def(
      "conditional_estimand",
      [](const Array& y0, const Array& y1, const IntArray& d,
         const std::vector<std::string>& strata, const std::string& g) {
        return conditional_estimand(make_panel(y0, y1, d, strata), parse_gtransform(g));
      },
      py::arg("y0"), py::arg("y1"), py::arg("d"), py::arg("strata"), py::arg("g") = "identity");
  m.def("identified_set_benchmark", &identified_set_benchmark, py::arg("m"), py::arg("pi"),
        py::arg("regime"));
  m.def("identified_set_imperfect", &identified_set_imperfect, py::arg("m"), py::arg("pi"),
        py::arg("epsilon"), py::arg("regime"));

  m.def("critical_value_cn", &critical_value_cn, py::arg("delta_hat"), py::arg("sigma"),
        py::arg("n"), py::arg("alpha"));
  m.def("tstar", &tstar, py::arg("alpha"));
  m.def(
      "robust_null_check",
      [](double t, double alpha, const SignRegime& r) {
        return std::string(to_string(robust_null_check(t, alpha, r)));
      },
      py::arg("t_tilde"), py::arg("alpha"), py::arg("regime"));
  m.def(
      "summary_infer",
      [](double m_hat, double se, double pi, const SignRegime& r, double alpha,
         std::optional<double> epsilon, std::size_t n) {
        return as_python(to_json(summary_mode_infer(m_hat, se, n, pi, epsilon, r, alpha)));
      },
      py::arg("m_hat"), py::arg("se"), py::arg("pi"), py::arg("regime"),
      py::arg("alpha") = 0.95, py::arg("epsilon") = py::none(), py::arg("n") = 1);
  m.def(
      "panel_infer",
      [](const Array& y0, const Array& y1, const IntArray& d, double pi, const SignRegime& r,
         double alpha, std::optional<double> epsilon, const std::string& g) {
        return as_python(to_json(
            panel_infer(make_panel(y0, y1, d, std::nullopt), parse_gtransform(g), pi, epsilon,
                        r, alpha)));
      },
      py::arg("y0"), py::arg("y1"), py::arg("d"), py::arg("pi"), py::arg("regime"),
      py::arg("alpha") = 0.95, py::arg("epsilon") = py::none(), py::arg("g") = "identity");
  m.def(
      "sensitivity_sweep",
      [](double m_hat, double se, const std::vector<double>& pis, const SignRegime& r,
         double alpha, std::size_t n) {
        std::vector<SweepPoint> grid;
        for (double p : pis) grid.push_back({p, std::nullopt});
        return as_python(to_json(sensitivity_sweep(m_hat, se, n, grid, r, alpha)));
      },
      py::arg("m_hat"), py::arg("se"), py::arg("pi_grid"), py::arg("regime"),
      py::arg("alpha") = 0.95, py::arg("n") = 1);

  m.def(
      "bounded_outcome_set",
      [](const Array& y0, const Array& y1, const IntArray& d, double a, double b,
         const std::string& g) {
        return bounded_outcome_set(make_panel(y0, y1, d, std::nullopt), parse_gtransform(g),
                                   OutcomeBounds{a, b});
      },
      py::arg("y0"), py::arg("y1"), py::arg("d"), py::arg("a"), py::arg("b"),
      py::arg("g") = "identity");
  m.def(
      "trimming_set",
      [](const Array& y0, const Array& y1, const IntArray& d, double eta, const std::string& g) {
        return trimming_set(make_panel(y0, y1, d, std::nullopt), parse_gtransform(g), eta);
      },
      py::arg("y0"), py::arg("y1"), py::arg("d"), py::arg("eta"), py::arg("g") = "identity");

  m.def(
      "counterfactual_quantile",
      [](double q, const Array& treated_t0, const Array& control_t0, const Array& control_t1) {
        return counterfactual_quantile(q, EmpiricalDistribution(to_vector(treated_t0)),
                                       EmpiricalDistribution(to_vector(control_t0)),
                                       EmpiricalDistribution(to_vector(control_t1)));
      },
      py::arg("q"), py::arg("treated_t0"), py::arg("control_t0"), py::arg("control_t1"));
  m.def(
      "cic_bounds",
      [](const Array& y0, const Array& y1, const IntArray& d, const std::vector<double>& qs,
         double pi, const SignRegime& r) {
        const auto dists = CicDistributions::from_panel(make_panel(y0, y1, d, std::nullopt));
        py::list out;
        for (double q : qs) out.append(as_python(to_json(cic_identified_set(q, pi, r, dists))));
        return out;
      },
      py::arg("y0"), py::arg("y1"), py::arg("d"), py::arg("q"), py::arg("pi"),
      py::arg("regime"));

  py::class_<DgpConfig>(m, "DgpConfig")
      .def(py::init<>())
      .def_readwrite("n", &DgpConfig::n)
      .def_readwrite("mu", &DgpConfig::mu)
      .def_readwrite("tau", &DgpConfig::tau)
      .def_readwrite("tau2", &DgpConfig::tau2)
      .def_readwrite("lambda_", &DgpConfig::lambda)
      .def_readwrite("epsilon", &DgpConfig::epsilon)
      .def_readwrite("p_treat", &DgpConfig::p_treat)
      .def_readwrite("base_control", &DgpConfig::base_control)
      .def_readwrite("base_treated", &DgpConfig::base_treated)
      .def_readwrite("trend", &DgpConfig::trend)
      .def_readwrite("noise_sd", &DgpConfig::noise_sd)
      .def_readwrite("rho", &DgpConfig::rho)
      .def_readwrite("seed", &DgpConfig::seed)
      .def_readwrite("falsification", &DgpConfig::falsification)
      .def("validate", &DgpConfig::validate);

  m.def(
      "generate_two_period", [](const DgpConfig& c) { return simulated(generate_two_period(c)); },
      py::arg("config"));
  m.def(
      "generate_imperfect", [](const DgpConfig& c) { return simulated(generate_imperfect(c)); },
      py::arg("config"));
  m.def(
      "coverage_study",
      [](const std::vector<DgpConfig>& grid, double pi, double alpha, std::size_t reps,
         std::uint64_t seed, unsigned workers) {
        CoverageReport r;
        {
          py::gil_scoped_release release;
          r = coverage_study(grid, pi, alpha, reps, seed, workers);
        }
        return as_python(to_json(r));
      },
      py::arg("grid"), py::arg("pi"), py::arg("alpha") = 0.95, py::arg("reps") = 2000,
      py::arg("seed") = 20240611, py::arg("workers") = 1);
}
