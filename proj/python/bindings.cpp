#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cep/core/validate.hpp"
#include "cep/model/formulation.hpp"
#include "cep/runner/case_io.hpp"
#include "cep/runner/report.hpp"
#include "cep/runner/synthetic.hpp"

namespace py = pybind11;
using namespace cep;

namespace {

std::string run_case(const SystemCase& c, const std::string& method, const std::string& scenario, bool relax,
                     double rel_tol, int k_max, double mip_gap, int workers) {
  RunOptions o;
  o.relax = relax;
  o.rel_tol = rel_tol;
  o.k_max = k_max;
  o.mip_gap = mip_gap;
  o.workers = workers;
  const Scenario sc = scenario.empty() ? c.policy.scenario : parse_scenario(scenario);
  SolveReport report;
  {
    py::gil_scoped_release release;
    report = run(parse_method(method), c, sc, o);
  }
  return report_to_json(report).dump();
}

double mse_total(const std::string& report, const std::string& reference) {
  using json = nlohmann::ordered_json;
  return compute_capacity_mse(report_from_json(json::parse(report)), report_from_json(json::parse(reference))).total;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Capacity expansion planning with Benders decomposition";

  py::register_exception<CaseFormatError>(m, "CaseFormatError", PyExc_ValueError);

  py::class_<SystemCase>(m, "Case")
      .def_readonly("name", &SystemCase::name)
      .def_readonly("zones", &SystemCase::zones)
      .def_readonly("year_hours", &SystemCase::year_hours)
      .def_readonly("metadata", &SystemCase::metadata)
      .def_property_readonly("num_clusters", [](const SystemCase& c) { return c.clusters.size(); })
      .def_property_readonly("num_uc_clusters", &SystemCase::num_uc_clusters)
      .def_property_readonly("num_subperiods", [](const SystemCase& c) { return c.time.num_subperiods(); })
      .def_property_readonly("hours_per_subperiod", [](const SystemCase& c) { return c.time.hours_per_subperiod(); })
      .def_property_readonly("week_ids", [](const SystemCase& c) { return c.time.week_ids(); })
      .def_property_readonly("weights", [](const SystemCase& c) { return c.time.weights(); })
      .def_property_readonly("scenario", [](const SystemCase& c) { return std::string(to_string(c.policy.scenario)); })
      .def("validate", [](const SystemCase& c) {
        std::vector<std::string> out;
        for (const auto& v : validate_case(c).violations) out.push_back(v.code + ": " + v.message);
        return out;
      })
      .def(py::self == py::self)
      .def("__repr__", [](const SystemCase& c) {
        return "<Case '" + c.name + "' zones=" + std::to_string(c.zones.size()) +
               " clusters=" + std::to_string(c.clusters.size()) +
               " subperiods=" + std::to_string(c.time.num_subperiods()) + ">";
      });

  m.def("load_case", &load_case, py::arg("path"));
  m.def("write_case", &write_case, py::arg("case"), py::arg("path"));
  m.def("select_weeks", &select_weeks, py::arg("case"), py::arg("week_ids"), py::arg("weights"));
  m.def("select_even_weeks", &select_even_weeks, py::arg("case"), py::arg("count"));
  m.def(
      "synthetic_case",
      [](int zones, int subperiods, int hours, std::uint64_t seed, const std::string& scenario, bool uc,
         bool storage, bool hydro) {
        SyntheticOptions o;
        o.zones = zones;
        o.subperiods = subperiods;
        o.hours = hours;
        o.seed = seed;
        o.scenario = parse_scenario(scenario);
        o.unit_commitment = uc;
        o.storage = storage;
        o.hydro = hydro;
        return make_synthetic_case(o);
      },
      py::arg("zones") = 1, py::arg("subperiods") = 2, py::arg("hours") = 4, py::arg("seed") = 1,
      py::arg("scenario") = "ref", py::arg("unit_commitment") = true, py::arg("storage") = true,
      py::arg("hydro") = false);
  m.def("model_size", [](const SystemCase& c, const std::string& scenario) {
    const auto p = assemble_monolithic(c, parse_scenario(scenario), false);
    return std::make_pair(p.lp.num_cols(), p.lp.num_rows());
  }, py::arg("case"), py::arg("scenario") = "ref");
  m.def("_run", &run_case, py::arg("case"), py::arg("method"), py::arg("scenario"), py::arg("relax"),
        py::arg("rel_tol"), py::arg("k_max"), py::arg("mip_gap"), py::arg("workers"));
  m.def("_capacity_mse", &mse_total);
}
