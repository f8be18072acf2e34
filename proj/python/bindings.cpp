#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "popsync/analysis.hpp"
#include "popsync/analyzer.hpp"
#include "popsync/distributions.hpp"
#include "popsync/model.hpp"
#include "popsync/simulator.hpp"
#include "popsync/version.hpp"

namespace py = pybind11;
using namespace popsync;

namespace {

SystemConfig make_system(const RealMatrix& k, const std::vector<PopulationSpec>& populations,
                         std::optional<RealMatrix> alpha, double eta) {
  SystemConfig c;
  c.populations = populations;
  c.coupling.k = k;
  if (alpha) c.coupling.alpha = *alpha;
  c.coupling.eta = eta;
  require_valid(c);
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Critical couplings and onset simulations for interacting oscillator populations.";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<AnalyzerError>(m, "AnalyzerError", PyExc_RuntimeError);

  py::enum_<SamplingMode>(m, "SamplingMode")
      .value("deterministic", SamplingMode::deterministic)
      .value("random", SamplingMode::random);

  py::class_<LorentzianSpec>(m, "Lorentzian")
      .def(py::init([](double omega0, double delta) { return LorentzianSpec{omega0, delta}; }),
           py::arg("omega0"), py::arg("delta"))
      .def_readwrite("omega0", &LorentzianSpec::omega0)
      .def_readwrite("delta", &LorentzianSpec::delta)
      .def("__repr__", [](const LorentzianSpec& d) {
        return "Lorentzian(omega0=" + std::to_string(d.omega0) +
               ", delta=" + std::to_string(d.delta) + ")";
      });

  py::class_<PopulationSpec>(m, "Population")
      .def(py::init([](std::size_t n, double delta, double omega0) {
             return PopulationSpec{n, {omega0, delta}};
           }),
           py::arg("n"), py::arg("delta"), py::arg("omega0"))
      .def_readwrite("n", &PopulationSpec::n)
      .def_readwrite("dist", &PopulationSpec::dist);

  py::class_<SystemConfig>(m, "System")
      .def(py::init(&make_system), py::arg("k"), py::arg("populations"),
           py::arg("alpha") = py::none(), py::arg("eta") = 0.0)
      .def_readwrite("populations", &SystemConfig::populations)
      .def_property(
          "eta", [](const SystemConfig& c) { return c.coupling.eta; },
          [](SystemConfig& c, double eta) { c.coupling.eta = eta; })
      .def_property_readonly("k", [](const SystemConfig& c) { return c.coupling.k; })
      .def_property_readonly("alpha", [](const SystemConfig& c) { return c.coupling.lags(); })
      .def("distributions", &SystemConfig::distributions)
      .def("__len__", &SystemConfig::size);

  py::class_<CriticalSolution>(m, "CriticalSolution")
      .def_readonly("eta_star", &CriticalSolution::eta_star)
      .def_readonly("v_star", &CriticalSolution::v_star)
      .def_readonly("branch_id", &CriticalSolution::branch_id)
      .def("__repr__", [](const CriticalSolution& s) {
        return "CriticalSolution(eta_star=" + std::to_string(s.eta_star) +
               ", v_star=" + std::to_string(s.v_star) + ")";
      });

  py::class_<CriticalSet>(m, "CriticalSet")
      .def_readonly("solutions", &CriticalSet::solutions)
      .def_readonly("relevant_negative", &CriticalSet::relevant_negative)
      .def_readonly("relevant_positive", &CriticalSet::relevant_positive)
      .def_readonly("warnings", &CriticalSet::warnings)
      .def("empty", &CriticalSet::empty)
      .def_property_readonly("eta_star", [](const CriticalSet& s) {
        std::vector<double> out;
        for (const auto& x : s.solutions) out.push_back(x.eta_star);
        return out;
      });

  py::class_<ScanParams>(m, "ScanParams")
      .def(py::init<>())
      .def_static("default_for", [](const std::vector<LorentzianSpec>& d) {
        return ScanParams::default_for(d);
      })
      .def_readwrite("v_min", &ScanParams::v_min)
      .def_readwrite("v_max", &ScanParams::v_max)
      .def_readwrite("n_points", &ScanParams::n_points)
      .def_readwrite("im_tolerance", &ScanParams::im_tolerance)
      .def_readwrite("refine_tolerance", &ScanParams::refine_tolerance);

  py::class_<SimParams>(m, "SimParams")
      .def(py::init<>())
      .def_readwrite("dt", &SimParams::dt)
      .def_readwrite("t_transient", &SimParams::t_transient)
      .def_readwrite("t_average", &SimParams::t_average)
      .def_readwrite("seed", &SimParams::seed)
      .def_readwrite("sampling_mode", &SimParams::sampling_mode);

  py::class_<TrialResult>(m, "TrialResult")
      .def_readonly("r_mean", &TrialResult::r_mean)
      .def_readonly("r_std", &TrialResult::r_std);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("eta", &SweepResult::eta_values)
      .def_readonly("r_mean", &SweepResult::r_mean)
      .def_readonly("r_std", &SweepResult::r_std);

  m.def("identical_critical",
        [](const Eigen::Matrix2d& k, double delta, double omega0) {
          return identical_critical(IdenticalCaseInput::from(k, delta, omega0));
        },
        py::arg("k"), py::arg("delta"), py::arg("omega0"));

  m.def("find_critical_couplings",
        [](const SystemConfig& system, std::optional<ScanParams> scan) {
          const auto d = system.distributions();
          return find_critical_couplings(system.coupling.k, system.coupling.lags(), d,
                                         scan ? *scan : ScanParams::default_for(d));
        },
        py::arg("system"), py::arg("scan") = py::none());

  m.def("analyze",
        [](const SystemConfig& system, std::optional<ScanParams> scan) {
          const auto d = system.distributions();
          return analyze_system(system, scan ? *scan : ScanParams::default_for(d)).critical;
        },
        py::arg("system"), py::arg("scan") = py::none(),
        "Closed form for two identical populations, scan otherwise.");

  m.def("dispersion_roots_at",
        [](const SystemConfig& system, double v) {
          return dispersion_roots_at(system.coupling.unit_coupling(),
                                     system.distributions(), v);
        },
        py::arg("system"), py::arg("v"));

  m.def("evaluate_determinant",
        [](const SystemConfig& system, double eta, double v) {
          return evaluate_determinant(system.coupling.k, system.coupling.lags(),
                                      system.distributions(), eta, v);
        },
        py::arg("system"), py::arg("eta"), py::arg("v"));

  m.def("run_trial",
        [](const SystemConfig& system, const SimParams& params) {
          py::gil_scoped_release release;
          return run_trial(system, params);
        },
        py::arg("system"), py::arg("params") = SimParams{});

  m.def("sweep_eta",
        [](const SystemConfig& system, const std::vector<double>& eta, const SimParams& params,
           unsigned threads) {
          py::gil_scoped_release release;
          return sweep_eta(system, eta, params, threads);
        },
        py::arg("system"), py::arg("eta"), py::arg("params") = SimParams{},
        py::arg("threads") = 0);

  m.def("detect_onset",
        [](const SweepResult& sweep, std::size_t population, double c, double margin,
           std::size_t sustain) {
          return detect_onset(sweep, population, OnsetOptions{c, margin, sustain});
        },
        py::arg("sweep"), py::arg("population"), py::arg("c") = 2.0, py::arg("margin") = 0.05,
        py::arg("sustain") = 2);

  m.def("sample_frequencies",
        [](const LorentzianSpec& d, std::size_t n, SamplingMode mode, std::uint64_t seed) {
          return sample_frequencies(d, n, mode, seed);
        },
        py::arg("dist"), py::arg("n"), py::arg("mode") = SamplingMode::deterministic,
        py::arg("seed") = 1);

  m.def("lorentzian_pdf", &lorentzian_pdf, py::arg("dist"), py::arg("omega"));
  m.def("lorentzian_quantile", &lorentzian_quantile, py::arg("dist"), py::arg("p"));
}
