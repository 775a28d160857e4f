#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "aclab/ansatz.hpp"
#include "aclab/errors.hpp"
#include "aclab/eta.hpp"
#include "aclab/experiment.hpp"
#include "aclab/pde.hpp"
#include "aclab/profile.hpp"
#include "aclab/toda.hpp"

namespace py = pybind11;
using namespace aclab;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Numerical core: profile constants, eta, Toda layers, radial PDE, experiment runner";

    auto base = py::register_exception<Error>(m, "AclabError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<CollisionError>(m, "CollisionError", base.ptr());
    py::register_exception<OrderingViolation>(m, "OrderingViolation", base.ptr());
    py::register_exception<SchemaMismatch>(m, "SchemaMismatch", base.ptr());

    m.attr("SQRT2") = kSqrt2;
    m.def("heteroclinic", &heteroclinic, py::arg("s"));
    m.def("profile_derivative", &profile_derivative, py::arg("s"));
    m.def("shrinking_sphere", &shrinking_sphere, py::arg("n"), py::arg("t"));

    py::class_<InteractionConstants>(m, "InteractionConstants")
        .def_readonly("beta", &InteractionConstants::beta)
        .def_readonly("i_kinetic", &InteractionConstants::i_kinetic)
        .def_readonly("i_tail", &InteractionConstants::i_tail)
        .def_readonly("truncation", &InteractionConstants::truncation);
    m.def("compute_beta", &compute_beta, py::arg("tol") = 1e-12);

    py::class_<TodaConstants>(m, "TodaConstants")
        .def_readonly("k", &TodaConstants::k)
        .def_readonly("beta", &TodaConstants::beta)
        .def_readonly("b", &TodaConstants::b)
        .def_readonly("gamma", &TodaConstants::gamma);
    m.def("toda_constants", &toda_constants, py::arg("k"), py::arg("beta"));
    m.def("reduction_eigenvalues", [](int k) {
        const auto r = reduction_matrices(k);
        return py::make_tuple(r.C_eigs, r.A_eigs);
    }, py::arg("k"), "Eigenvalues of C and A for k >= 2.");

    py::class_<EtaSolution>(m, "EtaSolution")
        .def("value", &EtaSolution::value, py::arg("t"))
        .def("derivative", &EtaSolution::derivative, py::arg("t"))
        .def("relative_residual", &EtaSolution::relative_residual, py::arg("t"))
        .def("max_midpoint_residual", &EtaSolution::max_midpoint_residual)
        .def_static("asymptote", &EtaSolution::asymptote, py::arg("t"))
        .def_property_readonly("t_end", &EtaSolution::t_end);
    m.def("solve_eta", [](double t_end, double rel_tol) { return solve_eta(t_end, rel_tol); },
          py::arg("t_end"), py::arg("rel_tol") = 1e-10);

    py::class_<LayerState>(m, "LayerState")
        .def(py::init<>())
        .def(py::init([](double t, std::vector<double> rho) { return LayerState{t, std::move(rho)}; }),
             py::arg("t"), py::arg("rho"))
        .def_readwrite("t", &LayerState::t)
        .def_readwrite("rho", &LayerState::rho);
    m.def("first_approximation", &first_approximation, py::arg("n"), py::arg("constants"), py::arg("eta"),
          py::arg("t"));
    m.def("integrate_toda",
          [](int n, double beta, const LayerState& init, double t_final, std::vector<double> samples,
             double rel_tol) {
              TodaOptions opt;
              opt.rel_tol = opt.abs_tol = rel_tol;
              opt.sample_times = std::move(samples);
              return integrate_toda(n, beta, init, t_final, opt);
          },
          py::arg("n"), py::arg("beta"), py::arg("initial"), py::arg("t_final"),
          py::arg("sample_times") = std::vector<double>{}, py::arg("rel_tol") = 1e-10);

    m.def("evaluate_z", [](std::vector<double> rho, double r) { return evaluate_z(MultiLayerAnsatz(rho), r); },
          py::arg("rho"), py::arg("r"));
    m.def("far_field_value", &far_field_value, py::arg("k"));

    m.def("default_config_text", &default_config_text);
    m.def("validate_config", [](const std::string& ini) { parse_config(ini).validate(); }, py::arg("ini_text"),
          "Parses and validates INI text; raises ConfigError naming the field.");
    m.def("run_experiment",
          [](const std::string& ini, const std::string& output_dir) {
              ExperimentConfig cfg = parse_config(ini);
              if (!output_dir.empty()) cfg.output_dir = output_dir;
              RunOutcome out;
              {
                  py::gil_scoped_release release;
                  out = run_experiment(cfg);
              }
              return py::make_tuple(out.exit_code, out.message, out.report.dump());
          },
          py::arg("ini_text"), py::arg("output_dir") = std::string(),
          "Runs a scenario; returns (exit_code, message, report_json_text).");
    m.def("compare_reports",
          [](const std::filesystem::path& a, const std::filesystem::path& b, double tol) {
              CompareOptions opt;
              opt.tol = tol;
              std::vector<std::string> paths;
              for (const auto& d : compare_reports(a, b, opt).diffs) paths.push_back(d.path);
              return paths;
          },
          py::arg("a"), py::arg("b"), py::arg("tol") = 1e-8, "Paths of fields that differ beyond tol.");
    m.def("code_version", &code_version);
}
