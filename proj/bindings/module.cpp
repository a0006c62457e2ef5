#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "taxisim/diagnostics.hpp"
#include "taxisim/errors.hpp"
#include "taxisim/experiments.hpp"
#include "taxisim/fields.hpp"
#include "taxisim/geometry.hpp"
#include "taxisim/linsolve.hpp"
#include "taxisim/operators.hpp"
#include "taxisim/stepper.hpp"

namespace py = pybind11;
using namespace taxisim;

PYBIND11_MODULE(_taxisim, m) {
    m.doc() = "Finite-volume simulator for chemotaxis systems with consumed signals";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);
    py::register_exception<SolveFailure>(m, "SolveFailure", PyExc_RuntimeError);

    py::enum_<DomainKind>(m, "DomainKind")
        .value("box", DomainKind::Box)
        .value("disk", DomainKind::Disk)
        .value("ball", DomainKind::Ball);

    py::class_<DomainSpec>(m, "DomainSpec")
        .def(py::init<>())
        .def_readwrite("kind", &DomainSpec::kind)
        .def_readwrite("dim", &DomainSpec::dim)
        .def_readwrite("lo", &DomainSpec::lo)
        .def_readwrite("hi", &DomainSpec::hi)
        .def_readwrite("center", &DomainSpec::center)
        .def_readwrite("radius", &DomainSpec::radius)
        .def_static("box2d", &DomainSpec::box2d)
        .def_static("box3d", &DomainSpec::box3d)
        .def_static("disk", &DomainSpec::disk)
        .def_static("ball", &DomainSpec::ball);

    py::class_<Grid>(m, "Grid")
        .def_readonly("dim", &Grid::dim)
        .def_readonly("cells", &Grid::cells)
        .def_readonly("spacing", &Grid::spacing)
        .def_readonly("cell_volume", &Grid::cell_volume)
        .def_property_readonly("num_active", &Grid::num_active)
        .def_property_readonly("num_faces", &Grid::num_faces)
        .def("cell_center", &Grid::cell_center);

    m.def("build_grid", &build_grid, py::arg("spec"), py::arg("cells_per_axis"));
    m.def("active_volume", &active_volume);

    py::class_<ScalarField>(m, "ScalarField")
        .def(py::init<int, double>(), py::arg("n"), py::arg("fill") = 0.0)
        .def_readwrite("values", &ScalarField::values)
        .def("__len__", &ScalarField::size)
        .def("__getitem__", [](const ScalarField& f, int i) {
            if (i < 0 || i >= f.size()) throw py::index_error();
            return f[i];
        })
        .def("__setitem__", [](ScalarField& f, int i, double v) {
            if (i < 0 || i >= f.size()) throw py::index_error();
            f[i] = v;
        });

    py::class_<InitialData>(m, "InitialData")
        .def_static("constant", &InitialData::constant)
        .def_static("gaussian", &InitialData::gaussian, py::arg("amplitude"),
                    py::arg("sharpness"), py::arg("center") = std::array<double, 3>{0, 0, 0})
        .def_static("table_of", &InitialData::table_of);

    m.def("init_field", &init_field);
    m.def("field_extrema", &field_extrema);
    m.def(
        "make_state",
        [](const Grid& g, const InitialData& u0, const InitialData& v0,
           const std::optional<InitialData>& w0) {
            return make_state(g, u0, v0, w0 ? &*w0 : nullptr);
        },
        py::arg("grid"), py::arg("u0"), py::arg("v0"), py::arg("w0") = std::nullopt);

    py::class_<SimState>(m, "SimState")
        .def_readwrite("u", &SimState::u)
        .def_readwrite("v", &SimState::v)
        .def_readwrite("w", &SimState::w)
        .def_readonly("has_w", &SimState::has_w)
        .def_readonly("t", &SimState::t)
        .def_readonly("step", &SimState::step)
        .def_readonly("v_sup0", &SimState::v_sup0)
        .def_readonly("w_sup0", &SimState::w_sup0);

    m.def(
        "laplacian_apply", [](const Grid& g, const ScalarField& f) { return laplacian_apply(g, f); });
    m.def("grad_on_faces", [](const Grid& g, const ScalarField& f) { return grad_on_faces(g, f); });
    m.def(
        "taxis_divergence",
        [](const Grid& g, const ScalarField& u, const ScalarField& v,
           const std::optional<ScalarField>& w, double chi, double xi) {
            return taxis_divergence(g, u, v, w ? &*w : nullptr, chi, xi);
        },
        py::arg("grid"), py::arg("u"), py::arg("v"), py::arg("w") = std::nullopt,
        py::arg("chi") = 0.0, py::arg("xi") = 0.0);
    m.def(
        "cfl_max_dt",
        [](const Grid& g, const ScalarField& v, const std::optional<ScalarField>& w, double chi,
           double xi) { return cfl_max_dt(g, v, w ? &*w : nullptr, chi, xi); },
        py::arg("grid"), py::arg("v"), py::arg("w") = std::nullopt, py::arg("chi") = 0.0,
        py::arg("xi") = 0.0);

    py::enum_<ModelVariant>(m, "ModelVariant")
        .value("attraction_only", ModelVariant::AttractionOnly)
        .value("attraction_repulsion", ModelVariant::AttractionRepulsion);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("variant", &ModelParams::variant)
        .def_readwrite("chi", &ModelParams::chi)
        .def_readwrite("xi", &ModelParams::xi)
        .def_readwrite("dt", &ModelParams::dt)
        .def_readwrite("t_end", &ModelParams::t_end)
        .def_readwrite("cfl_safety", &ModelParams::cfl_safety);

    py::class_<SolveReport>(m, "SolveReport")
        .def_readonly("iterations", &SolveReport::iterations)
        .def_readonly("final_rel_residual", &SolveReport::final_rel_residual)
        .def_readonly("converged", &SolveReport::converged);

    py::class_<StepOutcome>(m, "StepOutcome")
        .def_readonly("state", &StepOutcome::state)
        .def_readonly("dt_used", &StepOutcome::dt_used)
        .def_readonly("cfl_clamped", &StepOutcome::cfl_clamped)
        .def_readonly("bound_violation", &StepOutcome::bound_violation)
        .def_readonly("violations", &StepOutcome::violations);

    m.def("step", &step, py::arg("state"), py::arg("params"), py::arg("grid"));

    py::class_<DiagnosticsRecord>(m, "DiagnosticsRecord")
        .def_readonly("t", &DiagnosticsRecord::t)
        .def_readonly("mass_u", &DiagnosticsRecord::mass_u)
        .def_readonly("min_u", &DiagnosticsRecord::min_u)
        .def_readonly("max_u", &DiagnosticsRecord::max_u)
        .def_readonly("min_v", &DiagnosticsRecord::min_v)
        .def_readonly("max_v", &DiagnosticsRecord::max_v)
        .def_readonly("min_w", &DiagnosticsRecord::min_w)
        .def_readonly("max_w", &DiagnosticsRecord::max_w)
        .def_readonly("lk_u", &DiagnosticsRecord::lk_u)
        .def_readonly("lyapunov", &DiagnosticsRecord::lyapunov)
        .def_readonly("flags", &DiagnosticsRecord::flags);

    m.def("mass", &mass);
    m.def("lk_norm", &lk_norm);
    m.def("default_k", &default_k);

    py::class_<LyapunovConfig>(m, "LyapunovConfig")
        .def_readonly("k", &LyapunovConfig::k)
        .def_readonly("eps1_sq", &LyapunovConfig::eps1_sq)
        .def_readonly("eps2_sq", &LyapunovConfig::eps2_sq)
        .def_readonly("eps3_sq", &LyapunovConfig::eps3_sq)
        .def_readonly("eps4_sq", &LyapunovConfig::eps4_sq)
        .def_readonly("beta_sq", &LyapunovConfig::beta_sq)
        .def_readonly("gamma_sq", &LyapunovConfig::gamma_sq)
        .def("phi_upper_bound", &LyapunovConfig::phi_upper_bound);

    m.def("default_lyapunov_config", &default_lyapunov_config, py::arg("params"), py::arg("dim"),
          py::arg("v_sup0"), py::arg("w_sup0"), py::arg("k"));
    m.def("lyapunov", &lyapunov);

    py::class_<ThresholdReport>(m, "ThresholdReport")
        .def_readonly("n", &ThresholdReport::n)
        .def_readonly("k", &ThresholdReport::k)
        .def_readonly("chi_max_theorem", &ThresholdReport::chi_max_theorem)
        .def_readonly("xi_max_theorem", &ThresholdReport::xi_max_theorem)
        .def_readonly("chi_max_lemma_k", &ThresholdReport::chi_max_lemma_k)
        .def_readonly("xi_max_lemma_k", &ThresholdReport::xi_max_lemma_k)
        .def_readonly("chi_interval_attraction_only",
                      &ThresholdReport::chi_interval_attraction_only)
        .def_readonly("chi_sup_limit_attr_rep", &ThresholdReport::chi_sup_limit_attr_rep)
        .def_readonly("reference_taoboun", &ThresholdReport::reference_taoboun)
        .def_readonly("reference_baghaei", &ThresholdReport::reference_baghaei);

    m.def("thresholds", &thresholds, py::arg("n"), py::arg("v_sup0"), py::arg("w_sup0") = 0.0,
          py::arg("k") = std::nullopt);

    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("cells_per_axis", &Scenario::cells_per_axis)
        .def_readwrite("model", &Scenario::model)
        .def_property(
            "output_directory", [](const Scenario& s) { return s.output.directory; },
            [](Scenario& s, const std::string& d) { s.output.directory = d; })
        .def_property(
            "record_every", [](const Scenario& s) { return s.output.every; },
            [](Scenario& s, int n) { s.output.every = n; });

    py::class_<ScenarioSummary>(m, "ScenarioSummary")
        .def_readonly("name", &ScenarioSummary::name)
        .def_readonly("dim", &ScenarioSummary::dim)
        .def_readonly("chi", &ScenarioSummary::chi)
        .def_readonly("xi", &ScenarioSummary::xi)
        .def_readonly("peak_max_u", &ScenarioSummary::peak_max_u)
        .def_readonly("peak_time", &ScenarioSummary::peak_time)
        .def_readonly("steps", &ScenarioSummary::steps)
        .def_readonly("halted", &ScenarioSummary::halted)
        .def_readonly("series", &ScenarioSummary::series)
        .def_readonly("outputs", &ScenarioSummary::outputs);

    py::class_<SweepMemberResult>(m, "SweepMemberResult")
        .def_readonly("value", &SweepMemberResult::value)
        .def_readonly("failed", &SweepMemberResult::failed)
        .def_readonly("error", &SweepMemberResult::error)
        .def_readonly("summary", &SweepMemberResult::summary);

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("members", &SweepResult::members)
        .def_readonly("outputs", &SweepResult::outputs);

    py::class_<Comparison2d3d>(m, "Comparison2d3d")
        .def_readonly("peak_time_2d", &Comparison2d3d::peak_time_2d)
        .def_readonly("peak_time_3d", &Comparison2d3d::peak_time_3d)
        .def_readonly("peak_value_2d", &Comparison2d3d::peak_value_2d)
        .def_readonly("peak_value_3d", &Comparison2d3d::peak_value_3d)
        .def_readonly("peak_earlier_in_2d", &Comparison2d3d::peak_earlier_in_2d)
        .def_readonly("peak_larger_in_3d", &Comparison2d3d::peak_larger_in_3d)
        .def_readonly("conclusive", &Comparison2d3d::conclusive)
        .def("table", &Comparison2d3d::table);

    m.def("load_scenario", &load_scenario);
    m.def("scenario_from_json_text", &scenario_from_json_text, py::arg("text"),
          py::arg("origin") = std::string("<string>"));
    m.def("scenario_to_json_text", &scenario_to_json_text);
    m.def("preset_names", &preset_names);
    m.def("preset_scenario", &preset_scenario);
    m.def("preset_sweep", &preset_sweep);
    m.def("load_sweep", &load_sweep);
    m.def("run_scenario", &run_scenario, py::call_guard<py::gil_scoped_release>());
    m.def("run_sweep", &run_sweep, py::call_guard<py::gil_scoped_release>());
    m.def("compare_2d_3d", &compare_2d_3d);
    m.def("check_series_file", &check_series_file);
}
