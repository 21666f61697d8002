#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bqs/errors.hpp"
#include "bqs/estimates.hpp"
#include "bqs/manufactured.hpp"
#include "bqs/nonlinear_solver.hpp"
#include "bqs/problem_io.hpp"

namespace py = pybind11;
using namespace bqs;

namespace {

py::array_t<Complex> field_to_array(const SpectralField& f) {
    std::vector<py::ssize_t> shape;
    for (int d = 0; d < f.grid().dim(); ++d) shape.push_back(f.grid().points()[d]);
    py::array_t<Complex> out(shape);
    std::copy(f.values().begin(), f.values().end(), out.mutable_data());
    return out;
}

SpectralField field_from_array(const SpectralGrid& grid, py::array_t<Complex> values,
                               Domain domain) {
    auto buf = values.request();
    std::size_t total = 1;
    for (auto d : buf.shape) total *= static_cast<std::size_t>(d);
    if (total != grid.size()) throw std::invalid_argument("array size does not match the grid");
    auto contiguous = py::array_t<Complex, py::array::c_style | py::array::forcecast>(values);
    std::vector<Complex> data(contiguous.data(), contiguous.data() + total);
    return SpectralField(grid, domain, std::move(data));
}

std::vector<py::array_t<Complex>> fields_to_arrays(const std::vector<SpectralField>& fields) {
    std::vector<py::array_t<Complex>> out;
    out.reserve(fields.size());
    for (const auto& f : fields) out.push_back(field_to_array(f));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Pseudo-spectral solver for generalized Boussinesq equations with integral "
              "initial conditions";

    py::register_exception<SolverError>(m, "SolverError");

    py::enum_<Domain>(m, "Domain")
        .value("physical", Domain::physical)
        .value("frequency", Domain::frequency);

    py::class_<SpectralGrid>(m, "SpectralGrid")
        .def_static("make",
                    py::overload_cast<int, std::vector<int>, double>(&SpectralGrid::make),
                    py::arg("n"), py::arg("points"), py::arg("half_width"))
        .def_property_readonly("dim", &SpectralGrid::dim)
        .def_property_readonly("points", &SpectralGrid::points)
        .def_property_readonly("half_widths", &SpectralGrid::half_widths)
        .def_property_readonly("size", &SpectralGrid::size)
        .def("wavenumbers", &SpectralGrid::wavenumbers, py::arg("axis"))
        .def("xi", &SpectralGrid::xi, py::arg("mode"))
        .def("coordinate", &SpectralGrid::coordinate, py::arg("site"))
        .def("cell_volume", &SpectralGrid::cell_volume);

    py::class_<SpectralField>(m, "SpectralField")
        .def(py::init([](const SpectralGrid& g, Domain d) { return SpectralField(g, d); }),
             py::arg("grid"), py::arg("domain") = Domain::physical)
        .def_static("from_array", &field_from_array, py::arg("grid"), py::arg("values"),
                    py::arg("domain") = Domain::physical)
        .def_property_readonly("domain", &SpectralField::domain)
        .def_property_readonly("grid", &SpectralField::grid)
        .def("to_array", &field_to_array)
        .def("all_finite", &SpectralField::all_finite);

    m.def("to_frequency", &to_frequency);
    m.def("to_physical", &to_physical);

    py::enum_<SymbolConvention>(m, "SymbolConvention")
        .value("plain", SymbolConvention::plain)
        .value("fourier", SymbolConvention::fourier);

    py::class_<OperatorSymbol>(m, "OperatorSymbol")
        .def(py::init<int, SymbolConvention>(), py::arg("n"),
             py::arg("convention") = SymbolConvention::fourier)
        .def("add_term", &OperatorSymbol::add_term, py::arg("alpha"), py::arg("coeff"))
        .def_property_readonly("order", &OperatorSymbol::order)
        .def_property_readonly("dim", &OperatorSymbol::dim)
        .def_static("zero", &OperatorSymbol::zero)
        .def_static("constant", &OperatorSymbol::constant)
        .def_static("neg_laplacian", &OperatorSymbol::neg_laplacian);

    m.def("eval_symbol", [](const OperatorSymbol& s, std::vector<double> xi) {
        return eval_symbol(s, xi);
    });

    py::class_<QLValue>(m, "QLValue")
        .def_readonly("Q", &QLValue::Q)
        .def_readonly("L", &QLValue::L);
    m.def("compute_QL",
          [](const OperatorSymbol& l0, const OperatorSymbol& l1, const OperatorSymbol& l2,
             std::vector<double> xi, double eps) { return compute_QL(l0, l1, l2, xi, eps); },
          py::arg("L0"), py::arg("L1"), py::arg("L2"), py::arg("xi"), py::arg("eps_den") = 1e-12);

    py::class_<SymbolReport>(m, "SymbolReport")
        .def_readonly("admissible", &SymbolReport::admissible)
        .def_readonly("worst_xi", &SymbolReport::worst_xi)
        .def_readonly("M1_est", &SymbolReport::M1_est)
        .def_readonly("M2_est", &SymbolReport::M2_est)
        .def_readonly("M1_inv_est", &SymbolReport::M1_inv_est)
        .def_readonly("zero_hits", &SymbolReport::zero_hits);
    m.def("check_condition21", &check_condition21, py::arg("L0"), py::arg("L1"), py::arg("L2"),
          py::arg("s"), py::arg("p"), py::arg("grid"));
    m.def("degree_heuristic", &degree_heuristic, py::arg("m0"), py::arg("m1"), py::arg("m2"),
          py::arg("s"), py::arg("p"), py::arg("n"));

    py::class_<SymbolTriple>(m, "SymbolTriple")
        .def_readonly("L0", &SymbolTriple::L0)
        .def_readonly("L1", &SymbolTriple::L1)
        .def_readonly("L2", &SymbolTriple::L2);
    m.def("preset_symbol",
          [](const std::string& name) { return preset_symbol(name); }, py::arg("name"));

    py::class_<NonlocalKernel>(m, "NonlocalKernel")
        .def_static("zero", &NonlocalKernel::zero)
        .def_static("density", &NonlocalKernel::density)
        .def_static("atoms",
                    [](double horizon, std::vector<std::pair<double, double>> atoms) {
                        std::vector<NonlocalKernel::Atom> list;
                        for (auto [l, w] : atoms) list.push_back({l, w});
                        return NonlocalKernel::atoms(horizon, list);
                    })
        .def_static("constant", &NonlocalKernel::constant, py::arg("horizon"), py::arg("value"),
                    py::arg("nodes") = 129)
        .def_static("gaussian_bump", &NonlocalKernel::gaussian_bump, py::arg("horizon"),
                    py::arg("amplitude"), py::arg("center"), py::arg("width"),
                    py::arg("nodes") = 129)
        .def_property_readonly("horizon", &NonlocalKernel::horizon)
        .def("total_variation", &NonlocalKernel::total_variation)
        .def("integrate", [](const NonlocalKernel& k, std::function<Complex(double)> g) {
            return k.integrate(g);
        });

    py::class_<Admissibility>(m, "Admissibility")
        .def_readonly("admissible", &Admissibility::admissible)
        .def_readonly("margin", &Admissibility::margin);
    m.def("check_admissibility", &check_admissibility, py::arg("alpha"), py::arg("beta"));

    py::class_<PropagatorTable>(m, "PropagatorTable")
        .def(py::init<const SpectralGrid&, const OperatorSymbol&, const OperatorSymbol&,
                      const OperatorSymbol&>())
        .def_property_readonly("size", &PropagatorTable::size)
        .def("Q", &PropagatorTable::Q)
        .def("L", &PropagatorTable::L)
        .def("sqrtQ", &PropagatorTable::sqrtQ);
    m.def("cos_prop", &cos_prop);
    m.def("sin_prop", &sin_prop);
    m.def("phi_kernel", &phi_kernel);
    m.def("ut_prop", &ut_prop);

    py::class_<DeterminantTable>(m, "DeterminantTable")
        .def_property_readonly("size", &DeterminantTable::size)
        .def("det", &DeterminantTable::det)
        .def_property_readonly("min_abs_det", &DeterminantTable::min_abs_det);
    m.def("build_determinant", &build_determinant, py::arg("alpha"), py::arg("beta"),
          py::arg("prop"), py::arg("det_floor") = 1e-10);
    m.def("solve_initial_pair", &solve_initial_pair);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("s", &SolverConfig::s)
        .def_readwrite("p", &SolverConfig::p)
        .def_readwrite("kernel_nodes", &SolverConfig::kernel_nodes)
        .def_readwrite("duhamel_nodes", &SolverConfig::duhamel_nodes)
        .def_readwrite("duhamel_adaptive", &SolverConfig::duhamel_adaptive)
        .def_readwrite("duhamel_max_nodes", &SolverConfig::duhamel_max_nodes)
        .def_readwrite("duhamel_rel_tol", &SolverConfig::duhamel_rel_tol)
        .def_readwrite("det_floor", &SolverConfig::det_floor)
        .def_readwrite("force", &SolverConfig::force);

    py::class_<SourceTerm>(m, "SourceTerm")
        .def_static("zero", &SourceTerm::zero)
        .def_static("separable", &SourceTerm::separable, py::arg("spatial"),
                    py::arg("time_profile"));

    py::class_<LinearProblem>(m, "LinearProblem")
        .def(py::init<SpectralGrid, SymbolTriple, NonlocalKernel, NonlocalKernel, SpectralField,
                      SpectralField, SourceTerm, double, std::vector<double>, SolverConfig>(),
             py::arg("grid"), py::arg("symbols"), py::arg("alpha"), py::arg("beta"),
             py::arg("phi"), py::arg("psi"), py::arg("source"), py::arg("horizon"),
             py::arg("output_times"), py::arg("config") = SolverConfig{});

    py::class_<LinearSolution>(m, "LinearSolution")
        .def_readonly("times", &LinearSolution::times)
        .def_property_readonly("u",
                               [](const LinearSolution& s) { return fields_to_arrays(s.u); })
        .def_property_readonly("ut",
                               [](const LinearSolution& s) { return fields_to_arrays(s.ut); })
        .def_readonly("residual_u", &LinearSolution::residual_u)
        .def_readonly("residual_ut", &LinearSolution::residual_ut)
        .def_readonly("min_abs_det", &LinearSolution::min_abs_det);
    // No GIL release here: separable sources may carry Python time profiles.
    m.def("solve_linear", &solve_linear);
    m.def("apply_S1", &apply_S1);
    m.def("apply_S2", &apply_S2);

    py::class_<Nonlinearity>(m, "Nonlinearity")
        .def_readonly("name", &Nonlinearity::name)
        .def("majorant", [](const Nonlinearity& f, double r) { return f.majorant(r); });
    m.def("register_nonlinearity", &register_nonlinearity, py::arg("name"),
          py::arg("param") = 1.0);
    m.def("max_window", &max_window, py::arg("M"), py::arg("c0"), py::arg("c1"), py::arg("fbar"));
    m.def("blowup_monitor", &blowup_monitor, py::arg("u"), py::arg("ut"), py::arg("p") = 2.0);

    py::class_<NonlinearControls>(m, "NonlinearControls")
        .def(py::init<>())
        .def_readwrite("tol_fp", &NonlinearControls::tol_fp)
        .def_readwrite("max_iterations", &NonlinearControls::max_iterations)
        .def_readwrite("time_nodes", &NonlinearControls::time_nodes)
        .def_readwrite("c0", &NonlinearControls::c0)
        .def_readwrite("c1", &NonlinearControls::c1)
        .def_readwrite("blowup_ceiling", &NonlinearControls::blowup_ceiling)
        .def_readwrite("max_windows", &NonlinearControls::max_windows)
        .def_readwrite("window_cap", &NonlinearControls::window_cap)
        .def_readwrite("zero_initial_iterate", &NonlinearControls::zero_initial_iterate);

    py::enum_<Termination>(m, "Termination")
        .value("horizon_reached", Termination::horizon_reached)
        .value("blow_up_detected", Termination::blow_up_detected)
        .value("max_windows", Termination::max_windows);

    py::class_<WindowRecord>(m, "WindowRecord")
        .def_readonly("index", &WindowRecord::index)
        .def_readonly("t_start", &WindowRecord::t_start)
        .def_readonly("length", &WindowRecord::length)
        .def_readonly("iterations", &WindowRecord::iterations)
        .def_readonly("ratios", &WindowRecord::ratios)
        .def_readonly("final_ratio", &WindowRecord::final_ratio)
        .def_readonly("monitor_end", &WindowRecord::monitor_end)
        .def_readonly("certified", &WindowRecord::certified);

    py::class_<NonlinearRun>(m, "NonlinearRun")
        .def_readonly("reason", &NonlinearRun::reason)
        .def_readonly("windows", &NonlinearRun::windows)
        .def_readonly("reached_time", &NonlinearRun::reached_time)
        .def_readonly("monitor_max", &NonlinearRun::monitor_max)
        .def_readonly("blowup_time", &NonlinearRun::blowup_time);

    py::class_<NonlinearProblem>(m, "NonlinearProblem")
        .def(py::init<SpectralGrid, SymbolTriple, NonlocalKernel, NonlocalKernel, SpectralField,
                      SpectralField, Nonlinearity, SolverConfig, NonlinearControls>(),
             py::arg("grid"), py::arg("symbols"), py::arg("alpha"), py::arg("beta"),
             py::arg("phi"), py::arg("psi"), py::arg("f"),
             py::arg("config") = SolverConfig{}, py::arg("controls") = NonlinearControls{});

    py::class_<NonlinearResult>(m, "NonlinearResult")
        .def_readonly("run", &NonlinearResult::run)
        .def_readonly("node_times", &NonlinearResult::node_times)
        .def_property_readonly("u",
                               [](const NonlinearResult& r) { return fields_to_arrays(r.u); })
        .def_property_readonly("ut",
                               [](const NonlinearResult& r) { return fields_to_arrays(r.ut); })
        .def_readonly("output_times", &NonlinearResult::output_times)
        .def_property_readonly(
            "u_out", [](const NonlinearResult& r) { return fields_to_arrays(r.u_out); })
        .def_property_readonly(
            "ut_out", [](const NonlinearResult& r) { return fields_to_arrays(r.ut_out); });
    m.def("solve_nonlinear", &solve_nonlinear, py::arg("problem"), py::arg("t_goal"),
          py::arg("output_times") = std::vector<double>{},
          py::call_guard<py::gil_scoped_release>());

    m.def("lp_norm", &lp_norm);
    m.def("linf_norm", &linf_norm);
    m.def("ysp_norm", &ysp_norm);

    py::class_<TrialRecord>(m, "TrialRecord")
        .def_readonly("lhs", &TrialRecord::lhs)
        .def_readonly("rhs", &TrialRecord::rhs)
        .def_readonly("ratio", &TrialRecord::ratio)
        .def_readonly("skipped", &TrialRecord::skipped);
    py::class_<EstimateReport>(m, "EstimateReport")
        .def_readonly("trials", &EstimateReport::trials)
        .def_readonly("max_ratio", &EstimateReport::max_ratio)
        .def_readonly("refined_max_ratio", &EstimateReport::refined_max_ratio)
        .def_readonly("stable", &EstimateReport::stable);
    m.def("verify_thm21", &verify_thm21, py::arg("trials"), py::arg("seed"), py::arg("grid"),
          py::arg("config") = SolverConfig{}, py::call_guard<py::gil_scoped_release>());
    m.def("verify_thm22", &verify_thm22, py::arg("trials"), py::arg("seed"), py::arg("grid"),
          py::arg("config") = SolverConfig{}, py::call_guard<py::gil_scoped_release>());

    py::class_<NirenbergResult>(m, "NirenbergResult")
        .def_readonly("lhs", &NirenbergResult::lhs)
        .def_readonly("rhs", &NirenbergResult::rhs)
        .def_readonly("c_est", &NirenbergResult::c_est)
        .def_readonly("ok", &NirenbergResult::ok);
    m.def("nirenberg_check", &nirenberg_check, py::arg("u"), py::arg("i"), py::arg("m"),
          py::arg("p"), py::arg("q"), py::arg("r"), py::arg("mu"));

    m.def("write_snapshot", &write_snapshot);
    m.def("read_snapshot", [](const std::string& path) {
        const RawSnapshot snap = read_snapshot(path);
        std::vector<py::ssize_t> shape(snap.points.begin(), snap.points.end());
        py::array_t<Complex> out(shape);
        std::copy(snap.values.begin(), snap.values.end(), out.mutable_data());
        return out;
    });

#ifdef BQS_VERSION
    m.attr("__version__") = BQS_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
