// Python bindings for the stability-analysis pipeline. The heavy lifting
// stays in C++; results cross the boundary as plain dict/list structures.

#include "pistab/analysis.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pistab;

namespace {

py::object json_to_py(const nlohmann::json& j) {
    switch (j.type()) {
        case nlohmann::json::value_t::null: return py::none();
        case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
        case nlohmann::json::value_t::number_integer: return py::int_(j.get<long long>());
        case nlohmann::json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
        case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
        case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
        case nlohmann::json::value_t::array: {
            py::list out;
            for (const auto& v : j) out.append(json_to_py(v));
            return out;
        }
        case nlohmann::json::value_t::object: {
            py::dict out;
            for (const auto& [k, v] : j.items()) out[py::str(k)] = json_to_py(v);
            return out;
        }
        default: return py::none();
    }
}

std::map<std::string, Rational> convert_overrides(const std::map<std::string, double>& overrides) {
    std::map<std::string, Rational> out;
    for (const auto& [k, v] : overrides) out[k] = rational_from_double(v);
    return out;
}

AnalysisConfig make_config(int d1, int d2, double eps_pos, double eps_neg, bool auto_degree,
                           int max_degree, int max_iterations, double tolerance, double timeout,
                           const std::string& dump_sdp, const std::string& certificate) {
    AnalysisConfig cfg;
    cfg.d1 = d1;
    cfg.d2 = d2;
    if (eps_pos > 0) cfg.eps_pos = rational_from_double(eps_pos);
    if (eps_neg > 0) cfg.eps_neg = rational_from_double(eps_neg);
    cfg.auto_degree = auto_degree;
    cfg.max_degree = max_degree;
    cfg.solver_max_iterations = max_iterations;
    cfg.solver_tolerance = tolerance;
    cfg.timeout_seconds = timeout;
    cfg.dump_sdp_path = dump_sdp;
    cfg.certificate_path = certificate;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_pistab, m) {
    m.doc() = "exponential stability certification for 1-D PDE/ODE interconnections";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    m.def(
        "validate_file",
        [](const std::string& path, const std::map<std::string, double>& overrides) {
            CoupledSystem sys = ProblemFile::load(path).build(convert_overrides(overrides));
            ValidationReport r = validate(sys);
            py::dict out;
            out["ok"] = r.ok;
            out["failures"] = r.failures;
            return out;
        },
        py::arg("path"), py::arg("overrides") = std::map<std::string, double>{},
        "Structural well-posedness checks; returns {ok, failures}.");

    m.def(
        "analyze_file",
        [](const std::string& path, int d1, int d2, double eps_pos, double eps_neg, bool auto_degree,
           int max_degree, int max_iterations, double tolerance, double timeout,
           const std::string& dump_sdp, const std::string& certificate,
           const std::map<std::string, double>& overrides) {
            AnalysisConfig cfg = make_config(d1, d2, eps_pos, eps_neg, auto_degree, max_degree,
                                             max_iterations, tolerance, timeout, dump_sdp, certificate);
            Report r = analyze(ProblemFile::load(path), cfg, convert_overrides(overrides));
            return json_to_py(r.to_json());
        },
        py::arg("path"), py::arg("d1") = 2, py::arg("d2") = 2, py::arg("eps_pos") = -1.0,
        py::arg("eps_neg") = -1.0, py::arg("auto_degree") = false, py::arg("max_degree") = 6,
        py::arg("max_iterations") = 150000, py::arg("tolerance") = 1e-8, py::arg("timeout") = 0.0,
        py::arg("dump_sdp") = std::string(), py::arg("certificate") = std::string(),
        py::arg("overrides") = std::map<std::string, double>{},
        "Run the full certification pipeline on a problem file; returns the report dict.");

    m.def(
        "sweep_file",
        [](const std::string& path, const std::string& param, double lo, double hi, double tol, int d1,
           int d2, bool auto_degree, int max_degree, int max_iterations, double tolerance,
           double timeout) {
            AnalysisConfig cfg = make_config(d1, d2, -1.0, -1.0, auto_degree, max_degree, max_iterations,
                                             tolerance, timeout, "", "");
            SweepConfig sc;
            sc.param = param;
            sc.lo = lo;
            sc.hi = hi;
            sc.tol = tol;
            Report r = sweep(ProblemFile::load(path), cfg, sc);
            return json_to_py(r.to_json());
        },
        py::arg("path"), py::arg("param"), py::arg("lo"), py::arg("hi"), py::arg("tol") = 0.05,
        py::arg("d1") = 2, py::arg("d2") = 2, py::arg("auto_degree") = false, py::arg("max_degree") = 6,
        py::arg("max_iterations") = 150000, py::arg("tolerance") = 1e-8, py::arg("timeout") = 0.0,
        "Bisect a declared scalar parameter for the largest certified value.");

    m.def(
        "simulate_file",
        [](const std::string& path, int grid, double t_final, double dt,
           const std::map<std::string, double>& overrides) {
            SimulationReport r =
                run_simulation(ProblemFile::load(path), grid, t_final, dt, convert_overrides(overrides));
            py::dict out;
            out["leading_eig_real"] = r.leading_eig_real;
            out["energy_ratio"] = r.energy_ratio;
            out["time"] = r.trace.time;
            out["energy"] = r.trace.energy;
            return out;
        },
        py::arg("path"), py::arg("grid") = 64, py::arg("t_final") = 10.0, py::arg("dt") = 0.0,
        py::arg("overrides") = std::map<std::string, double>{},
        "Finite-difference oracle: leading eigenvalue and energy trace.");

    m.def(
        "assemble_file",
        [](const std::string& path, int d1, int d2, const std::map<std::string, double>& overrides) {
            CoupledSystem sys = ProblemFile::load(path).build(convert_overrides(overrides));
            AssemblyOptions opts;
            opts.d1 = d1;
            opts.d2 = d2;
            AssembledSdp assembled = assemble_sdp(sys, opts);
            py::dict out;
            py::list blocks;
            for (const auto& b : assembled.problem.blocks)
                blocks.append(py::make_tuple(b.name, b.dim));
            out["blocks"] = blocks;
            py::list trips;
            for (const auto& t : assembled.problem.triplets)
                trips.append(py::make_tuple(t.row, t.var, t.value));
            out["triplets"] = trips;
            out["rhs"] = assembled.problem.rhs;
            out["d1_neg"] = assembled.options.d1_neg;
            out["d2_neg"] = assembled.options.d2_neg;
            return out;
        },
        py::arg("path"), py::arg("d1") = 2, py::arg("d2") = 2,
        py::arg("overrides") = std::map<std::string, double>{},
        "Assemble the feasibility SDP (PSD block sizes, sparse equality triplets, rhs) "
        "for use with external conic solvers.");

    m.attr("__version__") = "0.1.0";
}
