#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "anonsense/anonsense.hpp"

namespace py = pybind11;
using namespace anonsense;

namespace {

py::dict report_dict(const EstimatorReport& r) {
    py::dict d;
    d["L"] = r.L;
    d["k"] = r.k;
    d["dt"] = r.dt;
    d["N"] = r.n_repeats;
    d["expectation"] = r.expectation;
    d["variance"] = r.variance;
    d["systematic_error"] = r.systematic_error;
    d["total_uncertainty"] = r.total_uncertainty;
    d["relative_uncertainty"] = r.relative_uncertainty ? py::cast(*r.relative_uncertainty) : py::none();
    d["exact_moment"] = r.exact_moment;
    d["fd_moment"] = r.fd_moment;
    return d;
}

py::object json_to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

// Keyword names are the config keys with '_' in place of '-'.
ExperimentConfig config_from_kwargs(const py::dict& kwargs) {
    py::dict renamed;
    for (const auto& [key, value] : kwargs) {
        auto name = key.cast<std::string>();
        std::replace(name.begin(), name.end(), '_', '-');
        renamed[py::str(name)] = value;
    }
    const auto text = py::module_::import("json").attr("dumps")(renamed).cast<std::string>();
    return config_from_json(nlohmann::json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Anonymous moment estimation over a quantum sensing network";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<FieldConfig>(m, "FieldConfig")
        .def(py::init<std::vector<double>>(), py::arg("omegas"))
        .def_property_readonly("omegas",
                               [](const FieldConfig& c) { return std::vector<double>(c.omegas().begin(), c.omegas().end()); })
        .def("__len__", &FieldConfig::size)
        .def("__getitem__", [](const FieldConfig& c, std::size_t i) {
            if (i >= c.size()) throw py::index_error();
            return c[i];
        })
        .def("max_omega", &FieldConfig::max_omega)
        .def(py::self == py::self)
        .def("__repr__", [](const FieldConfig& c) { return "FieldConfig(L=" + std::to_string(c.size()) + ")"; });

    m.def(
        "draw_fields",
        [](std::size_t L, double omega_min, double omega_max, std::uint64_t seed) {
            return draw_fields(UniformFieldDistribution{omega_min, omega_max, seed}, L);
        },
        py::arg("L"), py::arg("omega_min") = 1.0, py::arg("omega_max") = 5.0, py::arg("seed") = 0);
    m.def("exact_moment", &exact_moment, py::arg("cfg"), py::arg("k"));
    m.def("load_fields", &load_fields, py::arg("path"));
    m.def("save_fields", &save_fields, py::arg("cfg"), py::arg("path"));

    m.def(
        "char_fn",
        [](const FieldConfig& cfg, double t) { return char_fn(cfg, t).value(); },
        py::arg("cfg"), py::arg("t"));
    m.def(
        "char_fn_grid",
        [](const FieldConfig& cfg, const std::vector<double>& times, unsigned workers) {
            std::vector<std::complex<double>> out;
            for (const auto& v : char_fn_grid(cfg, times, workers)) out.push_back(v.value());
            return out;
        },
        py::arg("cfg"), py::arg("times"), py::arg("workers") = 0);

    m.def("binomial", &binomial, py::arg("n"), py::arg("k"));
    m.def("fd_moment", &fd_moment, py::arg("cfg"), py::arg("k"), py::arg("dt"));
    m.def(
        "expectation_C", [](const FieldConfig& cfg, unsigned k, double dt) { return expectation_C(cfg, MomentPlan(k, dt)); },
        py::arg("cfg"), py::arg("k"), py::arg("dt"));
    m.def(
        "variance_C", [](const FieldConfig& cfg, unsigned k, double dt) { return variance_C(cfg, MomentPlan(k, dt)); },
        py::arg("cfg"), py::arg("k"), py::arg("dt"));
    m.def(
        "uncertainty",
        [](const FieldConfig& cfg, unsigned k, double dt, std::uint64_t N) {
            return report_dict(uncertainty(cfg, MomentPlan(k, dt), N));
        },
        py::arg("cfg"), py::arg("k"), py::arg("dt"), py::arg("N"));
    m.def("dt_max", &dt_max, py::arg("omega_max"), py::arg("k"));
    m.def("log_dt_grid", &log_dt_grid, py::arg("dt_hi"), py::arg("points"), py::arg("decades") = 3.0);
    m.def(
        "optimal_dt",
        [](const FieldConfig& cfg, unsigned k, std::uint64_t N, const std::vector<double>& grid, unsigned workers) {
            const auto best = optimal_dt(cfg, k, N, grid, workers);
            py::dict d = report_dict(best.report);
            d["index"] = best.index;
            return d;
        },
        py::arg("cfg"), py::arg("k"), py::arg("N"), py::arg("dt_grid"), py::arg("workers") = 0);

    m.def(
        "outcome_distribution",
        [](const FieldConfig& cfg, double t, const std::string& basis) {
            if (basis != "x" && basis != "y") throw py::value_error("basis must be 'x' or 'y'");
            const auto d = outcome_distribution(cfg, t, basis == "x" ? Basis::x : Basis::y);
            return py::make_tuple(d.p_plus, d.p_minus, d.p_zero);
        },
        py::arg("cfg"), py::arg("t"), py::arg("basis"));
    m.def(
        "sample_protocol",
        [](const FieldConfig& cfg, unsigned k, double dt, std::uint64_t N, std::uint64_t seed, bool raw,
           unsigned workers) {
            SampleRun run;
            {
                py::gil_scoped_release release;
                run = sample_protocol(cfg, MomentPlan(k, dt), N, seed, workers);
            }
            return json_to_py(to_json(run, raw));
        },
        py::arg("cfg"), py::arg("k"), py::arg("dt"), py::arg("N"), py::arg("seed") = 1, py::arg("raw") = false,
        py::arg("workers") = 0);

    m.def(
        "qfi_matrix",
        [](std::size_t L, unsigned k, double dt) {
            const auto f = qfi_matrix(L, k, dt);
            return py::make_tuple(f.diag, f.offdiag);
        },
        py::arg("L"), py::arg("k"), py::arg("dt"));
    m.def(
        "qfi_inverse",
        [](std::size_t L, unsigned k, double dt) {
            const auto f = qfi_inverse(L, k, dt);
            return py::make_tuple(f.diag, f.offdiag);
        },
        py::arg("L"), py::arg("k"), py::arg("dt"));
    m.def(
        "security_margin",
        [](std::size_t L, unsigned k, std::uint64_t N) {
            const auto s = security_margin(L, k, N);
            return py::make_tuple(s.phase_bound, s.secure);
        },
        py::arg("L"), py::arg("k"), py::arg("N"));
    m.def("max_secure_N", &max_secure_N, py::arg("L"), py::arg("k"));
    m.def(
        "qfi_report", [](std::size_t L, unsigned k, double dt, std::uint64_t N) { return json_to_py(to_json(qfi_report(L, k, dt, N))); },
        py::arg("L"), py::arg("k"), py::arg("dt"), py::arg("N"));

    m.def(
        "run_single_copy_pipeline",
        [](const FieldConfig& cfg, double t) { return run_single_copy_pipeline(cfg, t); }, py::arg("cfg"),
        py::arg("t"));
    m.def(
        "analytic_reduced_state",
        [](const FieldConfig& cfg, double t) { return analytic_reduced_state(cfg, t); }, py::arg("cfg"), py::arg("t"));
    m.def(
        "validate",
        [](const std::vector<std::size_t>& oracle_sites, std::size_t trials) {
            ValidationOptions opt;
            opt.oracle_sites = oracle_sites;
            opt.trials = trials;
            return json_to_py(to_json(run_validate(opt)));
        },
        py::arg("oracle_sites") = std::vector<std::size_t>{2, 4, 8}, py::arg("trials") = 20);

    m.def(
        "sweep_dt",
        [](const py::kwargs& kwargs) {
            const auto cfg = config_from_kwargs(kwargs);
            SweepResult result;
            {
                py::gil_scoped_release release;
                result = run_sweep_dt(cfg);
            }
            py::list rows;
            for (const auto& row : result.rows) {
                py::dict d = report_dict(row.report);
                if (row.mc_z) {
                    d["mc_moment_estimate"] = *row.mc_moment_estimate;
                    d["mc_z"] = *row.mc_z;
                }
                rows.append(d);
            }
            py::dict out;
            out["metadata"] = json_to_py(result.metadata);
            out["rows"] = rows;
            out["best_index"] = result.best_index;
            out["self_check_passed"] = result.self_check_passed;
            return out;
        },
        "Sweep dt over the log grid.");
    m.def("sweep_L", [](const py::kwargs& kwargs) {
        const auto cfg = config_from_kwargs(kwargs);
        LSweepResult result;
        {
            py::gil_scoped_release release;
            result = run_sweep_L(cfg, cfg.L_list);
        }
        py::list rows;
        for (const auto& row : result.rows) {
            py::dict d;
            d["L"] = row.L;
            d["N"] = row.N;
            d["dt_star"] = row.dt_star;
            d["min_relative_uncertainty"] = row.min_relative_uncertainty;
            rows.append(d);
        }
        py::dict out;
        out["metadata"] = json_to_py(result.metadata);
        out["rows"] = rows;
        out["non_increasing"] = result.non_increasing;
        out["warnings"] = result.warnings;
        return out;
    });
}
