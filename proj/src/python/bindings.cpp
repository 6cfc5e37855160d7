// Python bindings: simulations return dicts of numpy arrays, configs travel as JSON text.

#include <algorithm>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pdpmc/core/error.hpp"
#include "pdpmc/estimators/estimators.hpp"
#include "pdpmc/models/jaynes_cummings.hpp"
#include "pdpmc/models/spin_bath.hpp"
#include "pdpmc/oracles/references.hpp"
#include "pdpmc/runner/config.hpp"
#include "pdpmc/runner/run.hpp"

namespace py = pybind11;
using namespace pdpmc;

namespace {

EstimatorKind parse_estimator(const std::string& s) {
    if (s == "paired") return EstimatorKind::paired;
    if (s == "product") return EstimatorKind::product;
    throw InvalidArgument("estimator must be 'paired' or 'product'");
}

EnsembleOptions options(std::uint64_t seed, unsigned workers) {
    EnsembleOptions o;
    o.seed = seed;
    o.workers = workers;
    return o;
}

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
    py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::dict curve_dict(const Curve& c) {
    const auto n = static_cast<py::ssize_t>(c.t.size());
    py::array_t<std::complex<double>> value(n);
    py::array_t<double> se_re(n), se_im(n), sigma(n);
    auto v = value.mutable_unchecked<1>();
    auto r = se_re.mutable_unchecked<1>();
    auto i = se_im.mutable_unchecked<1>();
    auto s = sigma.mutable_unchecked<1>();
    for (py::ssize_t k = 0; k < n; ++k) {
        const Estimate& e = c.points[static_cast<std::size_t>(k)];
        v(k) = e.value;
        r(k) = e.se_re;
        i(k) = e.se_im;
        s(k) = e.sigma;
    }
    py::dict d;
    d["t"] = to_array(c.t);
    d["value"] = value;
    d["stderr_re"] = se_re;
    d["stderr_im"] = se_im;
    d["sigma"] = sigma;
    d["n"] = c.points.empty() ? 0 : c.points.front().n;
    return d;
}


} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stochastic product-state Monte Carlo for open quantum systems.";
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    m.def(
        "simulate_jc",
        [](const std::vector<double>& grid, std::size_t n_traj, double gamma0, double lambda_, double delta,
           std::uint64_t seed, unsigned workers, const std::string& estimator) {
            const BathCorrelation f(gamma0, lambda_, delta);
            EnsembleAccumulator acc;
            {
                py::gil_scoped_release release;
                acc = simulate_jc(f, grid, n_traj, options(seed, workers));
            }
            return curve_dict(estimate_curve(acc, JcObservable::p, grid, parse_estimator(estimator)));
        },
        py::arg("grid"), py::arg("n_traj"), py::arg("gamma0") = 1.0, py::arg("lambda_") = 0.2, py::arg("delta") = 0.0,
        py::arg("seed") = 1, py::arg("workers") = 1, py::arg("estimator") = "product",
        "Excited-state population of the damped Jaynes-Cummings atom.");

    m.def(
        "simulate_jc_correlation",
        [](const std::vector<double>& grid, std::size_t n_traj, double gamma0, double lambda_, double delta,
           std::uint64_t seed, unsigned workers, const std::string& estimator) {
            const BathCorrelation f(gamma0, lambda_, delta);
            EnsembleAccumulator acc;
            {
                py::gil_scoped_release release;
                acc = simulate_jc_correlation(f, grid, n_traj, options(seed, workers));
            }
            return curve_dict(estimate_curve(acc, 0, grid, parse_estimator(estimator)));
        },
        py::arg("grid"), py::arg("n_traj"), py::arg("gamma0") = 1.0, py::arg("lambda_") = 0.2, py::arg("delta") = 0.0,
        py::arg("seed") = 1, py::arg("workers") = 1, py::arg("estimator") = "product",
        "Two-time correlation of the damped Jaynes-Cummings atom.");

    m.def(
        "simulate_spin_coherence",
        [](const std::vector<double>& grid, std::size_t n_traj, std::size_t n_spins, double coupling, double omega0,
           bool flip_flop, std::uint64_t seed, unsigned workers) {
            const SpinBathParams p{n_spins, coupling, omega0};
            SpinSimulationOptions sim;
            sim.flip_flop = flip_flop;
            EnsembleAccumulator acc;
            {
                py::gil_scoped_release release;
                acc = simulate_spin_coherence(p, grid, n_traj, options(seed, workers), sim);
            }
            return curve_dict(estimate_curve(acc, SpinObservable::coherence, grid, EstimatorKind::paired));
        },
        py::arg("grid"), py::arg("n_traj"), py::arg("n_spins"), py::arg("coupling") = 1.0, py::arg("omega0") = 1.0,
        py::arg("flip_flop") = true, py::arg("seed") = 1, py::arg("workers") = 1,
        "Central spin coherence rho_{+-}(t) in the interaction picture.");

    m.def(
        "jc_reference_population",
        [](const std::vector<double>& grid, double gamma0, double lambda_, double delta) {
            return to_array(jc_reference_population(BathCorrelation(gamma0, lambda_, delta), grid));
        },
        py::arg("grid"), py::arg("gamma0") = 1.0, py::arg("lambda_") = 0.2, py::arg("delta") = 0.0);
    m.def(
        "jc_reference_correlation",
        [](const std::vector<double>& grid, double gamma0, double lambda_, double delta) {
            return to_array(jc_reference_correlation(BathCorrelation(gamma0, lambda_, delta), grid));
        },
        py::arg("grid"), py::arg("gamma0") = 1.0, py::arg("lambda_") = 0.2, py::arg("delta") = 0.0);
    m.def(
        "spin_coherence_exact",
        [](const std::vector<double>& grid, std::size_t n_spins, double coupling, double omega0) {
            return to_array(spin_coherence_exact(SpinBathParams{n_spins, coupling, omega0}, grid));
        },
        py::arg("grid"), py::arg("n_spins"), py::arg("coupling") = 1.0, py::arg("omega0") = 1.0);
    m.def(
        "spin_coherence_dense",
        [](const std::vector<double>& grid, std::size_t n_spins, double coupling, double omega0) {
            return to_array(spin_coherence_dense(SpinBathParams{n_spins, coupling, omega0}, grid));
        },
        py::arg("grid"), py::arg("n_spins"), py::arg("coupling") = 1.0, py::arg("omega0") = 1.0,
        "Full diagonalization, n_spins <= 8.");
    m.def(
        "tcl2_coherence",
        [](double t, std::size_t n_spins, double coupling, double omega0) {
            return tcl2_coherence(SpinBathParams{n_spins, coupling, omega0}, t);
        },
        py::arg("t"), py::arg("n_spins"), py::arg("coupling") = 1.0, py::arg("omega0") = 1.0);
    m.def(
        "coherence_without_flip_flop",
        [](double t, std::size_t n_spins, double coupling) {
            return spin_closed_forms(SpinBathParams{n_spins, coupling, 1.0}, t).cos_n;
        },
        py::arg("t"), py::arg("n_spins"), py::arg("coupling") = 1.0);
    m.def("jm_probability", [](std::size_t n, int two_j, int two_m) { return jm_probability(n, {two_j, two_m}); },
          py::arg("n_spins"), py::arg("two_j"), py::arg("two_m"));

    m.def("preset_names", &preset_names);
    m.def(
        "preset", [](const std::string& name) { return dump_config(preset(name)); }, py::arg("name"),
        "Preset as JSON text.");
    m.def(
        "validate",
        [](const std::string& config_json) {
            const Diagnostics d = validate(parse_config(config_json));
            py::dict r;
            r["errors"] = d.errors;
            r["warnings"] = d.warnings;
            return r;
        },
        py::arg("config_json"));
    m.def(
        "run",
        [](const std::string& config_json) {
            const RunConfig c = parse_config(config_json);
            RunResult res;
            {
                py::gil_scoped_release release;
                res = run(c);
            }
            py::dict r;
            r["out_dir"] = res.out_dir;
            r["files"] = res.files;
            r["alarms"] = res.alarms;
            r["warnings"] = res.warnings;
            r["wall_seconds"] = res.wall_seconds;
            return r;
        },
        py::arg("config_json"), "Runs a JSON config (see preset()) and writes its output directory.");
    m.attr("__version__") = code_version();
}
