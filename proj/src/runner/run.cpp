#include "pdpmc/runner/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "json.hpp"
#include "pdpmc/models/dense_small.hpp"
#include "pdpmc/models/jaynes_cummings.hpp"
#include "pdpmc/models/spin_bath.hpp"
#include "pdpmc/oracles/references.hpp"
#include "pdpmc/oracles/von_neumann.hpp"

#ifndef PDPMC_VERSION
#define PDPMC_VERSION "unknown"
#endif

namespace pdpmc {

namespace fs = std::filesystem;

std::string code_version() { return PDPMC_VERSION; }

namespace {

// Numbers are written with "{:.17g}": they round-trip and ignore the locale.
constexpr const char* kCurveHeader = "t,re,im,stderr_re,stderr_im,n\n";

} // namespace

std::string format_curve_csv(const Curve& curve) {
    std::string out = kCurveHeader;
    for (std::size_t g = 0; g < curve.points.size(); ++g) {
        const Estimate& e = curve.points[g];
        fmt::format_to(std::back_inserter(out), "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", curve.t[g],
                       e.value.real(), e.value.imag(), e.se_re, e.se_im, e.n);
    }
    return out;
}

std::string format_reference_csv(const std::vector<double>& t, const std::vector<Complex>& values) {
    if (t.size() != values.size()) throw InvalidArgument("format_reference_csv: size mismatch");
    std::string out = kCurveHeader;
    for (std::size_t g = 0; g < t.size(); ++g)
        fmt::format_to(std::back_inserter(out), "{:.17g},{:.17g},{:.17g},0,0,0\n", t[g], values[g].real(),
                       values[g].imag());
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << content;
    if (!out) throw InvalidArgument("write failed: " + path);
}

namespace {

class ArtifactWriter {
public:
    ArtifactWriter(std::string dir, RunResult& result) : dir_(std::move(dir)), result_(result) {}

    void write(const std::string& name, const std::string& content) {
        write_text_file((fs::path(dir_) / name).string(), content);
        result_.files.push_back(name);
    }

private:
    std::string dir_;
    RunResult& result_;
};

std::string sigma_csv(const EnsembleAccumulator& acc, std::size_t obs, const std::vector<double>& grid,
                      RunResult& result) {
    std::string out = "t,sigma1,sigma2\n";
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const SigmaPair s = error_formulas(acc.a(obs, g), acc.b(obs, g));
        fmt::format_to(std::back_inserter(out), "{:.17g},{:.17g},{:.17g}\n", grid[g], s.sigma1, s.sigma2);
        if (s.sigma2 > s.sigma1 * (1.0 + 1e-12) + 1e-300)
            result.alarms.push_back(fmt::format("sigma2 > sigma1 at t = {}", grid[g]));
    }
    return out;
}

std::string fluctuation_csv(const FluctuationReport& report, RunResult& result) {
    std::string out = "t,d2,stderr,bound,alarm\n";
    for (const FluctuationPoint& p : report.points) {
        fmt::format_to(std::back_inserter(out), "{:.17g},{:.17g},{:.17g},{:.17g},{}\n", p.t, p.d2, p.se, p.bound,
                       p.alarm ? 1 : 0);
        if (p.alarm) result.alarms.push_back(fmt::format("fluctuation bound exceeded at t = {}", p.t));
    }
    return out;
}

void run_jc(const RunConfig& c, const EnsembleOptions& opts, ArtifactWriter& out, RunResult& result) {
    const BathCorrelation f(c.jc.gamma0, c.jc.lambda, c.jc.delta);
    const auto grid = c.grid();
    const bool population = c.jc.quantity == JcQuantity::population;
    const EnsembleAccumulator acc = population ? simulate_jc(f, grid, c.n_traj, opts)
                                               : simulate_jc_correlation(f, grid, c.n_traj, opts);
    const std::size_t obs = population ? JcObservable::p : 0;
    const std::string stem = population ? "p" : "c";
    if (c.n_traj >= 2) {
        out.write(stem + ".csv", format_curve_csv(estimate_curve(acc, obs, grid, c.estimator)));
        out.write("sigma.csv", sigma_csv(acc, obs, grid, result));
        out.write("fluctuation.csv", fluctuation_csv(fluctuation_report(acc, grid, f.sqrt_f0(), 1.0, 0.0), result));
    } else {
        // a single trajectory has no error estimate; write the raw value
        Curve curve{grid, {}};
        for (std::size_t g = 0; g < grid.size(); ++g)
            curve.points.push_back(Estimate{acc.paired(obs, g).mean(), 0.0, 0.0, kNaN, 1});
        out.write(stem + ".csv", format_curve_csv(curve));
    }
    if (c.emit_oracle) {
        std::vector<Complex> ref;
        if (population) {
            for (double p : jc_reference_population(f, grid)) ref.emplace_back(p, 0.0);
        } else {
            ref = jc_reference_correlation(f, grid);
        }
        out.write(stem + "_oracle.csv", format_reference_csv(grid, ref));
    }
}

// The exact block oracle costs O(N^2) per time point.
constexpr std::size_t kMaxExactSpins = 20000;

void run_spin(const RunConfig& c, const EnsembleOptions& opts, ArtifactWriter& out, RunResult& result) {
    const auto grid = c.grid();
    const SpinBathParams& p = c.spin;
    const EnsembleAccumulator acc =
        simulate_spin_coherence(p, grid, c.n_traj, opts, SpinSimulationOptions{.flip_flop = c.flip_flop});
    const std::size_t obs = SpinObservable::coherence;
    if (c.n_traj >= 2) {
        out.write("coherence.csv", format_curve_csv(estimate_curve(acc, obs, grid, EstimatorKind::paired)));
        std::string s = "t,sigma1,sigma2,stderr,growth_estimate\n";
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const SigmaPair sp = error_formulas(acc.a(obs, g), acc.b(obs, g));
            const Estimate e = estimate_paired(acc, obs, g);
            fmt::format_to(std::back_inserter(s), "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", grid[g], sp.sigma1,
                           sp.sigma2, std::hypot(e.se_re, e.se_im), error_growth_estimate(p, grid[g], c.n_traj));
            if (sp.sigma2 > sp.sigma1 * (1.0 + 1e-12) + 1e-300)
                result.alarms.push_back(fmt::format("sigma2 > sigma1 at t = {}", grid[g]));
        }
        out.write("sigma.csv", s);
        const double tr_rho2 = std::ldexp(1.0, -static_cast<int>(p.n_spins));
        out.write("fluctuation.csv",
                  fluctuation_csv(fluctuation_report(acc, grid, spin_rate_bound(p), tr_rho2, 1.0 - tr_rho2), result));
    } else {
        Curve curve{grid, {}};
        for (std::size_t g = 0; g < grid.size(); ++g)
            curve.points.push_back(Estimate{acc.paired(obs, g).mean(), 0.0, 0.0, kNaN, 1});
        out.write("coherence.csv", format_curve_csv(curve));
    }
    if (c.emit_oracle) {
        if (!c.flip_flop) {
            std::vector<Complex> ref;
            for (double t : grid) ref.emplace_back(spin_closed_forms(p, t).cos_n, 0.0);
            out.write("coherence_cos_n.csv", format_reference_csv(grid, ref));
            return;
        }
        if (p.n_spins <= kMaxExactSpins) {
            out.write("coherence_exact.csv", format_reference_csv(grid, spin_coherence_exact(p, grid)));
        } else {
            result.warnings.push_back("exact coherence skipped for N > " + std::to_string(kMaxExactSpins));
        }
        if (p.omega0 > 0.0) {
            std::vector<Complex> tcl2;
            for (double t : grid) tcl2.push_back(tcl2_coherence(p, t));
            out.write("coherence_tcl2.csv", format_reference_csv(grid, tcl2));
        }
    }
}

void run_dense(const RunConfig& c, const EnsembleOptions& opts, ArtifactWriter& out, RunResult& result) {
    const auto grid = c.grid();
    const DenseModel model(c.dense);
    const CMatrix rho0 = dense_default_initial(c.dense.env_dim);
    const EnsembleAccumulator acc = simulate_dense(model, rho0, grid, c.n_traj, opts);
    const DenseLayout layout{2 * c.dense.env_dim};
    const std::size_t ee = layout.rho_s() + 2 * kExcited + kExcited;
    const std::size_t eg = layout.rho_s() + 2 * kExcited + kGround;
    for (auto [name, obs] : {std::pair{"rho_ee", ee}, {"rho_eg", eg}}) {
        Curve curve{grid, {}};
        for (std::size_t g = 0; g < grid.size(); ++g)
            curve.points.push_back(c.n_traj >= 2 ? estimate_paired(acc, obs, g)
                                                 : Estimate{acc.paired(obs, g).mean(), 0.0, 0.0, kNaN, 1});
        out.write(std::string(name) + ".csv", format_curve_csv(curve));
    }
    if (c.n_traj >= 2) {
        const double tr_rho2 = (rho0 * rho0).trace().real();
        const double d2_0 = std::max(0.0, acc.norms(0).mean() - tr_rho2);
        out.write("fluctuation.csv",
                  fluctuation_csv(fluctuation_report(acc, grid, model.rate_bound(), tr_rho2, d2_0), result));
    }
    if (c.emit_oracle) {
        VonNeumannOptions o;
        o.rel_tol = 1e-10;
        o.abs_tol = 1e-12;
        const auto rhos =
            integrate_von_neumann([&model](double t) { return model.interaction_hamiltonian(t); }, rho0, grid, o);
        std::vector<Complex> ref_ee, ref_eg;
        for (const CMatrix& r : rhos) {
            const CMatrix s = partial_trace_environment(r, 2, c.dense.env_dim);
            ref_ee.push_back(s(kExcited, kExcited));
            ref_eg.push_back(s(kExcited, kGround));
        }
        out.write("rho_ee_oracle.csv", format_reference_csv(grid, ref_ee));
        out.write("rho_eg_oracle.csv", format_reference_csv(grid, ref_eg));
    }
}

} // namespace

RunResult run(const RunConfig& c) {
    const Diagnostics diag = validate(c);
    if (!diag.ok()) {
        std::string msg;
        for (const auto& e : diag.errors) msg += (msg.empty() ? "" : "; ") + e;
        throw ConfigError("config", msg);
    }
    RunResult result;
    result.out_dir = c.out_dir;
    result.warnings = diag.warnings;
    std::error_code ec;
    fs::create_directories(c.out_dir, ec);
    if (ec || !fs::is_directory(c.out_dir))
        throw InvalidArgument("unwritable output directory " + c.out_dir + (ec ? ": " + ec.message() : ""));

    const auto start = std::chrono::steady_clock::now();
    EnsembleOptions opts;
    opts.seed = c.seed;
    opts.workers = c.workers;
    ArtifactWriter out(c.out_dir, result);
    switch (c.model) {
        case ModelId::jc_resonant:
        case ModelId::jc_detuned: run_jc(c, opts, out, result); break;
        case ModelId::spin_bath: run_spin(c, opts, out, result); break;
        case ModelId::custom_small: run_dense(c, opts, out, result); break;
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::json manifest;
    manifest["config"] = nlohmann::json::parse(dump_config(c));
    manifest["seed"] = c.seed;
    manifest["wall_time_s"] = result.wall_seconds;
    manifest["code_version"] = code_version();
    manifest["files"] = result.files;
    manifest["warnings"] = result.warnings;
    manifest["alarms"] = result.alarms;
    manifest["status"] = result.ok() ? "ok" : "alarm";
    out.write("manifest.json", manifest.dump(2) + "\n");
    return result;
}

} // namespace pdpmc
