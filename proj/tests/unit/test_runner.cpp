#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "pdpmc/runner/config.hpp"
#include "pdpmc/runner/run.hpp"

using namespace pdpmc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pdpmc_test_" + name);
    fs::remove_all(p);
    return p;
}

bool has_warning(const Diagnostics& d) { return !d.warnings.empty(); }

} // namespace

TEST_CASE("every preset is valid and round-trips through JSON") {
    for (const auto& name : preset_names()) {
        const RunConfig c = preset(name);
        CHECK(validate(c).ok());
        const RunConfig back = parse_config(dump_config(c));
        CHECK(dump_config(back) == dump_config(c));
    }
    CHECK_THROWS_AS(preset("fig9"), ConfigError);
}

TEST_CASE("config overlay and field paths in errors") {
    const RunConfig c = parse_config(R"({"jc": {"lambda": 3.5}, "grid": {"points": 11}})", preset("fig1a"));
    CHECK(c.jc.lambda == 3.5);
    CHECK(c.jc.gamma0 == 1.0);
    CHECK(c.grid_points == 11);
    CHECK(c.grid().size() == 11);
    CHECK(c.grid().back() == c.t_max);

    auto path_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return e.path();
        }
        return std::string("<none>");
    };
    CHECK(path_of(R"({"jc": {"lamda": 1}})") == "jc.lamda");
    CHECK(path_of(R"({"spin_bath": {"n_spins": -3}})") == "spin_bath.n_spins");
    CHECK(path_of(R"({"model": "ising"})") == "model");
    CHECK(path_of(R"({"estimator": "median"})") == "estimator");
    CHECK(path_of("{not json") == "<root>");
}

TEST_CASE("validation examples") {
    RunConfig c = preset("fig1a");
    c.jc = JcConfig{1.0, 0.2, 0.0, JcQuantity::population};
    CHECK(validate(c).ok());
    CHECK(has_warning(validate(c)));
    c.jc.lambda = 100.0;
    CHECK(validate(c).ok());
    CHECK_FALSE(has_warning(validate(c)));
    c.jc.lambda = -1.0;
    CHECK_FALSE(validate(c).ok());

    RunConfig s = preset("fig4");
    s.spin.n_spins = 0;
    CHECK_FALSE(validate(s).ok());
    s = preset("fig4");
    s.estimator = EstimatorKind::product;
    CHECK_FALSE(validate(s).ok());

    RunConfig g = preset("fig1a");
    g.grid_points = 1;
    CHECK_FALSE(validate(g).ok());
    g = preset("fig1a");
    g.n_traj = 0;
    CHECK_FALSE(validate(g).ok());
    CHECK_THROWS_AS(run(g), ConfigError);
}

TEST_CASE("CSV schema") {
    Curve curve{{0.0, 0.5}, {Estimate{{1.0, 0.0}, 0.0, 0.0, 0.0, 10}, Estimate{{0.25, -0.125}, 0.01, 0.02, 0.0, 10}}};
    const std::string csv = format_curve_csv(curve);
    CHECK(csv == "t,re,im,stderr_re,stderr_im,n\n0,1,0,0,0,10\n0.5,0.25,-0.125,0.01,0.02,10\n");
    CHECK(format_reference_csv({0.1}, {Complex(1.0 / 3.0, 0.0)}) ==
          "t,re,im,stderr_re,stderr_im,n\n0.10000000000000001,0.33333333333333331,0,0,0,0\n");
    CHECK_THROWS_AS(format_reference_csv({0.1, 0.2}, {Complex(1.0)}), InvalidArgument);
}

TEST_CASE("single-trajectory runs are byte-identical") {
    for (const std::string name : {"fig1a", "fig2", "fig4", "custom_small"}) {
        RunConfig c = preset(name);
        c.n_traj = 1;
        c.seed = 42;
        c.grid_points = 6;
        c.out_dir = scratch_dir(name + "_a").string();
        const RunResult a = run(c);
        c.out_dir = scratch_dir(name + "_b").string();
        const RunResult b = run(c);
        REQUIRE(a.files == b.files);
        for (const auto& f : a.files) {
            if (f == "manifest.json") continue;
            CHECK(slurp(fs::path(a.out_dir) / f) == slurp(fs::path(b.out_dir) / f));
        }
    }
}

TEST_CASE("run writes curves, oracles and a manifest") {
    RunConfig c = preset("fig1a");
    c.n_traj = 2000;
    c.grid_points = 11;
    c.workers = 2;
    c.emit_oracle = true;
    c.out_dir = scratch_dir("manifest").string();
    const RunResult r = run(c);
    CHECK(r.ok());
    for (const char* f : {"p.csv", "p_oracle.csv", "sigma.csv", "fluctuation.csv", "manifest.json"})
        CHECK(fs::exists(fs::path(r.out_dir) / f));
    const auto m = nlohmann::json::parse(slurp(fs::path(r.out_dir) / "manifest.json"));
    CHECK(m["seed"] == c.seed);
    CHECK(m["code_version"] == code_version());
    CHECK(m["config"]["jc"]["lambda"] == 0.2);
    CHECK(m["status"] == "ok");
    CHECK(m["wall_time_s"].get<double>() >= 0.0);

    // the same seed with another worker count gives the same curve
    RunConfig c1 = c;
    c1.workers = 1;
    c1.out_dir = scratch_dir("manifest_w1").string();
    const RunResult r1 = run(c1);
    CHECK(slurp(fs::path(r.out_dir) / "p.csv") == slurp(fs::path(r1.out_dir) / "p.csv"));
}

TEST_CASE("unwritable output directory") {
    const fs::path blocker = scratch_dir("blocker");
    std::ofstream(blocker.string()) << "x";
    RunConfig c = preset("fig1a");
    c.n_traj = 10;
    c.out_dir = (blocker / "sub").string();
    CHECK_THROWS_AS(run(c), InvalidArgument);
}

TEST_CASE("correlation run writes its fluctuation report") {
    RunConfig c = preset("fig2");
    c.n_traj = 500;
    c.grid_points = 6;
    c.out_dir = scratch_dir("fig2").string();
    const RunResult r = run(c);
    CHECK(r.ok());
    CHECK(fs::exists(fs::path(r.out_dir) / "c.csv"));
    CHECK(fs::exists(fs::path(r.out_dir) / "fluctuation.csv"));
}
