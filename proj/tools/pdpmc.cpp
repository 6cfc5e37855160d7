// pdpmc: command-line runner for the stochastic product-state Monte Carlo.
//
// Exit codes: 0 ok, 1 runtime failure, 2 invalid configuration, 3 invariant alarm.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pdpmc/runner/config.hpp"
#include "pdpmc/runner/run.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAlarm = 3;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact Monte Carlo for open quantum systems with stochastic product states"};
    app.set_version_flag("--version", pdpmc::code_version());

    std::string config_path;
    std::string preset_name;
    std::optional<std::size_t> n_traj;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> out_dir;
    bool emit_oracle = false;
    bool validate_only = false;
    bool list_presets = false;
    bool print_config = false;

    app.add_option("--config", config_path, "JSON config file, applied on top of the preset")->check(CLI::ExistingFile);
    app.add_option("--preset", preset_name, "Named parameter set (see --list-presets)");
    app.add_option("--n-traj", n_traj, "Number of trajectories")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "Output directory");
    app.add_flag("--emit-oracle", emit_oracle, "Also write reference curves");
    app.add_flag("--validate", validate_only, "Check the config and exit");
    app.add_flag("--list-presets", list_presets, "Print the preset names and exit");
    app.add_flag("--print-config", print_config, "Print the resolved config as JSON and exit");

    CLI11_PARSE(app, argc, argv);

    if (list_presets) {
        for (const auto& name : pdpmc::preset_names()) std::cout << name << '\n';
        return 0;
    }

    pdpmc::RunConfig config;
    try {
        if (!preset_name.empty()) config = pdpmc::preset(preset_name);
        if (!config_path.empty()) config = pdpmc::load_config(config_path, config);
    } catch (const pdpmc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (n_traj) config.n_traj = *n_traj;
    if (seed) config.seed = *seed;
    if (workers) config.workers = *workers;
    if (out_dir) config.out_dir = *out_dir;
    if (emit_oracle) config.emit_oracle = true;

    if (print_config) {
        std::cout << pdpmc::dump_config(config) << '\n';
        return 0;
    }

    const pdpmc::Diagnostics diag = pdpmc::validate(config);
    for (const auto& w : diag.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& e : diag.errors) std::cerr << "error: " << e << '\n';
    if (!diag.ok()) return kExitConfig;
    if (validate_only) {
        std::cout << "config ok\n";
        return 0;
    }

    try {
        const pdpmc::RunResult result = pdpmc::run(config);
        for (const auto& w : result.warnings)
            if (std::find(diag.warnings.begin(), diag.warnings.end(), w) == diag.warnings.end())
                std::cerr << "warning: " << w << '\n';
        std::cout << "wrote " << result.files.size() << " files to " << result.out_dir << " in " << result.wall_seconds
                  << " s\n";
        if (!result.ok()) {
            for (const auto& a : result.alarms) std::cerr << "alarm: " << a << '\n';
            return kExitAlarm;
        }
    } catch (const pdpmc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
