#include "pdpmc/runner/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pdpmc {

using nlohmann::json;

ConfigError::ConfigError(std::string path, const std::string& message)
    : InvalidArgument(path + ": " + message), path_(std::move(path)) {}

std::vector<double> RunConfig::grid() const {
    std::vector<double> g(grid_points);
    if (grid_points == 0) return g;
    if (grid_points == 1) {
        g[0] = 0.0;
        return g;
    }
    for (std::size_t i = 0; i < grid_points; ++i)
        g[i] = t_max * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    g.back() = t_max;
    return g;
}

std::string to_string(ModelId id) {
    switch (id) {
        case ModelId::jc_resonant: return "jc_resonant";
        case ModelId::jc_detuned: return "jc_detuned";
        case ModelId::spin_bath: return "spin_bath";
        case ModelId::custom_small: return "custom_small";
    }
    return "?";
}

std::string to_string(JcQuantity q) { return q == JcQuantity::population ? "population" : "correlation"; }
std::string to_string(EstimatorKind k) { return k == EstimatorKind::paired ? "paired" : "product"; }

namespace {

ModelId parse_model(const std::string& s, const std::string& path) {
    for (ModelId id : {ModelId::jc_resonant, ModelId::jc_detuned, ModelId::spin_bath, ModelId::custom_small})
        if (to_string(id) == s) return id;
    throw ConfigError(path, "unknown model '" + s + "'");
}

// Rejects keys outside `allowed` so that typos do not pass silently.
void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& prefix) {
    if (!j.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.contains(key)) throw ConfigError(prefix.empty() ? key : prefix + "." + key, "unknown key");
}

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

template <class T>
void read(const json& j, const std::string& key, T& out, const std::string& prefix) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    const std::string path = join(prefix, key);
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
        out = v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(path, "expected a string");
        out = v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(path, "expected a number");
        out = v.get<T>();
    } else {
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ConfigError(path, "expected a nonnegative integer");
        out = v.get<T>();
    }
}

} // namespace

std::vector<std::string> preset_names() {
    return {"fig1a", "fig1b", "fig2", "fig3", "fig4", "fig5", "custom_small"};
}

RunConfig preset(const std::string& name) {
    RunConfig c;
    if (name == "fig1a" || name == "fig1b") {
        c.model = ModelId::jc_resonant;
        c.jc.lambda = name == "fig1a" ? 0.2 : 0.05;
        c.t_max = 5.0;
    } else if (name == "fig2") {
        c.model = ModelId::jc_resonant;
        c.jc.lambda = 0.2;
        c.jc.quantity = JcQuantity::correlation;
        c.t_max = 5.0;
    } else if (name == "fig3") {
        c.model = ModelId::jc_detuned;
        c.jc.lambda = 0.2;
        c.jc.delta = 1.0;
        c.t_max = 8.0;
        c.grid_points = 81;
    } else if (name == "fig4") {
        c.model = ModelId::spin_bath;
        c.spin = SpinBathParams{1000, 0.1, 1.0};
        c.estimator = EstimatorKind::paired;
        c.t_max = 7.5;
        c.grid_points = 31;
    } else if (name == "fig5") {
        c.model = ModelId::spin_bath;
        c.spin = SpinBathParams{100, 0.5, 1.0};
        c.estimator = EstimatorKind::paired;
        c.t_max = 1.5;
        c.grid_points = 31;
    } else if (name == "custom_small") {
        c.model = ModelId::custom_small;
        c.estimator = EstimatorKind::paired;
        c.t_max = 2.0;
        c.grid_points = 21;
    } else {
        throw ConfigError("preset", "unknown preset '" + name + "'");
    }
    c.out_dir = "out/" + name;
    return c;
}

RunConfig parse_config(const std::string& text, const RunConfig& base) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    RunConfig c = base;
    check_keys(j, {"model", "n_traj", "seed", "workers", "estimator", "grid", "jc", "spin_bath", "custom_small",
                   "output"},
               "");
    if (j.contains("model")) {
        std::string m;
        read(j, "model", m, "");
        c.model = parse_model(m, "model");
    }
    read(j, "n_traj", c.n_traj, "");
    read(j, "seed", c.seed, "");
    read(j, "workers", c.workers, "");
    if (j.contains("estimator")) {
        std::string e;
        read(j, "estimator", e, "");
        if (e == "paired") c.estimator = EstimatorKind::paired;
        else if (e == "product") c.estimator = EstimatorKind::product;
        else throw ConfigError("estimator", "expected 'paired' or 'product'");
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, {"t_max", "points"}, "grid");
        read(g, "t_max", c.t_max, "grid");
        read(g, "points", c.grid_points, "grid");
    }
    if (j.contains("jc")) {
        const json& s = j.at("jc");
        check_keys(s, {"gamma0", "lambda", "delta", "quantity"}, "jc");
        read(s, "gamma0", c.jc.gamma0, "jc");
        read(s, "lambda", c.jc.lambda, "jc");
        read(s, "delta", c.jc.delta, "jc");
        if (s.contains("quantity")) {
            std::string q;
            read(s, "quantity", q, "jc");
            if (q == "population") c.jc.quantity = JcQuantity::population;
            else if (q == "correlation") c.jc.quantity = JcQuantity::correlation;
            else throw ConfigError("jc.quantity", "expected 'population' or 'correlation'");
        }
    }
    if (j.contains("spin_bath")) {
        const json& s = j.at("spin_bath");
        check_keys(s, {"n_spins", "coupling", "omega0", "flip_flop"}, "spin_bath");
        read(s, "n_spins", c.spin.n_spins, "spin_bath");
        read(s, "coupling", c.spin.coupling, "spin_bath");
        read(s, "omega0", c.spin.omega0, "spin_bath");
        read(s, "flip_flop", c.flip_flop, "spin_bath");
    }
    if (j.contains("custom_small")) {
        const json& s = j.at("custom_small");
        check_keys(s, {"g", "kappa", "delta", "nu", "env_dim"}, "custom_small");
        read(s, "g", c.dense.g, "custom_small");
        read(s, "kappa", c.dense.kappa, "custom_small");
        read(s, "delta", c.dense.delta, "custom_small");
        read(s, "nu", c.dense.nu, "custom_small");
        read(s, "env_dim", c.dense.env_dim, "custom_small");
    }
    if (j.contains("output")) {
        const json& s = j.at("output");
        check_keys(s, {"dir", "emit_oracle"}, "output");
        read(s, "dir", c.out_dir, "output");
        read(s, "emit_oracle", c.emit_oracle, "output");
    }
    return c;
}

RunConfig load_config(const std::string& path, const RunConfig& base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

std::string dump_config(const RunConfig& c) {
    json j;
    j["model"] = to_string(c.model);
    j["n_traj"] = c.n_traj;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["estimator"] = to_string(c.estimator);
    j["grid"] = {{"t_max", c.t_max}, {"points", c.grid_points}};
    j["jc"] = {{"gamma0", c.jc.gamma0},
               {"lambda", c.jc.lambda},
               {"delta", c.jc.delta},
               {"quantity", to_string(c.jc.quantity)}};
    j["spin_bath"] = {{"n_spins", c.spin.n_spins},
                      {"coupling", c.spin.coupling},
                      {"omega0", c.spin.omega0},
                      {"flip_flop", c.flip_flop}};
    j["custom_small"] = {{"g", c.dense.g},
                         {"kappa", c.dense.kappa},
                         {"delta", c.dense.delta},
                         {"nu", c.dense.nu},
                         {"env_dim", c.dense.env_dim}};
    j["output"] = {{"dir", c.out_dir}, {"emit_oracle", c.emit_oracle}};
    return j.dump(2);
}

Diagnostics validate(const RunConfig& c) {
    Diagnostics d;
    auto error = [&](const std::string& path, const std::string& msg) { d.errors.push_back(path + ": " + msg); };
    if (c.n_traj < 1) error("n_traj", "must be at least 1");
    if (c.grid_points < 2) error("grid.points", "must be at least 2");
    if (!(c.t_max > 0.0) || !std::isfinite(c.t_max)) error("grid.t_max", "must be a positive number");
    if (c.workers < 1) error("workers", "must be at least 1");
    switch (c.model) {
        case ModelId::jc_resonant:
        case ModelId::jc_detuned:
            if (!(c.jc.gamma0 > 0.0) || !std::isfinite(c.jc.gamma0)) error("jc.gamma0", "must be positive");
            if (!(c.jc.lambda > 0.0) || !std::isfinite(c.jc.lambda)) error("jc.lambda", "must be positive");
            if (!std::isfinite(c.jc.delta)) error("jc.delta", "must be finite");
            if (c.model == ModelId::jc_resonant && c.jc.delta != 0.0)
                error("jc.delta", "must be 0 for jc_resonant (use jc_detuned)");
            if (d.ok() && c.jc.lambda < 2.0 * c.jc.gamma0)
                d.warnings.push_back("jc.lambda: strong coupling (1/lambda > 1/(2 gamma0)); bath memory is long and "
                                     "perturbative master equations are unreliable");
            break;
        case ModelId::spin_bath:
            if (c.spin.n_spins < 1) error("spin_bath.n_spins", "must be at least 1");
            if (!(c.spin.coupling >= 0.0) || !std::isfinite(c.spin.coupling))
                error("spin_bath.coupling", "must be a finite number >= 0");
            if (!std::isfinite(c.spin.omega0)) error("spin_bath.omega0", "must be finite");
            if (c.estimator == EstimatorKind::product)
                error("estimator", "the spin bath branches share (j, m); use 'paired'");
            break;
        case ModelId::custom_small:
            if (c.estimator == EstimatorKind::product)
                error("estimator", "custom_small reports rho_S entries with the paired estimator; use 'paired'");
            if (c.dense.env_dim < 2) error("custom_small.env_dim", "must be at least 2");
            if (c.dense.env_dim > 64) error("custom_small.env_dim", "must be at most 64");
            for (auto [name, v] : {std::pair{"g", c.dense.g}, {"kappa", c.dense.kappa}, {"delta", c.dense.delta},
                                   {"nu", c.dense.nu}})
                if (!std::isfinite(v)) error(std::string("custom_small.") + name, "must be finite");
            break;
    }
    return d;
}

} // namespace pdpmc
