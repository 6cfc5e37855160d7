#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pdpmc/estimators/estimators.hpp"
#include "pdpmc/models/dense_small.hpp"
#include "pdpmc/models/spin_bath.hpp"

namespace pdpmc {

enum class ModelId { jc_resonant, jc_detuned, spin_bath, custom_small };
enum class JcQuantity { population, correlation };

struct JcConfig {
    double gamma0 = 1.0;
    double lambda = 0.2;
    double delta = 0.0;
    JcQuantity quantity = JcQuantity::population;
};

/// Everything a run needs. Loaded from JSON, a preset, or both.
struct RunConfig {
    ModelId model = ModelId::jc_resonant;
    JcConfig jc;
    SpinBathParams spin;
    bool flip_flop = true;
    DenseModelParams dense;
    std::size_t n_traj = 100000;
    double t_max = 5.0;
    std::size_t grid_points = 51;
    std::uint64_t seed = 1;
    EstimatorKind estimator = EstimatorKind::product;
    std::string out_dir = "out";
    unsigned workers = 1;
    bool emit_oracle = false;

    /// Uniform grid of grid_points times on [0, t_max].
    std::vector<double> grid() const;
};

/// Raised for malformed or out-of-range config fields. `path` names the field, e.g. "jc.lambda".
class ConfigError : public InvalidArgument {
public:
    ConfigError(std::string path, const std::string& message);
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

std::string to_string(ModelId id);
std::string to_string(JcQuantity q);
std::string to_string(EstimatorKind k);

/// Names accepted by preset(): fig1a, fig1b, fig2, fig3, fig4, fig5, custom_small.
std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
RunConfig preset(const std::string& name);

/// Overlays the fields present in `json_text` onto `base`. Unknown keys are errors.
RunConfig parse_config(const std::string& json_text, const RunConfig& base = {});
RunConfig load_config(const std::string& path, const RunConfig& base = {});
/// The complete config as pretty-printed JSON; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& config);

struct Diagnostics {
    std::vector<std::string> errors;    ///< "path: message"
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

/// Range checks. Warns when lambda < 2 gamma0 (the bath memory outlasts the
/// Markovian decay time, where second-order expansions of the generator fail).
Diagnostics validate(const RunConfig& config);

} // namespace pdpmc
