#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pdpmc/estimators/estimators.hpp"
#include "pdpmc/runner/config.hpp"

namespace pdpmc {

/// Version string written to run manifests.
std::string code_version();

/// Header and rows "t,re,im,stderr_re,stderr_im,n", 17 significant digits, '.' decimals.
std::string format_curve_csv(const Curve& curve);
/// A reference curve in the same schema (zero errors, n = 0).
std::string format_reference_csv(const std::vector<double>& t, const std::vector<Complex>& values);
void write_text_file(const std::string& path, const std::string& content);

struct RunResult {
    std::string out_dir;
    std::vector<std::string> files;   ///< names relative to out_dir, manifest last
    std::vector<std::string> alarms;  ///< invariant violations; a nonempty list means failure
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;
    bool ok() const { return alarms.empty(); }
};

/// Runs the configured experiment and writes its artifacts:
///   jc population   p.csv           (+ p_oracle.csv)
///   jc correlation  c.csv           (+ c_oracle.csv)
///   spin_bath       coherence.csv   (+ coherence_exact.csv, coherence_tcl2.csv)
///   custom_small    rho_ee.csv, rho_eg.csv (+ *_oracle.csv)
/// plus sigma.csv, fluctuation.csv and manifest.json. Throws ConfigError when
/// validation fails and InvalidArgument when out_dir cannot be written.
RunResult run(const RunConfig& config);

} // namespace pdpmc
