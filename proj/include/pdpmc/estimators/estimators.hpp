#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "pdpmc/core/state.hpp"
#include "pdpmc/estimators/accumulator.hpp"

namespace pdpmc {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Estimate of one complex expectation value at one time.
struct Estimate {
    Complex value;
    double se_re = 0.0;   ///< standard error of Re(value)
    double se_im = 0.0;   ///< standard error of Im(value)
    double sigma = kNaN;  ///< sigma_1 (paired) or sigma_2 (product); NaN when a, b are not recorded
    std::size_t n = 0;
};

/// sigma_1 = sqrt(V/N) sqrt(V + 2|mu|^2) and sigma_2 = sqrt(V/N) sqrt(2|mu|^2) from sample moments.
/// V and |mu|^2 are pooled over the a and b samples.
struct SigmaPair {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
};
SigmaPair error_formulas(const ComplexMoments& a, const ComplexMoments& b);

/// O_1 = (1/N) sum conj(b_r) a_r. Throws InvalidArgument for N < 2.
Estimate estimate_paired(const EnsembleAccumulator& acc, std::size_t obs, std::size_t g);

/// O_2 = conj(mean b) mean a. The standard errors of Re and Im are the exact
/// variances of a bilinear form in two independent sample means. Throws
/// InvalidArgument for N < 2, when no factors were recorded, or when the caller
/// marks the branches as correlated.
Estimate estimate_product(const EnsembleAccumulator& acc, std::size_t obs, std::size_t g,
                          bool correlated_branches = false);

enum class EstimatorKind { paired, product };

Estimate estimate(const EnsembleAccumulator& acc, std::size_t obs, std::size_t g, EstimatorKind kind);

/// One curve of estimates on the output grid.
struct Curve {
    std::vector<double> t;
    std::vector<Estimate> points;
};

Curve estimate_curve(const EnsembleAccumulator& acc, std::size_t obs, const std::vector<double>& grid,
                     EstimatorKind kind);

/// rho_S from dim_S^2 paired observables laid out row-major starting at first_obs.
CMatrix reconstruct_rho_s(const EnsembleAccumulator& acc, std::size_t first_obs, std::size_t dim_s,
                          std::size_t g);

/// rho_S from factorized means: rho_S = sum_n E(<i,n|Phi_1>) conj(E(<j,n|Phi_2>)).
/// Factor observables are laid out as obs = first_obs + i * dim_e + n.
CMatrix reconstruct_rho_s_product(const EnsembleAccumulator& acc, std::size_t first_obs, std::size_t dim_s,
                                  std::size_t dim_e, std::size_t g);

// Fluctuations ---------------------------------------------------------------

struct FluctuationPoint {
    double t = 0.0;
    double d2 = 0.0;     ///< E(||Phi_1||^2 ||Phi_2||^2) - tr rho^2
    double se = 0.0;
    double bound = 0.0;  ///< tr rho^2 (e^{4 Gamma_0 t} - 1) + D^2(0) e^{4 Gamma_0 t}
    bool alarm = false;  ///< d2 - 3 se > bound
};

struct FluctuationReport {
    std::vector<FluctuationPoint> points;
    bool alarm = false;
};

/// Throws InvalidArgument when gamma0 is not a positive finite number.
FluctuationReport fluctuation_report(const EnsembleAccumulator& acc, const std::vector<double>& grid,
                                     double gamma0, double tr_rho2, double d2_initial);

} // namespace pdpmc
