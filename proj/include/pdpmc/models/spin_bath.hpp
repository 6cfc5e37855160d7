#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pdpmc/core/rng.hpp"
#include "pdpmc/core/state.hpp"
#include "pdpmc/engine/pdp.hpp"
#include "pdpmc/estimators/accumulator.hpp"
#include "pdpmc/runner/ensemble.hpp"

namespace pdpmc {

/// Central spin coupled uniformly to N bath spins, A^(j) = A / sqrt(N).
struct SpinBathParams {
    std::size_t n_spins = 4;
    double coupling = 1.0;  ///< A
    double omega0 = 1.0;    ///< central spin splitting

    /// Throws InvalidArgument for N = 0, negative or non-finite A, or non-finite omega0.
    void validate() const;
    double scaled_coupling() const;  ///< 2A / sqrt(N)
};

/// Bath angular momentum quantum numbers, stored doubled so that half-integers are exact.
struct SpinBathLabel {
    int two_j = 0;
    int two_m = 0;

    double j() const { return 0.5 * two_j; }
    double m() const { return 0.5 * two_m; }
    bool operator==(const SpinBathLabel&) const = default;
};

/// log C(n, k) via lgamma.
double log_binomial(std::size_t n, std::size_t k);

/// a_j^N, the number of spin-j multiplets among N spin-1/2. Exact for small N,
/// floating point (possibly inf) for large N.
double multiplicity(std::size_t n_spins, int two_j);

/// P(j, m) = 2^-N a_j^N, evaluated in log space.
double jm_probability(std::size_t n_spins, SpinBathLabel label);

/// p_m = 2^-N C(N, N/2 + m). Throws InvalidArgument for |m| > N/2 or the wrong parity.
double marginal_pm(std::size_t n_spins, int two_m);

/// Inversion sampler for (j, m): j from its marginal (2j + 1) P(j, m), then m uniformly.
class JmSampler {
public:
    explicit JmSampler(std::size_t n_spins);

    std::size_t n_spins() const { return n_; }
    int min_two_j() const { return static_cast<int>(n_ % 2); }
    /// Marginal probability of two_j; sums to 1.
    double j_probability(int two_j) const;
    /// u_j selects j, u_m selects m.
    SpinBathLabel sample(double u_j, double u_m) const;
    SpinBathLabel sample(RngStream& rng) const;

private:
    std::size_t n_;
    std::vector<double> prob_;  // indexed by (two_j - min_two_j) / 2
    std::vector<double> cdf_;
};

/// Draws (j, m) for N bath spins; builds a sampler per call.
SpinBathLabel sample_jm(std::size_t n_spins, RngStream& rng);

/// Constant jump rates of the two branches in the transformed frame.
struct SpinRates {
    double plus = 0.0;
    double minus = 0.0;
};

/// Gamma_+- = 2A sqrt((j(j+1) - m(m +- 1)) / N).
SpinRates spin_rates(const SpinBathParams& p, SpinBathLabel label);

/// omega_+- = omega0 + (2A / sqrt(N)) (+-1 + 2m).
SpinRates spin_frequencies(const SpinBathParams& p, SpinBathLabel label);

/// Largest total branch rate over all (j, m): A (N + 1) / sqrt(N).
double spin_rate_bound(const SpinBathParams& p);

struct SpinObservable {
    static constexpr std::size_t coherence = 0;  ///< rho_{+-}(t) in the interaction picture
    static constexpr std::size_t count = 1;
};

struct SpinSimulationOptions {
    bool flip_flop = true;  ///< false drops sigma_+- B_-+ (rates zero, phase factor kept)
};

/// Monte Carlo estimate of rho_{+-}(t) from |+><-| (x) 2^-N I_E.
///
/// Each trajectory draws (j, m) from substream 0 and runs both branches as
/// constant-rate jump processes on their own substreams. Only the summary
/// (k, sum of even waiting times) is kept. The branches share (j, m), so the
/// recorded factors support sigma_1 / sigma_2 diagnostics but not the product
/// estimator.
EnsembleAccumulator simulate_spin_coherence(const SpinBathParams& params, const std::vector<double>& grid,
                                            std::size_t n_traj, const EnsembleOptions& options = {},
                                            const SpinSimulationOptions& sim = {});

// Generic-engine formulation ---------------------------------------------------

/// Bath state prefactor * |j, m> of one branch, with the branch frequency.
struct SpinBathState {
    int two_j = 0;
    int two_m = 0;
    int two_m0 = 0;  ///< m of the initial state
    Complex prefactor{1.0, 0.0};
    double omega = 0.0;

    double norm() const { return std::abs(prefactor); }
};

/// Transformed-frame interaction sigma_+ (x) B_-(t) + sigma_- (x) B_+(t) on the
/// states |+-> (x) |j, m>, driven by the generic engine.
class SpinBathBranchModel {
public:
    using Environment = SpinBathState;
    static constexpr std::size_t kRaise = 0;  ///< sigma_+ (x) B_-: m -> m - 1, phase e^{i omega t}
    static constexpr std::size_t kLower = 1;  ///< sigma_- (x) B_+: m -> m + 1, phase e^{-i omega t}

    explicit SpinBathBranchModel(SpinBathParams params);

    std::size_t channel_count() const { return 2; }
    void rates(const BranchState<Environment>& s, double t, std::span<double> out) const;
    void apply_jump(std::size_t alpha, BranchState<Environment>& s, double t) const;
    double cumulative_rate(const BranchState<Environment>& s, double a, double b) const;
    WaitingTime waiting_time(const BranchState<Environment>& s, double eta, double horizon) const;
    Complex overlap(const Environment& chi2, const Environment& chi1) const;

private:
    double total_rate(const BranchState<Environment>& s) const;
    SpinBathParams params_;
    double scale_;
};

/// The same estimate as simulate_spin_coherence through evolve_branch; identical
/// random draws, so it reproduces the fast path trajectory by trajectory.
EnsembleAccumulator simulate_spin_coherence_engine(const SpinBathParams& params, const std::vector<double>& grid,
                                                   std::size_t n_traj, const EnsembleOptions& options = {});

// Closed forms -----------------------------------------------------------------

/// Second-order TCL prediction rho_{+-}(t) = exp(-Gamma(t)) for rho_{+-}(0) = 1. Requires omega0 > 0.
Complex tcl2_coherence(const SpinBathParams& params, double t);

/// Predicted standard error exp(4At) / sqrt(n_traj).
double error_growth_estimate(const SpinBathParams& params, double t, std::size_t n_traj);

} // namespace pdpmc
