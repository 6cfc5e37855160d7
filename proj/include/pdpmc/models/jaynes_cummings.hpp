#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pdpmc/core/state.hpp"
#include "pdpmc/engine/pdp.hpp"
#include "pdpmc/estimators/estimators.hpp"
#include "pdpmc/runner/ensemble.hpp"

namespace pdpmc {

/// Lorentzian reservoir correlation f(t) = (gamma0 lambda / 2) exp(i delta t - lambda |t|).
class BathCorrelation {
public:
    BathCorrelation(double gamma0, double lambda, double delta = 0.0);

    Complex operator()(double t) const;
    double modulus(double t) const;
    double f0() const { return f0_; }
    double sqrt_f0() const { return sqrt_f0_; }
    double gamma0() const { return gamma0_; }
    double lambda() const { return lambda_; }
    double delta() const { return delta_; }
    /// int_0^inf |f(s)| ds / sqrt(f(0)) = sqrt(gamma0 / (2 lambda)).
    double odd_jump_budget() const { return budget_; }

private:
    double gamma0_, lambda_, delta_;
    double f0_, sqrt_f0_, budget_;
};

enum class Sector { vacuum, one_particle };

/// Reservoir state prefactor |0> (vacuum) or prefactor B^dag(creation_time)|0> / sqrt(f(0)).
/// The drift growth is kept by the engine as an exponent, so here |prefactor| changes only
/// in the fixed-rate scheme.
struct SymbolicReservoirState {
    Sector sector = Sector::vacuum;
    Complex prefactor{1.0, 0.0};
    double creation_time = 0.0;

    double norm() const { return std::abs(prefactor); }
};

/// Total jump rate of a reservoir state for a system state in the matching sector
/// (|e> component in the vacuum, |g> component in the one-particle sector).
double jc_rate(const BathCorrelation& f, const SymbolicReservoirState& chi, double t_now);

/// Norm-conserving jump at t_jump: vacuum -> one-particle (psi -> -i sigma_- psi) or
/// one-particle -> vacuum (psi -> -i sigma_+ psi, prefactor times f(tau)/|f(tau)|).
/// Throws InvalidArgument if the system operator annihilates psi.
std::pair<StateVector, SymbolicReservoirState> jc_apply_jump(const BathCorrelation& f, const StateVector& psi,
                                                             const SymbolicReservoirState& chi, double t_jump);

/// Waiting time from t_last_jump for a unit-weight system state in the matching sector.
WaitingTime jc_waiting_time(const BathCorrelation& f, const SymbolicReservoirState& chi, double t_last_jump,
                            double eta);

/// <chi2|chi1>.
Complex jc_overlap(const BathCorrelation& f, const SymbolicReservoirState& chi1, const SymbolicReservoirState& chi2);

/// Damped Jaynes-Cummings model in the interaction picture,
/// H_I(t) = sigma_+ B(t) + sigma_- B^dag(t), with the reservoir kept symbolically.
class JaynesCummingsModel {
public:
    using Environment = SymbolicReservoirState;
    static constexpr std::size_t kRaise = 0;  ///< sigma_+ (x) B(t)
    static constexpr std::size_t kLower = 1;  ///< sigma_- (x) B^dag(t)

    explicit JaynesCummingsModel(BathCorrelation f) : f_(f) {}

    const BathCorrelation& correlation() const { return f_; }
    std::size_t channel_count() const { return 2; }
    /// Upper bound of every rate, sqrt(f(0)).
    double rate_bound() const { return f_.sqrt_f0(); }

    void rates(const BranchState<Environment>& s, double t, std::span<double> out) const;
    void apply_jump(std::size_t alpha, BranchState<Environment>& s, double t) const;
    double cumulative_rate(const BranchState<Environment>& s, double a, double b) const;
    std::optional<double> cumulative_limit(const BranchState<Environment>& s, double t) const;
    WaitingTime waiting_time(const BranchState<Environment>& s, double eta, double horizon) const;

    /// Raw operator action for the fixed-rate scheme; an annihilated branch gets psi = 0.
    void apply_operators(std::size_t alpha, BranchState<Environment>& s, double t) const;
    void scale_environment(Environment& chi, double c) const { chi.prefactor *= c; }

    Complex overlap(const Environment& chi2, const Environment& chi1) const { return jc_overlap(f_, chi1, chi2); }

private:
    BathCorrelation f_;
};

// Ensemble simulation ---------------------------------------------------------

/// Observables recorded by simulate_jc.
struct JcObservable {
    static constexpr std::size_t p = 0;      ///< <e|rho_S|e>, factorized as <e,0|Phi_nu>
    static constexpr std::size_t rho = 1;    ///< rho_S entries 1..4, row-major (e, g), paired only
    static constexpr std::size_t count = 5;
};

/// Ensemble of the JC model from |e> (x) |0> on both branches. Records p(t),
/// the paired rho_S and ||Phi_1||^2 ||Phi_2||^2 at every grid point.
EnsembleAccumulator simulate_jc(const BathCorrelation& f, const std::vector<double>& grid, std::size_t n_traj,
                                const EnsembleOptions& options = {});

/// c(t) = e^{-i omega_0 t} <sigma_+(t) sigma_-(0)> for the initial state |e> (x) |0>:
/// branch 1 starts from sigma_-|e,0>, branch 2 from |e,0>, and the factorized
/// estimand is <e,0|sigma_+ Phi_1> times conj(<e,0|Phi_2>). Observable index 0.
EnsembleAccumulator simulate_jc_correlation(const BathCorrelation& f, const std::vector<double>& grid,
                                            std::size_t n_traj, const EnsembleOptions& options = {});

/// Product-pair initial state |e> (x) |0> on both branches.
ProductPairState<SymbolicReservoirState> jc_excited_vacuum();

} // namespace pdpmc
