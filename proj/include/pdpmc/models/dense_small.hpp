#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "pdpmc/core/decompose.hpp"
#include "pdpmc/core/state.hpp"
#include "pdpmc/engine/pdp.hpp"
#include "pdpmc/estimators/accumulator.hpp"
#include "pdpmc/runner/ensemble.hpp"

namespace pdpmc {

struct DenseModelParams {
    double g = 1.0;       ///< exchange coupling
    double kappa = 0.5;   ///< dephasing coupling amplitude
    double delta = 0.3;   ///< exchange detuning
    double nu = 1.0;      ///< dephasing drive frequency
    std::size_t env_dim = 3;  ///< oscillator truncation
};

/// Two-level system coupled to a truncated oscillator with a dense environment:
///     H_I(t) = g (sigma_+ (x) a e^{i delta t} + sigma_- (x) a^dag e^{-i delta t})
///              + kappa cos(nu t) sigma_z (x) (a + a^dag).
/// Small enough for exact dense integration; used to check the engine end to end.
class DenseModel {
public:
    using Environment = StateVector;

    explicit DenseModel(DenseModelParams params);

    const DenseModelParams& params() const { return params_; }
    std::size_t channel_count() const { return 3; }
    std::size_t system_dim() const { return 2; }
    std::size_t env_dim() const { return params_.env_dim; }

    const CMatrix& system_operator(std::size_t alpha) const { return a_[alpha]; }
    /// B_alpha(t) as a dense matrix.
    CMatrix environment_operator(std::size_t alpha, double t) const;
    /// sum_alpha A_alpha (x) B_alpha(t).
    CMatrix interaction_hamiltonian(double t) const;
    /// Largest possible total rate, sum_alpha ||A_alpha|| ||B_alpha(t)||_op over t.
    double rate_bound() const;

    void rates(const BranchState<Environment>& s, double t, std::span<double> out) const;
    void apply_jump(std::size_t alpha, BranchState<Environment>& s, double t) const;
    double cumulative_rate(const BranchState<Environment>& s, double a, double b) const;

    void apply_operators(std::size_t alpha, BranchState<Environment>& s, double t) const;
    void scale_environment(Environment& chi, double c) const { chi *= c; }

    Complex overlap(const Environment& chi2, const Environment& chi1) const { return inner_product(chi2, chi1); }

private:
    struct Factors {
        std::array<double, 3> system{};  // ||A_alpha psi|| / ||psi||
        std::array<double, 3> env{};     // ||B_alpha chi|| / ||chi|| without the time-dependent modulus
    };
    Factors factors(const BranchState<Environment>& s) const;
    Complex time_factor(std::size_t alpha, double t) const;

    DenseModelParams params_;
    std::array<CMatrix, 3> a_;  // sigma_+, sigma_-, sigma_z
    std::array<CMatrix, 3> b_;  // g a, g a^dag, kappa (a + a^dag)
};

/// Observable layout of simulate_dense for D = 2 * env_dim.
struct DenseLayout {
    std::size_t dim = 0;
    std::size_t full() const { return 0; }               ///< rho entries (row-major D x D), paired
    std::size_t components() const { return dim * dim; } ///< <k|Phi_nu>, factorized, D of them
    std::size_t rho_s() const { return dim * dim + dim; } ///< rho_S entries (2 x 2), paired
    std::size_t count() const { return dim * dim + dim + 4; }
};

/// Ensemble from an initial density matrix on H_S (x) H_E, realized by sampling its
/// product-pair decomposition per trajectory.
EnsembleAccumulator simulate_dense(const DenseModel& model, const CMatrix& rho0, const std::vector<double>& grid,
                                   std::size_t n_traj, const EnsembleOptions& options = {});

/// Default initial state (|e> + |g>)/sqrt(2) (x) diag(0.6, 0.3, 0.1, 0, ...).
CMatrix dense_default_initial(std::size_t env_dim);

} // namespace pdpmc
