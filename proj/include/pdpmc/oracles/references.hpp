#pragma once

#include <cstddef>
#include <vector>

#include "pdpmc/core/state.hpp"
#include "pdpmc/models/jaynes_cummings.hpp"
#include "pdpmc/models/spin_bath.hpp"
#include "pdpmc/oracles/von_neumann.hpp"

namespace pdpmc {

// Damped Jaynes-Cummings ------------------------------------------------------

/// Excited-state amplitude c1(t) from the pseudo-mode system
///     c1' = -i b,  b' = -(lambda - i delta) b - i f(0) c1,  c1(0) = 1, b(0) = 0.
/// p(t) = |c1|^2 and c(t) = conj(c1).
std::vector<Complex> jc_reference_amplitude(const BathCorrelation& f, const std::vector<double>& grid,
                                            double rel_tol = 1e-12);

std::vector<double> jc_reference_population(const BathCorrelation& f, const std::vector<double>& grid);
std::vector<Complex> jc_reference_correlation(const BathCorrelation& f, const std::vector<double>& grid);

/// The same amplitude from a single-excitation Schroedinger integration with the
/// Lorentzian spectral density discretized into `modes` equally spaced modes over
/// +-span*lambda around its center, widened to include the atomic resonance
/// (rotating frame, so H is time independent).
std::vector<Complex> jc_modes_amplitude(const BathCorrelation& f, const std::vector<double>& grid,
                                        std::size_t modes = 200, double span = 20.0);

// Central spin -----------------------------------------------------------------

/// Dense Schroedinger-picture Hamiltonian (omega0/2) sigma_3 + sum_j A/sqrt(N) sigma.sigma^(j)
/// on C^2 (x) (C^2)^N, central spin first, index 0 = spin up. Real symmetric.
Eigen::MatrixXd spin_bath_hamiltonian(const SpinBathParams& params);

/// Interaction-picture H_I(t) = sigma_3 B_3 + sigma_+ B_-(t) + sigma_- B_+(t) as a dense matrix.
CMatrix spin_bath_interaction_hamiltonian(const SpinBathParams& params, double t);

/// Interaction-picture rho_{+-}(t) from |+><-| (x) 2^-N I by full diagonalization of H.
std::vector<Complex> spin_coherence_dense(const SpinBathParams& params, const std::vector<double>& grid);

/// Same quantity by integrating the interaction-picture von Neumann equation.
std::vector<Complex> spin_coherence_von_neumann(const SpinBathParams& params, const std::vector<double>& grid,
                                                const VonNeumannOptions& options = {});

/// Same quantity resolved into the invariant two-level blocks {|+, m>, |-, m+1>}
/// of each (j, m); exact for any N.
std::vector<Complex> spin_coherence_exact(const SpinBathParams& params, const std::vector<double>& grid);

struct SpinClosedForms {
    double cos_n = 1.0;  ///< [cos(2At / sqrt N)]^N, the coherence without flip-flop terms
    double gauss = 1.0;  ///< exp(-2 A^2 t^2)
    Complex tcl2{1.0, 0.0};
};

/// Requires omega0 > 0 for the TCL2 entry.
SpinClosedForms spin_closed_forms(const SpinBathParams& params, double t);

} // namespace pdpmc
