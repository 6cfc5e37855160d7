#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "pdpmc/core/state.hpp"

namespace pdpmc {

/// H(t) as a dense Hermitian matrix.
using HamiltonianFn = std::function<CMatrix(double)>;

struct VonNeumannOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    std::size_t max_dim = 512;
    double t0 = 0.0;            ///< time of the initial state
    double initial_step = 1e-3;
};

/// Integrates d rho/dt = -i [H(t), rho] with an adaptive Dormand-Prince 5(4)
/// stepper and returns rho at every grid time (grid sorted, >= t0).
/// Throws InvalidArgument for a dimension over max_dim, a non-Hermitian H or a
/// bad grid, and ConvergenceError when the step size collapses.
std::vector<CMatrix> integrate_von_neumann(const HamiltonianFn& h, const CMatrix& rho0,
                                           const std::vector<double>& grid, const VonNeumannOptions& options = {});

/// Same integrator for a pure state, d psi/dt = -i H(t) psi.
std::vector<CVector> integrate_schrodinger(const HamiltonianFn& h, const CVector& psi0,
                                           const std::vector<double>& grid, const VonNeumannOptions& options = {});

/// tr_E rho for rho on H_S (x) H_E (index i * dim_e + n).
CMatrix partial_trace_environment(const CMatrix& rho, std::size_t dim_s, std::size_t dim_e);

} // namespace pdpmc
