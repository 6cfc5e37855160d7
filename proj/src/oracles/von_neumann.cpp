#include "pdpmc/oracles/von_neumann.hpp"

#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "pdpmc/core/error.hpp"

namespace pdpmc {

namespace {

namespace odeint = boost::numeric::odeint;
using Buffer = std::vector<Complex>;

void check_grid(const std::vector<double>& grid, double t0) {
    if (grid.empty()) throw InvalidArgument("oracle integration: empty grid");
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (!std::isfinite(grid[g]) || grid[g] < t0 || (g > 0 && grid[g] < grid[g - 1]))
            throw InvalidArgument("oracle integration: grid must be sorted and start at or after t0");
    }
}

void check_hermitian(const CMatrix& h, Eigen::Index dim) {
    if (h.rows() != dim || h.cols() != dim)
        throw InvalidArgument("oracle integration: Hamiltonian has the wrong shape");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidArgument("oracle integration: Hamiltonian is not Hermitian");
}

// Integrates x' = rhs(t, x) and hands the state at every grid time to `store`.
template <class Rhs, class Store>
void integrate_on_grid(Rhs&& rhs, Buffer x, const std::vector<double>& grid, const VonNeumannOptions& o,
                       Store&& store) {
    std::vector<double> times;
    times.reserve(grid.size() + 1);
    const bool prepend = grid.front() > o.t0;
    if (prepend) times.push_back(o.t0);
    times.insert(times.end(), grid.begin(), grid.end());
    std::size_t index = 0;
    auto observer = [&](const Buffer& state, double) {
        if (!(prepend && index == 0)) store(prepend ? index - 1 : index, state);
        ++index;
    };
    if (times.size() == 1 || times.front() == times.back()) {
        for (std::size_t g = 0; g < grid.size(); ++g) store(g, x);
        return;
    }
    auto stepper = odeint::make_dense_output(o.abs_tol, o.rel_tol, odeint::runge_kutta_dopri5<Buffer>());
    try {
        odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), o.initial_step, observer,
                                odeint::max_step_checker(10'000'000));
    } catch (const odeint::odeint_error& e) {
        throw ConvergenceError(std::string("oracle integration: step size control failed: ") + e.what());
    }
    for (const Complex& z : x)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ConvergenceError("oracle integration: non-finite state");
}

} // namespace

std::vector<CMatrix> integrate_von_neumann(const HamiltonianFn& h, const CMatrix& rho0,
                                           const std::vector<double>& grid, const VonNeumannOptions& o) {
    const Eigen::Index d = rho0.rows();
    if (rho0.cols() != d || d == 0) throw InvalidArgument("integrate_von_neumann: rho0 must be square");
    if (static_cast<std::size_t>(d) > o.max_dim)
        throw InvalidArgument("integrate_von_neumann: dimension " + std::to_string(d) + " exceeds the limit " +
                              std::to_string(o.max_dim));
    check_grid(grid, o.t0);
    check_hermitian(h(o.t0), d);

    Buffer x(rho0.data(), rho0.data() + d * d);
    auto rhs = [&](const Buffer& in, Buffer& out, double t) {
        const CMatrix ht = h(t);
        Eigen::Map<const CMatrix> rho(in.data(), d, d);
        Eigen::Map<CMatrix> drho(out.data(), d, d);
        drho.noalias() = ht * rho;
        drho.noalias() -= rho * ht;
        drho *= -kI;
    };
    std::vector<CMatrix> result(grid.size());
    integrate_on_grid(rhs, std::move(x), grid, o, [&](std::size_t g, const Buffer& state) {
        result[g] = Eigen::Map<const CMatrix>(state.data(), d, d);
    });
    return result;
}

std::vector<CVector> integrate_schrodinger(const HamiltonianFn& h, const CVector& psi0,
                                           const std::vector<double>& grid, const VonNeumannOptions& o) {
    const Eigen::Index d = psi0.size();
    if (d == 0) throw InvalidArgument("integrate_schrodinger: empty state");
    if (static_cast<std::size_t>(d) > o.max_dim)
        throw InvalidArgument("integrate_schrodinger: dimension " + std::to_string(d) + " exceeds the limit " +
                              std::to_string(o.max_dim));
    check_grid(grid, o.t0);
    check_hermitian(h(o.t0), d);
    Buffer x(psi0.data(), psi0.data() + d);
    auto rhs = [&](const Buffer& in, Buffer& out, double t) {
        Eigen::Map<const CVector> psi(in.data(), d);
        Eigen::Map<CVector> dpsi(out.data(), d);
        dpsi.noalias() = h(t) * psi;
        dpsi *= -kI;
    };
    std::vector<CVector> result(grid.size());
    integrate_on_grid(rhs, std::move(x), grid, o, [&](std::size_t g, const Buffer& state) {
        result[g] = Eigen::Map<const CVector>(state.data(), d);
    });
    return result;
}

CMatrix partial_trace_environment(const CMatrix& rho, std::size_t dim_s, std::size_t dim_e) {
    const auto ds = static_cast<Eigen::Index>(dim_s);
    const auto de = static_cast<Eigen::Index>(dim_e);
    if (rho.rows() != ds * de || rho.cols() != ds * de)
        throw InvalidArgument("partial_trace_environment: dimension mismatch");
    CMatrix out(ds, ds);
    for (Eigen::Index i = 0; i < ds; ++i)
        for (Eigen::Index j = 0; j < ds; ++j) out(i, j) = rho.block(i * de, j * de, de, de).trace();
    return out;
}

} // namespace pdpmc
