#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "pdpmc/core/error.hpp"
#include "pdpmc/core/state.hpp"
#include "pdpmc/engine/pdp.hpp"
#include "pdpmc/estimators/accumulator.hpp"
#include "pdpmc/runner/ensemble.hpp"

namespace pdpmc {

/// Models that can form <chi_2|chi_1> between two environment states.
template <class M>
concept HasOverlap = PdpModel<M> && requires(const M& m, const typename M::Environment& e) {
    { m.overlap(e, e) } -> std::convertible_to<Complex>;
};

/// <chi_2(t)|chi_1(t)> including both drift factors.
template <HasOverlap M>
Complex environment_overlap(const M& model, const BranchSnapshot<typename M::Environment>& s1,
                            const BranchSnapshot<typename M::Environment>& s2) {
    return model.overlap(s2.state.chi, s1.state.chi) * std::exp(s1.log_drift + s2.log_drift);
}

/// ||Phi_1||^2 ||Phi_2||^2 for models whose environment reports its norm.
template <class Env>
double pair_norm_product(const BranchSnapshot<Env>& s1, const BranchSnapshot<Env>& s2) {
    const double n1 = s1.state.psi.squared_norm() * s1.state.chi.norm() * s1.state.chi.norm();
    const double n2 = s2.state.psi.squared_norm() * s2.state.chi.norm() * s2.state.chi.norm();
    return n1 * n2 * std::exp(2.0 * (s1.log_drift + s2.log_drift));
}

/// Two-time correlation <X(t) Y(0)> = E(<Phi_2(t)|X(t)|Phi_1^Y(t)>) where branch 1
/// starts from Y Phi_1(0).
///
/// `paired(s1, s2, t)` returns <Phi_2|X(t)|Phi_1> for one trajectory. When
/// `factor_a` and `factor_b` are given, the estimand also factorizes as
/// conj(factor_b(s2, t)) * factor_a(s1, t), which enables the product estimator.
template <class Env>
struct CorrelationSpec {
    CMatrix y;
    std::function<Complex(const BranchSnapshot<Env>&, const BranchSnapshot<Env>&, double)> paired;
    std::function<Complex(const BranchSnapshot<Env>&, double)> factor_a;
    std::function<Complex(const BranchSnapshot<Env>&, double)> factor_b;
};

/// Observable 0 of the result holds the correlation curve.
template <PdpModel M>
EnsembleAccumulator correlation_two_time(const M& model, const ProductPairState<typename M::Environment>& initial,
                                         const CorrelationSpec<typename M::Environment>& spec,
                                         const std::vector<double>& grid, std::size_t n_traj,
                                         const EnsembleOptions& options = {}) {
    using Env = typename M::Environment;
    if (!spec.paired) throw InvalidArgument("correlation_two_time: no action of X supplied");
    if (static_cast<bool>(spec.factor_a) != static_cast<bool>(spec.factor_b))
        throw InvalidArgument("correlation_two_time: factors must be given for both branches or neither");
    ProductPairState<Env> start = initial;
    start.psi[0] = initial.psi[0].applied(spec.y);
    if (start.psi[0].squared_norm() == 0.0)
        throw InvalidArgument("correlation_two_time: Y annihilates the initial state");
    auto init = [&](RngStream&) { return start; };
    auto record = [&](EnsembleAccumulator& acc, std::size_t g, const BranchSnapshot<Env>& s1,
                      const BranchSnapshot<Env>& s2) {
        const double t = grid[g];
        const Complex paired = spec.paired(s1, s2, t);
        if (spec.factor_a)
            acc.add(0, g, spec.factor_a(s1, t), spec.factor_b(s2, t), paired);
        else
            acc.add_paired(0, g, paired);
        if constexpr (requires(const Env& e) { e.norm(); }) acc.add_norms(g, pair_norm_product(s1, s2));
    };
    return run_pair_ensemble(model, init, grid, n_traj, 1, record, options);
}

} // namespace pdpmc
