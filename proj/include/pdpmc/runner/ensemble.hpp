#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pdpmc/core/error.hpp"
#include "pdpmc/core/rng.hpp"
#include "pdpmc/engine/pdp.hpp"
#include "pdpmc/estimators/accumulator.hpp"
#include "pdpmc/runner/parallel.hpp"

namespace pdpmc {

struct EnsembleOptions {
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::size_t chunk = kDefaultChunk;
    /// Fixed rates Gamma_{alpha nu} per branch; unset = natural (norm-conserving) rates.
    std::optional<std::array<std::vector<double>, 2>> constant_rates;
};

/// Snapshot of one branch at an output time.
template <class Env>
struct BranchSnapshot {
    BranchState<Env> state;
    double log_drift = 0.0;
};

/// Monte Carlo ensemble over product-pair trajectories.
///
/// Trajectory r uses RngStream(seed, r): substream 0 for `initial(rng)`, which
/// returns the starting ProductPairState, and one substream per branch. At each
/// grid point `record(acc, g, snap1, snap2)` adds the trajectory's contribution.
template <PdpModel M, class InitialFn, class RecordFn>
EnsembleAccumulator run_pair_ensemble(const M& model, InitialFn&& initial, const std::vector<double>& grid,
                                      std::size_t n_traj, std::size_t n_observables, RecordFn&& record,
                                      const EnsembleOptions& options = {}) {
    using Env = typename M::Environment;
    if (grid.size() < 1) throw InvalidArgument("run_pair_ensemble: empty output grid");
    if (n_traj == 0) throw InvalidArgument("run_pair_ensemble: n_traj must be at least 1");
    const double t_final = grid.back();

    auto make_acc = [&] { return EnsembleAccumulator(n_observables, grid.size()); };
    auto make_worker = [&] {
        return [&, snaps = std::array<std::vector<BranchSnapshot<Env>>, 2>{
                       std::vector<BranchSnapshot<Env>>(grid.size()),
                       std::vector<BranchSnapshot<Env>>(grid.size())}](EnsembleAccumulator& acc,
                                                                       std::size_t r) mutable {
            const RngStream rng(options.seed, r);
            RngStream init_rng = rng.substream(0);
            const ProductPairState<Env> start = initial(init_rng);
            for (int nu = 0; nu < 2; ++nu) {
                auto& out = snaps[static_cast<std::size_t>(nu)];
                BranchState<Env> state = branch_from_pair(start, nu);
                RngStream stream = rng.branch(nu);
                auto observe = [&](std::size_t g, const BranchState<Env>& s, double drift) {
                    out[g].state = s;
                    out[g].log_drift = drift;
                };
                if (!(t_final > state.t_last_jump)) {
                    for (std::size_t g = 0; g < grid.size(); ++g) observe(g, state, state.log_drift);
                    continue;
                }
                if (options.constant_rates) {
                    if constexpr (RawOperatorModel<M>) {
                        evolve_branch_constant_rate(model, state, (*options.constant_rates)[static_cast<std::size_t>(nu)],
                                                    t_final, stream, grid, observe);
                    } else {
                        throw InvalidArgument("run_pair_ensemble: model has no fixed-rate operator form");
                    }
                } else {
                    evolve_branch(model, state, t_final, stream, grid, observe);
                }
            }
            for (std::size_t g = 0; g < grid.size(); ++g) record(acc, g, snaps[0][g], snaps[1][g]);
        };
    };
    return run_ensemble(n_traj, options.workers, make_acc, make_worker, options.chunk);
}

} // namespace pdpmc
