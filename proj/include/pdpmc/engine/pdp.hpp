#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdpmc/core/error.hpp"
#include "pdpmc/core/rng.hpp"
#include "pdpmc/core/state.hpp"
#include "pdpmc/engine/channel.hpp"
#include "pdpmc/engine/waiting_time.hpp"

namespace pdpmc {

/// One branch psi_nu (x) chi_nu of a trajectory.
///
/// The deterministic growth of chi is kept out of `chi` and stored as an
/// exponent: the physical environment state at time t is
///     exp(log_drift + int_{t_last_jump}^{t} Gamma_nu ds) * chi.
template <class Env>
struct BranchState {
    StateVector psi;
    Env chi;
    double t_last_jump = 0.0;
    double log_drift = 0.0;  ///< accumulated drift exponent at t_last_jump
    std::size_t jumps = 0;
    bool terminated = false;  ///< the tau = infinity branch was taken (or the state was annihilated)
};

struct JumpEvent {
    double t = 0.0;
    std::size_t channel = 0;
};

template <class Env>
struct BranchRecord {
    std::vector<JumpEvent> jumps;
    double final_log_drift = 0.0;  ///< int_0^{t_final} Gamma_nu ds
    BranchState<Env> terminal;
    bool terminated = false;
};

template <class Env>
struct TrajectoryRecord {
    std::array<BranchRecord<Env>, 2> branch;
    double t_final = 0.0;
};

// Model contract ------------------------------------------------------------

/// A model for the norm-conserving scheme: channel rates Gamma_{alpha nu}(t) for the
/// current branch state and the normalized jump maps.
template <class M>
concept PdpModel = requires(const M& m, const BranchState<typename M::Environment>& s,
                            BranchState<typename M::Environment>& ms, double t, std::size_t alpha,
                            std::span<double> out) {
    typename M::Environment;
    { m.channel_count() } -> std::convertible_to<std::size_t>;
    m.rates(s, t, out);
    m.apply_jump(alpha, ms, t);
};

/// Optional: closed-form int_{a}^{b} Gamma_nu ds between jumps.
template <class M>
concept HasCumulativeRate = PdpModel<M> && requires(const M& m, const BranchState<typename M::Environment>& s,
                                                    double a, double b) {
    { m.cumulative_rate(s, a, b) } -> std::convertible_to<double>;
};

/// Optional: closed-form waiting-time inversion.
template <class M>
concept HasWaitingTime = PdpModel<M> && requires(const M& m, const BranchState<typename M::Environment>& s,
                                                 double eta, double horizon) {
    { m.waiting_time(s, eta, horizon) } -> std::same_as<WaitingTime>;
};

/// Optional: int_{t}^{inf} Gamma_nu ds when it converges (defective waiting-time law).
template <class M>
concept HasCumulativeLimit = PdpModel<M> && requires(const M& m, const BranchState<typename M::Environment>& s,
                                                     double t) {
    { m.cumulative_limit(s, t) } -> std::convertible_to<std::optional<double>>;
};

/// Models usable with fixed rates: raw operator actions psi -> A psi, chi -> B(t) chi.
template <class M>
concept RawOperatorModel = PdpModel<M> && requires(const M& m, BranchState<typename M::Environment>& ms,
                                                   typename M::Environment& chi, std::size_t alpha, double t,
                                                   double c) {
    m.apply_operators(alpha, ms, t);
    m.scale_environment(chi, c);
};

/// Observer called at each output time: (grid index, branch state, drift exponent at that time).
template <class F, class Env>
concept BranchObserver = std::invocable<F&, std::size_t, const BranchState<Env>&, double>;

struct NoObserver {
    template <class... Args>
    void operator()(Args&&...) const {}
};

// Engine --------------------------------------------------------------------

namespace detail {

template <PdpModel M>
double total_rate(const M& model, const BranchState<typename M::Environment>& s, double t, std::span<double> buf) {
    model.rates(s, t, buf);
    double total = 0.0;
    for (double g : buf) {
        if (!(g >= 0.0)) throw NegativeRate("model returned a negative or NaN rate at t=" + std::to_string(t));
        total += g;
    }
    return total;
}

template <PdpModel M>
double integrated_rate(const M& model, const BranchState<typename M::Environment>& s, double a, double b,
                       std::span<double> buf, const WaitingTimeOptions& opts) {
    if (b <= a) return 0.0;
    if constexpr (HasCumulativeRate<M>) {
        return model.cumulative_rate(s, a, b);
    } else {
        return integrate_adaptive_simpson([&](double x) { return total_rate(model, s, x, buf); }, a, b,
                                          opts.rel_tol, opts.max_quadrature_depth);
    }
}

template <PdpModel M>
WaitingTime draw_waiting_time(const M& model, const BranchState<typename M::Environment>& s, double eta,
                              double horizon, std::span<double> buf, const WaitingTimeOptions& opts) {
    const double t0 = s.t_last_jump;
    if constexpr (HasWaitingTime<M>) {
        return model.waiting_time(s, eta, horizon);
    } else if constexpr (HasCumulativeRate<M>) {
        std::optional<double> limit;
        if constexpr (HasCumulativeLimit<M>) limit = model.cumulative_limit(s, t0);
        return sample_waiting_time([&](double x) { return total_rate(model, s, x, buf); },
                                   [&](double a, double b) { return model.cumulative_rate(s, a, b); }, t0, eta,
                                   horizon, limit, opts);
    } else {
        return sample_waiting_time([&](double x) { return total_rate(model, s, x, buf); }, t0, eta, horizon,
                                   opts);
    }
}

inline void check_grid(std::span<const double> grid, double t_start, double t_final) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (grid[g] < t_start || grid[g] > t_final)
            throw InvalidArgument("output grid must lie within [t_start, t_final]");
        if (g > 0 && grid[g] < grid[g - 1]) throw InvalidArgument("output grid must be sorted");
    }
}

} // namespace detail

/// Evolves one branch in place from state.t_last_jump to t_final with the
/// norm-conserving jumps. Output times in `grid` are reported to `observe`
/// before any jump that happens at a later time (the path is right-continuous).
template <PdpModel M, class Observer = NoObserver>
    requires BranchObserver<Observer, typename M::Environment>
double evolve_branch(const M& model, BranchState<typename M::Environment>& state, double t_final, RngStream& rng,
                     std::span<const double> grid = {}, Observer&& observe = {},
                     std::vector<JumpEvent>* jumps = nullptr, const WaitingTimeOptions& opts = {}) {
    if (!(t_final > state.t_last_jump)) throw InvalidArgument("evolve_branch: t_final must exceed the start time");
    detail::check_grid(grid, state.t_last_jump, t_final);
    std::vector<double> buf(model.channel_count());
    std::size_t next_output = 0;

    auto emit_until = [&](double t_limit, bool inclusive) {
        while (next_output < grid.size() && (grid[next_output] < t_limit || (inclusive && grid[next_output] <= t_limit))) {
            const double drift = state.log_drift +
                                 detail::integrated_rate(model, state, state.t_last_jump, grid[next_output], buf, opts);
            observe(next_output, std::as_const(state), drift);
            ++next_output;
        }
    };

    while (true) {
        const double eta = rng.uniform();
        const WaitingTime wt = detail::draw_waiting_time(model, state, eta, t_final, buf, opts);
        const double t_next = wt.is_jump() ? state.t_last_jump + wt.tau : t_final;
        if (!wt.is_jump() || t_next > t_final) {
            emit_until(t_final, true);
            if (wt.kind == WaitingTime::Kind::never) state.terminated = true;
            return state.log_drift + detail::integrated_rate(model, state, state.t_last_jump, t_final, buf, opts);
        }
        emit_until(t_next, false);
        // The waiting time solves int Gamma = -ln(eta) exactly.
        state.log_drift += -std::log(eta);
        const double eta2 = rng.uniform();
        model.rates(state, t_next, buf);
        const std::size_t alpha = select_channel(buf, eta2);
        model.apply_jump(alpha, state, t_next);
        state.t_last_jump = t_next;
        ++state.jumps;
        if (jumps) jumps->push_back({t_next, alpha});
    }
}

/// Fixed-rate variant: waiting times are always -ln(eta)/Gamma_nu with
/// Gamma_nu = sum_alpha rates[alpha]; jumps are psi -> -i A psi / sqrt(Gamma_alpha),
/// chi -> B chi / sqrt(Gamma_alpha). A branch whose psi is annihilated by a jump
/// stops jumping and contributes zero from then on.
template <RawOperatorModel M, class Observer = NoObserver>
    requires BranchObserver<Observer, typename M::Environment>
double evolve_branch_constant_rate(const M& model, BranchState<typename M::Environment>& state,
                                   std::span<const double> rates, double t_final, RngStream& rng,
                                   std::span<const double> grid = {}, Observer&& observe = {},
                                   std::vector<JumpEvent>* jumps = nullptr) {
    if (rates.size() != model.channel_count())
        throw InvalidArgument("evolve_branch_constant_rate: one rate per channel required");
    double total = 0.0;
    for (double g : rates) {
        if (!(g > 0.0)) throw InvalidArgument("evolve_branch_constant_rate: rates must be strictly positive");
        total += g;
    }
    if (!(t_final > state.t_last_jump))
        throw InvalidArgument("evolve_branch_constant_rate: t_final must exceed the start time");
    detail::check_grid(grid, state.t_last_jump, t_final);
    std::size_t next_output = 0;
    auto emit_until = [&](double t_limit, bool inclusive) {
        while (next_output < grid.size() && (grid[next_output] < t_limit || (inclusive && grid[next_output] <= t_limit))) {
            observe(next_output, std::as_const(state), state.log_drift + total * (grid[next_output] - state.t_last_jump));
            ++next_output;
        }
    };
    while (true) {
        const double eta = rng.uniform();
        const double t_next = state.t_last_jump + waiting_time_constant(total, eta).tau;
        if (state.terminated || t_next > t_final) {
            emit_until(t_final, true);
            return state.log_drift + total * (t_final - state.t_last_jump);
        }
        emit_until(t_next, false);
        state.log_drift += total * (t_next - state.t_last_jump);
        const std::size_t alpha = select_channel(rates, rng.uniform());
        model.apply_operators(alpha, state, t_next);
        const double scale = 1.0 / std::sqrt(rates[alpha]);
        state.psi *= -kI * scale;
        model.scale_environment(state.chi, scale);
        state.t_last_jump = t_next;
        ++state.jumps;
        if (jumps) jumps->push_back({t_next, alpha});
        if (state.psi.squared_norm() == 0.0) state.terminated = true;
    }
}

/// Initial branch state from a product pair at its start time.
template <class Env>
BranchState<Env> branch_from_pair(const ProductPairState<Env>& pair, int nu) {
    BranchState<Env> s;
    s.psi = pair.psi[static_cast<std::size_t>(nu)];
    s.chi = pair.chi[static_cast<std::size_t>(nu)];
    s.t_last_jump = pair.t;
    return s;
}

/// Evolves both branches of a pair independently; branch nu draws only from rng.branch(nu).
/// `observe(nu, grid_index, state, log_drift)` receives the output-time snapshots.
template <PdpModel M, class Observer = NoObserver>
TrajectoryRecord<typename M::Environment> evolve_trajectory(const ProductPairState<typename M::Environment>& initial,
                                                            const M& model, double t_final, const RngStream& rng,
                                                            std::span<const double> grid = {},
                                                            Observer&& observe = {},
                                                            const WaitingTimeOptions& opts = {}) {
    TrajectoryRecord<typename M::Environment> record;
    record.t_final = t_final;
    for (int nu = 0; nu < 2; ++nu) {
        auto& out = record.branch[static_cast<std::size_t>(nu)];
        BranchState<typename M::Environment> state = branch_from_pair(initial, nu);
        RngStream stream = rng.branch(nu);
        out.final_log_drift = evolve_branch(
            model, state, t_final, stream, grid,
            [&](std::size_t g, const BranchState<typename M::Environment>& s, double drift) { observe(nu, g, s, drift); },
            &out.jumps, opts);
        out.terminated = state.terminated;
        out.terminal = std::move(state);
    }
    return record;
}

/// Fixed-rate counterpart of evolve_trajectory; rates[nu][alpha] are Gamma_{alpha nu}.
template <RawOperatorModel M, class Observer = NoObserver>
TrajectoryRecord<typename M::Environment> evolve_trajectory_constant_rate(
    const ProductPairState<typename M::Environment>& initial, const M& model,
    const std::array<std::vector<double>, 2>& rates, double t_final, const RngStream& rng,
    std::span<const double> grid = {}, Observer&& observe = {}) {
    TrajectoryRecord<typename M::Environment> record;
    record.t_final = t_final;
    for (int nu = 0; nu < 2; ++nu) {
        auto& out = record.branch[static_cast<std::size_t>(nu)];
        BranchState<typename M::Environment> state = branch_from_pair(initial, nu);
        RngStream stream = rng.branch(nu);
        out.final_log_drift = evolve_branch_constant_rate(
            model, state, rates[static_cast<std::size_t>(nu)], t_final, stream, grid,
            [&](std::size_t g, const BranchState<typename M::Environment>& s, double drift) { observe(nu, g, s, drift); },
            &out.jumps);
        out.terminated = state.terminated;
        out.terminal = std::move(state);
    }
    return record;
}

} // namespace pdpmc
