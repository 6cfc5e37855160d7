#include "pdpmc/models/jaynes_cummings.hpp"

#include <cmath>
#include <string>

#include "pdpmc/core/error.hpp"
#include "pdpmc/estimators/correlation.hpp"

namespace pdpmc {

BathCorrelation::BathCorrelation(double gamma0, double lambda, double delta)
    : gamma0_(gamma0), lambda_(lambda), delta_(delta) {
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) throw InvalidArgument("BathCorrelation: gamma0 must be positive");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("BathCorrelation: lambda must be positive");
    if (!std::isfinite(delta)) throw InvalidArgument("BathCorrelation: delta must be finite");
    f0_ = 0.5 * gamma0 * lambda;
    sqrt_f0_ = std::sqrt(f0_);
    budget_ = std::sqrt(gamma0 / (2.0 * lambda));
}

Complex BathCorrelation::operator()(double t) const { return f0_ * std::polar(std::exp(-lambda_ * std::abs(t)), delta_ * t); }

double BathCorrelation::modulus(double t) const { return f0_ * std::exp(-lambda_ * std::abs(t)); }

double jc_rate(const BathCorrelation& f, const SymbolicReservoirState& chi, double t_now) {
    if (chi.sector == Sector::vacuum) return f.sqrt_f0();
    return f.modulus(t_now - chi.creation_time) / f.sqrt_f0();
}

namespace {

// int_{a}^{b} |f(s - tc)| ds / sqrt(f(0)) for a, b >= tc.
double odd_cumulative(const BathCorrelation& f, double tc, double a, double b) {
    const double l = f.lambda();
    return f.odd_jump_budget() * (std::exp(-l * (a - tc)) - std::exp(-l * (b - tc)));
}

WaitingTime odd_waiting_time(const BathCorrelation& f, double weight, double tc, double t0, double eta) {
    const double budget = weight * f.odd_jump_budget() * std::exp(-f.lambda() * (t0 - tc));
    const double target = -std::log(eta);
    if (!(budget > 0.0) || target >= budget) return WaitingTime::infinite();
    return WaitingTime::jump_after(-std::log1p(-target / budget) / f.lambda());
}

void require_eta(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("jc_waiting_time: eta must lie in (0,1)");
}

struct Weights {
    double excited = 0.0;  // |<e|psi>| / ||psi||
    double ground = 0.0;   // |<g|psi>| / ||psi||
};

Weights weights(const StateVector& psi) {
    if (psi.dim() != 2) throw InvalidArgument("JaynesCummingsModel: system state must be two-dimensional");
    const double n = psi.norm();
    if (n == 0.0) return {};
    return {std::abs(psi[kExcited]) / n, std::abs(psi[kGround]) / n};
}

void require_representable(const SymbolicReservoirState& chi, const Weights& w) {
    if (chi.sector == Sector::one_particle && w.excited > 0.0)
        throw InvalidArgument("JaynesCummingsModel: excited system state with a one-particle reservoir "
                              "leaves the single-excitation sector");
}

} // namespace

WaitingTime jc_waiting_time(const BathCorrelation& f, const SymbolicReservoirState& chi, double t_last_jump,
                            double eta) {
    require_eta(eta);
    if (chi.sector == Sector::vacuum) return waiting_time_constant(f.sqrt_f0(), eta);
    return odd_waiting_time(f, 1.0, chi.creation_time, t_last_jump, eta);
}

std::pair<StateVector, SymbolicReservoirState> jc_apply_jump(const BathCorrelation& f, const StateVector& psi,
                                                             const SymbolicReservoirState& chi, double t_jump) {
    if (psi.dim() != 2) throw InvalidArgument("jc_apply_jump: system state must be two-dimensional");
    const double n = psi.norm();
    StateVector out = StateVector::zero(2);
    SymbolicReservoirState next = chi;
    if (chi.sector == Sector::vacuum) {
        const Complex c = psi[kExcited];
        if (std::abs(c) == 0.0) throw InvalidArgument("jc_apply_jump: sigma_- annihilates the system state");
        out[kGround] = -kI * n * (c / std::abs(c));
        next.sector = Sector::one_particle;
        next.creation_time = t_jump;
    } else {
        const Complex c = psi[kGround];
        if (std::abs(c) == 0.0) throw InvalidArgument("jc_apply_jump: sigma_+ annihilates the system state");
        out[kExcited] = -kI * n * (c / std::abs(c));
        next.prefactor *= std::polar(1.0, f.delta() * (t_jump - chi.creation_time));
        next.sector = Sector::vacuum;
    }
    return {out, next};
}

Complex jc_overlap(const BathCorrelation& f, const SymbolicReservoirState& chi1, const SymbolicReservoirState& chi2) {
    if (chi1.sector != chi2.sector) return {};
    const Complex base = std::conj(chi2.prefactor) * chi1.prefactor;
    if (chi1.sector == Sector::vacuum) return base;
    return base * f(chi2.creation_time - chi1.creation_time) / f.f0();
}

void JaynesCummingsModel::rates(const BranchState<Environment>& s, double t, std::span<double> out) const {
    const Weights w = weights(s.psi);
    require_representable(s.chi, w);
    if (s.chi.sector == Sector::vacuum) {
        out[kRaise] = 0.0;
        out[kLower] = w.excited * f_.sqrt_f0();
    } else {
        out[kRaise] = w.ground * jc_rate(f_, s.chi, t);
        out[kLower] = 0.0;
    }
}

void JaynesCummingsModel::apply_jump(std::size_t alpha, BranchState<Environment>& s, double t) const {
    const bool vacuum = s.chi.sector == Sector::vacuum;
    if ((alpha == kLower) != vacuum)
        throw InvalidArgument("JaynesCummingsModel: channel " + std::to_string(alpha) + " has zero rate in this sector");
    auto [psi, chi] = jc_apply_jump(f_, s.psi, s.chi, t);
    s.psi = std::move(psi);
    s.chi = chi;
}

double JaynesCummingsModel::cumulative_rate(const BranchState<Environment>& s, double a, double b) const {
    const Weights w = weights(s.psi);
    if (s.chi.sector == Sector::vacuum) return w.excited * f_.sqrt_f0() * (b - a);
    return w.ground * odd_cumulative(f_, s.chi.creation_time, a, b);
}

std::optional<double> JaynesCummingsModel::cumulative_limit(const BranchState<Environment>& s, double t) const {
    const Weights w = weights(s.psi);
    if (s.chi.sector == Sector::vacuum) {
        if (w.excited > 0.0) return std::nullopt;
        return 0.0;
    }
    return w.ground * f_.odd_jump_budget() * std::exp(-f_.lambda() * (t - s.chi.creation_time));
}

WaitingTime JaynesCummingsModel::waiting_time(const BranchState<Environment>& s, double eta, double) const {
    require_eta(eta);
    const Weights w = weights(s.psi);
    require_representable(s.chi, w);
    if (s.chi.sector == Sector::vacuum) return waiting_time_constant(w.excited * f_.sqrt_f0(), eta);
    return odd_waiting_time(f_, w.ground, s.chi.creation_time, s.t_last_jump, eta);
}

void JaynesCummingsModel::apply_operators(std::size_t alpha, BranchState<Environment>& s, double t) const {
    if (s.psi.dim() != 2) throw InvalidArgument("JaynesCummingsModel: system state must be two-dimensional");
    const Complex ce = s.psi[kExcited];
    const Complex cg = s.psi[kGround];
    StateVector out = StateVector::zero(2);
    if (alpha == kRaise) {
        // sigma_+ (x) B(t): B annihilates the vacuum.
        if (s.chi.sector == Sector::one_particle && cg != 0.0) {
            out[kExcited] = cg;
            s.chi.prefactor *= f_(t - s.chi.creation_time) / f_.sqrt_f0();
            s.chi.sector = Sector::vacuum;
        }
    } else if (alpha == kLower) {
        if (ce != 0.0) {
            if (s.chi.sector == Sector::one_particle)
                throw InvalidArgument("JaynesCummingsModel: sigma_- B^dag on a one-particle reservoir leaves the "
                                      "single-excitation sector");
            out[kGround] = ce;
            s.chi.prefactor *= f_.sqrt_f0();
            s.chi.sector = Sector::one_particle;
            s.chi.creation_time = t;
        }
    } else {
        throw InvalidArgument("JaynesCummingsModel: channel index out of range");
    }
    s.psi = std::move(out);
}

ProductPairState<SymbolicReservoirState> jc_excited_vacuum() {
    ProductPairState<SymbolicReservoirState> p;
    p.psi = {StateVector::basis(2, kExcited), StateVector::basis(2, kExcited)};
    p.chi = {SymbolicReservoirState{}, SymbolicReservoirState{}};
    return p;
}

namespace {

// <e,0|Phi> with the drift factor.
Complex excited_vacuum_amplitude(const BranchSnapshot<SymbolicReservoirState>& s) {
    if (s.state.chi.sector != Sector::vacuum) return {};
    return s.state.psi[kExcited] * s.state.chi.prefactor * std::exp(s.log_drift);
}

} // namespace

EnsembleAccumulator simulate_jc(const BathCorrelation& f, const std::vector<double>& grid, std::size_t n_traj,
                                const EnsembleOptions& options) {
    const JaynesCummingsModel model(f);
    const auto start = jc_excited_vacuum();
    auto init = [&](RngStream&) { return start; };
    using Snap = BranchSnapshot<SymbolicReservoirState>;
    auto record = [&](EnsembleAccumulator& acc, std::size_t g, const Snap& s1, const Snap& s2) {
        const Complex overlap = environment_overlap(model, s1, s2);
        const StateVector& p1 = s1.state.psi;
        const StateVector& p2 = s2.state.psi;
        acc.add(JcObservable::p, g, excited_vacuum_amplitude(s1), excited_vacuum_amplitude(s2),
                p1[kExcited] * std::conj(p2[kExcited]) * overlap);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                acc.add_paired(JcObservable::rho + 2 * i + j, g, p1[i] * std::conj(p2[j]) * overlap);
        acc.add_norms(g, pair_norm_product(s1, s2));
    };
    return run_pair_ensemble(model, init, grid, n_traj, JcObservable::count, record, options);
}

EnsembleAccumulator simulate_jc_correlation(const BathCorrelation& f, const std::vector<double>& grid,
                                            std::size_t n_traj, const EnsembleOptions& options) {
    const JaynesCummingsModel model(f);
    using Snap = BranchSnapshot<SymbolicReservoirState>;
    CorrelationSpec<SymbolicReservoirState> spec;
    spec.y = CMatrix::Zero(2, 2);
    spec.y(kGround, kExcited) = 1.0;  // sigma_-
    // sigma_+ in the interaction picture carries e^{i omega_0 t}, which c(t) strips.
    spec.paired = [&model](const Snap& s1, const Snap& s2, double) {
        return s1.state.psi[kGround] * std::conj(s2.state.psi[kExcited]) * environment_overlap(model, s1, s2);
    };
    spec.factor_a = [](const Snap& s1, double) {
        if (s1.state.chi.sector != Sector::vacuum) return Complex{};
        return s1.state.psi[kGround] * s1.state.chi.prefactor * std::exp(s1.log_drift);
    };
    spec.factor_b = [](const Snap& s2, double) { return excited_vacuum_amplitude(s2); };
    return correlation_two_time(model, jc_excited_vacuum(), spec, grid, n_traj, options);
}

} // namespace pdpmc
