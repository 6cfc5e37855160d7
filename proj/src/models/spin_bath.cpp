#include "pdpmc/models/spin_bath.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/binomial.hpp>

#include "pdpmc/core/error.hpp"
#include "pdpmc/estimators/correlation.hpp"

namespace pdpmc {

void SpinBathParams::validate() const {
    if (n_spins == 0) throw InvalidArgument("spin bath: N must be at least 1");
    if (!(coupling >= 0.0) || !std::isfinite(coupling)) throw InvalidArgument("spin bath: A must be a finite number >= 0");
    if (!std::isfinite(omega0)) throw InvalidArgument("spin bath: omega0 must be finite");
}

double SpinBathParams::scaled_coupling() const { return 2.0 * coupling / std::sqrt(static_cast<double>(n_spins)); }

double log_binomial(std::size_t n, std::size_t k) {
    if (k > n) return -std::numeric_limits<double>::infinity();
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    return std::lgamma(dn + 1.0) - std::lgamma(dk + 1.0) - std::lgamma(dn - dk + 1.0);
}

namespace {

void require_two_j(std::size_t n, int two_j) {
    if (two_j < 0 || static_cast<std::size_t>(two_j) > n || (static_cast<std::size_t>(two_j) % 2) != (n % 2))
        throw InvalidArgument("spin bath: j = " + std::to_string(0.5 * two_j) + " is not allowed for N = " +
                              std::to_string(n));
}

// log of (2j+1) a_j^N 2^-N, the marginal probability of j.
double log_j_probability(std::size_t n, int two_j) {
    // a_j = C(N, N/2 + j) (2j + 1) / (N/2 + j + 1)
    const std::size_t k = (n + static_cast<std::size_t>(two_j)) / 2;
    const double dj1 = two_j + 1.0;
    return 2.0 * std::log(dj1) - std::log(static_cast<double>(k) + 1.0) + log_binomial(n, k) -
           static_cast<double>(n) * std::numbers::ln2;
}

} // namespace

double multiplicity(std::size_t n, int two_j) {
    require_two_j(n, two_j);
    const auto k = static_cast<unsigned>((n + static_cast<std::size_t>(two_j)) / 2);
    const auto un = static_cast<unsigned>(n);
    if (n <= 1000) {
        const double c0 = boost::math::binomial_coefficient<double>(un, k);
        const double c1 = k + 1 <= un ? boost::math::binomial_coefficient<double>(un, k + 1) : 0.0;
        return c0 - c1;
    }
    return std::exp(log_j_probability(n, two_j) + static_cast<double>(n) * std::numbers::ln2 - std::log(two_j + 1.0));
}

double jm_probability(std::size_t n, SpinBathLabel label) {
    require_two_j(n, label.two_j);
    if (std::abs(label.two_m) > label.two_j || (label.two_j - label.two_m) % 2 != 0)
        throw InvalidArgument("spin bath: m out of range for the given j");
    return std::exp(log_j_probability(n, label.two_j) - std::log(label.two_j + 1.0));
}

double marginal_pm(std::size_t n, int two_m) {
    if (n == 0) throw InvalidArgument("marginal_pm: N must be at least 1");
    if (static_cast<std::size_t>(std::abs(two_m)) > n || (static_cast<std::size_t>(std::abs(two_m)) % 2) != (n % 2))
        throw InvalidArgument("marginal_pm: m = " + std::to_string(0.5 * two_m) + " out of range for N = " +
                              std::to_string(n));
    const std::size_t k = static_cast<std::size_t>((static_cast<long long>(n) + two_m) / 2);
    return std::exp(log_binomial(n, k) - static_cast<double>(n) * std::numbers::ln2);
}

JmSampler::JmSampler(std::size_t n) : n_(n) {
    if (n == 0) throw InvalidArgument("JmSampler: N must be at least 1");
    NeumaierSum total;
    for (int two_j = min_two_j(); static_cast<std::size_t>(two_j) <= n; two_j += 2) {
        const double p = std::exp(log_j_probability(n, two_j));
        prob_.push_back(p);
        total.add(p);
        cdf_.push_back(total.value());
    }
    const double norm = total.value();
    if (std::abs(norm - 1.0) > 1e-10)
        throw ConvergenceError("JmSampler: probabilities sum to " + std::to_string(norm) + " instead of 1");
    for (double& c : cdf_) c /= norm;
    for (double& p : prob_) p /= norm;
    cdf_.back() = 1.0;
}

double JmSampler::j_probability(int two_j) const {
    require_two_j(n_, two_j);
    return prob_[static_cast<std::size_t>((two_j - min_two_j()) / 2)];
}

SpinBathLabel JmSampler::sample(double u_j, double u_m) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u_j);
    const auto idx = static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(), std::ssize(cdf_) - 1));
    SpinBathLabel label;
    label.two_j = min_two_j() + 2 * idx;
    const int count = label.two_j + 1;
    const int k = std::min(count - 1, static_cast<int>(u_m * count));
    label.two_m = -label.two_j + 2 * k;
    return label;
}

SpinBathLabel JmSampler::sample(RngStream& rng) const {
    const double u_j = rng.uniform();
    const double u_m = rng.uniform();
    return sample(u_j, u_m);
}

SpinBathLabel sample_jm(std::size_t n, RngStream& rng) { return JmSampler(n).sample(rng); }

namespace {

// 4 [j(j+1) - m(m + sign)] in exact integers.
long long rate_radicand(SpinBathLabel l, int sign) {
    return static_cast<long long>(l.two_j) * (l.two_j + 2) - static_cast<long long>(l.two_m) * (l.two_m + 2 * sign);
}

double branch_rate(const SpinBathParams& p, SpinBathLabel l, int sign) {
    const long long r = rate_radicand(l, sign);
    if (r <= 0) return 0.0;
    // 2A sqrt(r / (4N)) = (2A / sqrt(N)) sqrt(r) / 2
    return 0.5 * p.scaled_coupling() * std::sqrt(static_cast<double>(r));
}

} // namespace

SpinRates spin_rates(const SpinBathParams& p, SpinBathLabel label) {
    p.validate();
    return {branch_rate(p, label, +1), branch_rate(p, label, -1)};
}

SpinRates spin_frequencies(const SpinBathParams& p, SpinBathLabel label) {
    p.validate();
    const double c = p.scaled_coupling();
    return {p.omega0 + c * (1.0 + label.two_m), p.omega0 + c * (-1.0 + label.two_m)};
}

double spin_rate_bound(const SpinBathParams& p) {
    p.validate();
    const double n = static_cast<double>(p.n_spins);
    return p.coupling * (n + 1.0) / std::sqrt(n);
}

// Fast summary path -----------------------------------------------------------

namespace {

// Weight factor of one branch at the output times:
// (-1)^{k/2} e^{Gamma t} e^{i omega (tau_2 + tau_4 + ...)}, zero for odd k.
// Random draws mirror evolve_branch: one eta per waiting time, one more per jump.
void branch_factors(double rate, double omega, std::span<const double> grid, RngStream rng,
                    std::span<Complex> out) {
    const double t_final = grid.back();
    double t_last = 0.0;
    double t_odd = 0.0;
    double even_sum = 0.0;
    std::size_t k = 0;
    std::size_t g = 0;
    auto emit = [&](std::size_t index) {
        const double t = grid[index];
        if (k % 2 == 1) {
            out[index] = 0.0;
            return;
        }
        const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
        out[index] = sign * std::exp(rate * t) * std::polar(1.0, omega * even_sum);
    };
    while (true) {
        const double eta = rng.uniform();
        const double t_next = rate > 0.0 ? t_last - std::log(eta) / rate : std::numeric_limits<double>::infinity();
        if (t_next > t_final) {
            for (; g < grid.size(); ++g) emit(g);
            return;
        }
        for (; g < grid.size() && grid[g] < t_next; ++g) emit(g);
        (void)rng.uniform();  // channel choice; only one channel is open
        ++k;
        if (k % 2 == 0)
            even_sum += t_next - t_odd;
        else
            t_odd = t_next;
        t_last = t_next;
    }
}

void require_grid(const std::vector<double>& grid, std::size_t n_traj) {
    if (grid.empty()) throw InvalidArgument("spin coherence: empty output grid");
    if (n_traj == 0) throw InvalidArgument("spin coherence: n_traj must be at least 1");
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (!(grid[g] >= 0.0) || (g > 0 && grid[g] < grid[g - 1]))
            throw InvalidArgument("spin coherence: grid must be sorted and nonnegative");
    }
}

} // namespace

EnsembleAccumulator simulate_spin_coherence(const SpinBathParams& params, const std::vector<double>& grid,
                                            std::size_t n_traj, const EnsembleOptions& options,
                                            const SpinSimulationOptions& sim) {
    params.validate();
    require_grid(grid, n_traj);
    const JmSampler sampler(params.n_spins);
    const double c = params.scaled_coupling();
    auto make_acc = [&] { return EnsembleAccumulator(SpinObservable::count, grid.size()); };
    auto make_worker = [&] {
        return [&, fp = std::vector<Complex>(grid.size()), fm = std::vector<Complex>(grid.size())](
                   EnsembleAccumulator& acc, std::size_t r) mutable {
            const RngStream rng(options.seed, r);
            RngStream init = rng.substream(0);
            const SpinBathLabel label = sampler.sample(init);
            SpinRates rates = spin_rates(params, label);
            if (!sim.flip_flop) rates = {};
            const SpinRates omega = spin_frequencies(params, label);
            branch_factors(rates.plus, omega.plus, grid, rng.branch(0), fp);
            branch_factors(rates.minus, -omega.minus, grid, rng.branch(1), fm);
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const Complex half_phase = std::polar(1.0, -0.5 * c * label.two_m * grid[g]);  // e^{-2iAmt/sqrt N}
                const Complex a = half_phase * fp[g];
                const Complex b = std::conj(half_phase) * fm[g];
                acc.add(SpinObservable::coherence, g, a, b, std::conj(b) * a);
                acc.add_norms(g, std::exp(2.0 * (rates.plus + rates.minus) * grid[g]));
            }
        };
    };
    return run_ensemble(n_traj, options.workers, make_acc, make_worker, options.chunk);
}

// Generic engine path -----------------------------------------------------------

SpinBathBranchModel::SpinBathBranchModel(SpinBathParams params) : params_(params) {
    params_.validate();
    scale_ = params_.scaled_coupling();
}

double SpinBathBranchModel::total_rate(const BranchState<Environment>& s) const {
    std::array<double, 2> r{};
    rates(s, 0.0, r);
    return r[0] + r[1];
}

void SpinBathBranchModel::rates(const BranchState<Environment>& s, double, std::span<double> out) const {
    if (s.psi.dim() != 2) throw InvalidArgument("SpinBathBranchModel: system state must be two-dimensional");
    const double n = s.psi.norm();
    const SpinBathLabel l{s.chi.two_j, s.chi.two_m};
    const double up = n > 0.0 ? std::abs(s.psi[kExcited]) / n : 0.0;
    const double down = n > 0.0 ? std::abs(s.psi[kGround]) / n : 0.0;
    const auto amplitude = [&](int sign) {
        const long long r = rate_radicand(l, sign);
        return r > 0 ? 0.5 * scale_ * std::sqrt(static_cast<double>(r)) : 0.0;
    };
    out[kRaise] = down * amplitude(-1);
    out[kLower] = up * amplitude(+1);
}

void SpinBathBranchModel::apply_jump(std::size_t alpha, BranchState<Environment>& s, double t) const {
    const double n = s.psi.norm();
    StateVector out = StateVector::zero(2);
    if (alpha == kRaise) {
        const Complex c = s.psi[kGround];
        if (c == 0.0) throw InvalidArgument("SpinBathBranchModel: sigma_+ annihilates the system state");
        out[kExcited] = -kI * n * (c / std::abs(c));
        s.chi.prefactor *= std::polar(1.0, s.chi.omega * t);
        s.chi.two_m -= 2;
    } else if (alpha == kLower) {
        const Complex c = s.psi[kExcited];
        if (c == 0.0) throw InvalidArgument("SpinBathBranchModel: sigma_- annihilates the system state");
        out[kGround] = -kI * n * (c / std::abs(c));
        s.chi.prefactor *= std::polar(1.0, -s.chi.omega * t);
        s.chi.two_m += 2;
    } else {
        throw InvalidArgument("SpinBathBranchModel: channel index out of range");
    }
    if (std::abs(s.chi.two_m) > s.chi.two_j) throw InvalidArgument("SpinBathBranchModel: m left the j multiplet");
    s.psi = std::move(out);
}

double SpinBathBranchModel::cumulative_rate(const BranchState<Environment>& s, double a, double b) const {
    return total_rate(s) * (b - a);
}

WaitingTime SpinBathBranchModel::waiting_time(const BranchState<Environment>& s, double eta, double) const {
    return waiting_time_constant(total_rate(s), eta);
}

Complex SpinBathBranchModel::overlap(const Environment& chi2, const Environment& chi1) const {
    if (chi1.two_j != chi2.two_j || chi1.two_m != chi2.two_m) return {};
    return std::conj(chi2.prefactor) * chi1.prefactor;
}

EnsembleAccumulator simulate_spin_coherence_engine(const SpinBathParams& params, const std::vector<double>& grid,
                                                   std::size_t n_traj, const EnsembleOptions& options) {
    params.validate();
    require_grid(grid, n_traj);
    const SpinBathBranchModel model(params);
    const JmSampler sampler(params.n_spins);
    const double c = params.scaled_coupling();
    auto init = [&](RngStream& rng) {
        const SpinBathLabel label = sampler.sample(rng);
        const SpinRates omega = spin_frequencies(params, label);
        ProductPairState<SpinBathState> p;
        p.psi = {StateVector::basis(2, kExcited), StateVector::basis(2, kGround)};
        p.chi[0] = SpinBathState{label.two_j, label.two_m, label.two_m, 1.0, omega.plus};
        p.chi[1] = SpinBathState{label.two_j, label.two_m, label.two_m, 1.0, omega.minus};
        return p;
    };
    using Snap = BranchSnapshot<SpinBathState>;
    auto record = [&](EnsembleAccumulator& acc, std::size_t g, const Snap& s1, const Snap& s2) {
        const Complex phase = std::polar(1.0, -c * s1.state.chi.two_m0 * grid[g]);  // e^{-4iAmt/sqrt N}
        const Complex value =
            phase * s1.state.psi[kExcited] * std::conj(s2.state.psi[kGround]) * environment_overlap(model, s1, s2);
        acc.add_paired(SpinObservable::coherence, g, value);
        acc.add_norms(g, pair_norm_product(s1, s2));
    };
    return run_pair_ensemble(model, init, grid, n_traj, SpinObservable::count, record, options);
}

// Closed forms -------------------------------------------------------------------

Complex tcl2_coherence(const SpinBathParams& params, double t) {
    params.validate();
    if (!(params.omega0 > 0.0)) throw InvalidArgument("tcl2_coherence: omega0 must be positive");
    if (!(t >= 0.0)) throw InvalidArgument("tcl2_coherence: t must be nonnegative");
    const double a2 = params.coupling * params.coupling;
    const double x = params.omega0 * t;
    double one_minus_sinc;  // 1 - sin(x)/x
    double versine_ratio;   // (1 - cos x) / x^2
    if (std::abs(x) < 0.1) {
        const double x2 = x * x;
        one_minus_sinc = x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
        versine_ratio = 0.5 * (1.0 - x2 / 12.0 * (1.0 - x2 / 30.0 * (1.0 - x2 / 56.0)));
    } else {
        one_minus_sinc = 1.0 - std::sin(x) / x;
        versine_ratio = (1.0 - std::cos(x)) / (x * x);
    }
    const Complex gamma(2.0 * a2 * t * t * (1.0 + 2.0 * versine_ratio), 4.0 * a2 * t / params.omega0 * one_minus_sinc);
    return std::exp(-gamma);
}

double error_growth_estimate(const SpinBathParams& params, double t, std::size_t n_traj) {
    params.validate();
    if (n_traj == 0) throw InvalidArgument("error_growth_estimate: n_traj must be at least 1");
    return std::exp(4.0 * params.coupling * t) / std::sqrt(static_cast<double>(n_traj));
}

} // namespace pdpmc
