#include "pdpmc/oracles/references.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "pdpmc/core/error.hpp"
#include "pdpmc/estimators/accumulator.hpp"

namespace pdpmc {

namespace {

namespace odeint = boost::numeric::odeint;

void check_times(const std::vector<double>& grid) {
    for (std::size_t g = 0; g < grid.size(); ++g)
        if (!(grid[g] >= 0.0) || (g > 0 && grid[g] < grid[g - 1]))
            throw InvalidArgument("oracle: grid must be sorted and nonnegative");
}

} // namespace

std::vector<Complex> jc_reference_amplitude(const BathCorrelation& f, const std::vector<double>& grid,
                                            double rel_tol) {
    check_times(grid);
    std::vector<Complex> out(grid.size(), Complex(1.0));
    if (grid.empty() || grid.back() == 0.0) return out;
    using State = std::array<Complex, 2>;
    const Complex decay(f.lambda(), -f.delta());
    const double f0 = f.f0();
    auto rhs = [&](const State& y, State& dy, double) {
        dy[0] = -kI * y[1];
        dy[1] = -decay * y[1] - kI * f0 * y[0];
    };
    State y{Complex(1.0), Complex(0.0)};
    const std::size_t shift = grid.front() > 0.0 ? 1 : 0;
    std::vector<double> times(shift, 0.0);
    times.insert(times.end(), grid.begin(), grid.end());
    std::size_t index = 0;
    auto observer = [&](const State& s, double) {
        if (index >= shift) out[index - shift] = s[0];
        ++index;
    };
    auto stepper = odeint::make_dense_output(1e-14, rel_tol, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-3, observer);
    return out;
}

std::vector<double> jc_reference_population(const BathCorrelation& f, const std::vector<double>& grid) {
    const auto c = jc_reference_amplitude(f, grid);
    std::vector<double> p(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) p[i] = std::norm(c[i]);
    return p;
}

std::vector<Complex> jc_reference_correlation(const BathCorrelation& f, const std::vector<double>& grid) {
    auto c = jc_reference_amplitude(f, grid);
    for (auto& z : c) z = std::conj(z);
    return c;
}

std::vector<Complex> jc_modes_amplitude(const BathCorrelation& f, const std::vector<double>& grid,
                                        std::size_t modes, double span) {
    if (modes < 2 || !(span > 0.0)) throw InvalidArgument("jc_modes_amplitude: need at least two modes and span > 0");
    check_times(grid);
    const auto m = static_cast<Eigen::Index>(modes);
    const double lambda = f.lambda();
    // the band covers the Lorentzian and the atomic resonance at x = delta
    const double lo = std::min(-span * lambda, f.delta() - span * lambda);
    const double hi = std::max(span * lambda, f.delta() + span * lambda);
    const double dx = (hi - lo) / static_cast<double>(modes - 1);
    CMatrix h = CMatrix::Zero(m + 1, m + 1);
    for (Eigen::Index k = 0; k < m; ++k) {
        // offset of the mode from the Lorentzian center; the center sits at omega0 - delta
        const double x = lo + dx * static_cast<double>(k);
        const double weight = f.f0() * lambda / std::numbers::pi / (x * x + lambda * lambda) * dx;
        h(k + 1, k + 1) = x - f.delta();
        h(0, k + 1) = std::sqrt(weight);
        h(k + 1, 0) = std::sqrt(weight);
    }
    CVector psi0 = CVector::Zero(m + 1);
    psi0[0] = 1.0;
    VonNeumannOptions opts;
    opts.rel_tol = 1e-11;
    opts.abs_tol = 1e-13;
    const auto states = integrate_schrodinger([&h](double) { return h; }, psi0, grid, opts);
    std::vector<Complex> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) out[g] = states[g][0];
    return out;
}

// Central spin ------------------------------------------------------------------

namespace {

constexpr std::size_t kMaxDenseSpins = 8;

Eigen::Index bath_dim(const SpinBathParams& p) {
    p.validate();
    if (p.n_spins > kMaxDenseSpins)
        throw InvalidArgument("spin oracle: dense construction limited to N <= " + std::to_string(kMaxDenseSpins));
    return Eigen::Index{1} << p.n_spins;
}

// Calls visit(row, col, value) for the flip-flop couplings sigma_+ sigma_-^(j) (central spin raised).
template <class Visit>
void for_each_flip_flop(std::size_t n, Eigen::Index nb, Visit&& visit) {
    for (Eigen::Index b = 0; b < nb; ++b) {
        for (std::size_t j = 0; j < n; ++j) {
            const Eigen::Index bit = Eigen::Index{1} << j;
            if (b & bit) continue;  // bath spin j must be up (bit 0) to be lowered
            // |down, b> -> |up, b | bit>
            visit(b | bit, nb + b);
        }
    }
}

int bath_sz_sum(Eigen::Index b, std::size_t n) {
    int s = 0;
    for (std::size_t j = 0; j < n; ++j) s += (b >> j) & 1 ? -1 : 1;
    return s;
}

} // namespace

Eigen::MatrixXd spin_bath_hamiltonian(const SpinBathParams& p) {
    const Eigen::Index nb = bath_dim(p);
    const double a = p.coupling / std::sqrt(static_cast<double>(p.n_spins));
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * nb, 2 * nb);
    for (Eigen::Index b = 0; b < nb; ++b) {
        const double sz = bath_sz_sum(b, p.n_spins);
        h(b, b) = 0.5 * p.omega0 + a * sz;
        h(nb + b, nb + b) = -0.5 * p.omega0 - a * sz;
    }
    for_each_flip_flop(p.n_spins, nb, [&](Eigen::Index row, Eigen::Index col) {
        h(row, col) += 2.0 * a;
        h(col, row) += 2.0 * a;
    });
    return h;
}

CMatrix spin_bath_interaction_hamiltonian(const SpinBathParams& p, double t) {
    const Eigen::Index nb = bath_dim(p);
    const double a = p.coupling / std::sqrt(static_cast<double>(p.n_spins));
    CMatrix h = CMatrix::Zero(2 * nb, 2 * nb);
    for (Eigen::Index b = 0; b < nb; ++b) {
        const double sz = bath_sz_sum(b, p.n_spins);
        h(b, b) = a * sz;
        h(nb + b, nb + b) = -a * sz;
    }
    const Complex phase = std::polar(2.0 * a, p.omega0 * t);  // sigma_+ B_-(t) carries e^{i omega0 t}
    for_each_flip_flop(p.n_spins, nb, [&](Eigen::Index row, Eigen::Index col) {
        h(row, col) += phase;
        h(col, row) += std::conj(phase);
    });
    return h;
}

std::vector<Complex> spin_coherence_dense(const SpinBathParams& p, const std::vector<double>& grid) {
    check_times(grid);
    const Eigen::Index nb = bath_dim(p);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spin_bath_hamiltonian(p));
    if (eig.info() != Eigen::Success) throw ConvergenceError("spin_coherence_dense: diagonalization failed");
    const Eigen::MatrixXd& v = eig.eigenvectors();
    const Eigen::VectorXd& e = eig.eigenvalues();
    const Eigen::MatrixXd m = v.topRows(nb).transpose() * v.bottomRows(nb);
    const Eigen::MatrixXd w = m.cwiseAbs2() / static_cast<double>(nb);
    std::vector<Complex> out(grid.size());
    const Eigen::Index d = e.size();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double t = grid[g];
        CVector phase(d);
        for (Eigen::Index k = 0; k < d; ++k) phase[k] = std::polar(1.0, -e[k] * t);
        // sum_kl w_kl e^{-i E_k t} e^{+i E_l t}
        const Complex s = (phase.transpose() * w.cast<Complex>() * phase.conjugate())(0, 0);
        out[g] = s * std::polar(1.0, p.omega0 * t);
    }
    return out;
}

std::vector<Complex> spin_coherence_von_neumann(const SpinBathParams& p, const std::vector<double>& grid,
                                                const VonNeumannOptions& options) {
    const Eigen::Index nb = bath_dim(p);
    CMatrix rho0 = CMatrix::Zero(2 * nb, 2 * nb);
    for (Eigen::Index b = 0; b < nb; ++b) rho0(b, nb + b) = 1.0 / static_cast<double>(nb);
    const auto rhos = integrate_von_neumann([&p](double t) { return spin_bath_interaction_hamiltonian(p, t); }, rho0,
                                            grid, options);
    std::vector<Complex> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g)
        out[g] = partial_trace_environment(rhos[g], 2, static_cast<std::size_t>(nb))(0, 1);
    return out;
}

namespace {

// <1| exp(-i H t) |1> for H = [[h11, g], [g, h22]].
Complex two_level_return(double h11, double h22, double g, double t) {
    const double mean = 0.5 * (h11 + h22);
    const double delta = 0.5 * (h11 - h22);
    const double omega = std::hypot(delta, g);
    const double x = omega * t;
    const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return std::polar(1.0, -mean * t) * Complex(std::cos(x), -delta * t * sinc);
}

} // namespace

std::vector<Complex> spin_coherence_exact(const SpinBathParams& p, const std::vector<double>& grid) {
    p.validate();
    check_times(grid);
    const double c = p.scaled_coupling();
    const double half_w = 0.5 * p.omega0;
    std::vector<NeumaierSum> re(grid.size()), im(grid.size());
    const int n = static_cast<int>(p.n_spins);
    for (int two_j = n % 2; two_j <= n; two_j += 2) {
        const double weight = jm_probability(p.n_spins, SpinBathLabel{two_j, two_j});
        if (weight == 0.0) continue;
        for (int two_m = -two_j; two_m <= two_j; two_m += 2) {
            const SpinBathLabel label{two_j, two_m};
            const double m = label.m();
            const double jj = label.j() * (label.j() + 1.0);
            const double g_plus = c * std::sqrt(std::max(0.0, jj - m * (m + 1.0)));
            const double g_minus = c * std::sqrt(std::max(0.0, jj - m * (m - 1.0)));
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const double t = grid[k];
                const Complex ap = two_level_return(half_w + c * m, -half_w - c * (m + 1.0), g_plus, t);
                const Complex am = two_level_return(-half_w - c * m, half_w + c * (m - 1.0), g_minus, t);
                const Complex z = weight * ap * std::conj(am);
                re[k].add(z.real());
                im[k].add(z.imag());
            }
        }
    }
    std::vector<Complex> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        out[k] = Complex(re[k].value(), im[k].value()) * std::polar(1.0, p.omega0 * grid[k]);
    return out;
}

SpinClosedForms spin_closed_forms(const SpinBathParams& p, double t) {
    p.validate();
    SpinClosedForms out;
    const double n = static_cast<double>(p.n_spins);
    out.cos_n = std::pow(std::cos(2.0 * p.coupling * t / std::sqrt(n)), n);
    out.gauss = std::exp(-2.0 * p.coupling * p.coupling * t * t);
    out.tcl2 = tcl2_coherence(p, t);
    return out;
}

} // namespace pdpmc
