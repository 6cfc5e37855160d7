#include "pdpmc/models/dense_small.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pdpmc/core/error.hpp"
#include "pdpmc/engine/channel.hpp"
#include "pdpmc/estimators/correlation.hpp"

namespace pdpmc {

namespace {

// int_0^x |cos u| du for x >= 0.
double integral_abs_cos(double x) {
    const double n = std::floor(x / std::numbers::pi);
    const double r = x - n * std::numbers::pi;
    const double part = r <= 0.5 * std::numbers::pi ? std::sin(r) : 2.0 - std::sin(r);
    return 2.0 * n + part;
}

double operator_norm(const CMatrix& m) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

} // namespace

DenseModel::DenseModel(DenseModelParams params) : params_(params) {
    if (params.env_dim < 2) throw InvalidArgument("DenseModel: env_dim must be at least 2");
    if (!std::isfinite(params.g) || !std::isfinite(params.kappa) || !std::isfinite(params.delta) ||
        !std::isfinite(params.nu))
        throw InvalidArgument("DenseModel: parameters must be finite");
    const auto d = static_cast<Eigen::Index>(params.env_dim);
    CMatrix sp = CMatrix::Zero(2, 2), sm = CMatrix::Zero(2, 2), sz = CMatrix::Zero(2, 2);
    sp(kExcited, kGround) = 1.0;
    sm(kGround, kExcited) = 1.0;
    sz(kExcited, kExcited) = 1.0;
    sz(kGround, kGround) = -1.0;
    CMatrix a = CMatrix::Zero(d, d);
    for (Eigen::Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    a_ = {sp, sm, sz};
    b_ = {params.g * a, params.g * CMatrix(a.adjoint()), params.kappa * CMatrix(a + a.adjoint())};
}

Complex DenseModel::time_factor(std::size_t alpha, double t) const {
    switch (alpha) {
    case 0: return std::polar(1.0, params_.delta * t);
    case 1: return std::polar(1.0, -params_.delta * t);
    case 2: return std::cos(params_.nu * t);
    default: throw InvalidArgument("DenseModel: channel index out of range");
    }
}

CMatrix DenseModel::environment_operator(std::size_t alpha, double t) const {
    return time_factor(alpha, t) * b_.at(alpha);
}

CMatrix DenseModel::interaction_hamiltonian(double t) const {
    const auto ds = static_cast<Eigen::Index>(2);
    const auto de = static_cast<Eigen::Index>(params_.env_dim);
    CMatrix h = CMatrix::Zero(ds * de, ds * de);
    for (std::size_t alpha = 0; alpha < 3; ++alpha) {
        const CMatrix b = environment_operator(alpha, t);
        for (Eigen::Index i = 0; i < ds; ++i)
            for (Eigen::Index j = 0; j < ds; ++j)
                if (a_[alpha](i, j) != 0.0) h.block(i * de, j * de, de, de) += a_[alpha](i, j) * b;
    }
    return h;
}

double DenseModel::rate_bound() const {
    double total = 0.0;
    for (std::size_t alpha = 0; alpha < 3; ++alpha) total += operator_norm(a_[alpha]) * operator_norm(b_[alpha]);
    return total;
}

DenseModel::Factors DenseModel::factors(const BranchState<Environment>& s) const {
    if (s.psi.dim() != 2 || s.chi.dim() != params_.env_dim)
        throw InvalidArgument("DenseModel: state dimensions do not match the model");
    Factors f;
    const double np = s.psi.norm();
    const double nc = s.chi.norm();
    if (np == 0.0 || nc == 0.0) return f;
    for (std::size_t alpha = 0; alpha < 3; ++alpha) {
        f.system[alpha] = (a_[alpha] * s.psi.amplitudes()).norm() / np;
        f.env[alpha] = (b_[alpha] * s.chi.amplitudes()).norm() / nc;
    }
    return f;
}

void DenseModel::rates(const BranchState<Environment>& s, double t, std::span<double> out) const {
    const Factors f = factors(s);
    for (std::size_t alpha = 0; alpha < 3; ++alpha)
        out[alpha] = f.system[alpha] * f.env[alpha] * std::abs(time_factor(alpha, t));
}

double DenseModel::cumulative_rate(const BranchState<Environment>& s, double a, double b) const {
    const Factors f = factors(s);
    double total = (f.system[0] * f.env[0] + f.system[1] * f.env[1]) * (b - a);
    const double w = f.system[2] * f.env[2];
    if (w > 0.0) {
        const double nu = std::abs(params_.nu);
        total += nu == 0.0 ? w * (b - a) : w * (integral_abs_cos(nu * b) - integral_abs_cos(nu * a)) / nu;
    }
    return total;
}

void DenseModel::apply_jump(std::size_t alpha, BranchState<Environment>& s, double t) const {
    if (alpha >= 3) throw InvalidArgument("DenseModel: channel index out of range");
    const double np = s.psi.norm();
    const double nc = s.chi.norm();
    CVector psi = a_[alpha] * s.psi.amplitudes();
    CVector chi = time_factor(alpha, t) * (b_[alpha] * s.chi.amplitudes());
    const double ap = psi.norm();
    const double bc = chi.norm();
    if (ap == 0.0 || bc == 0.0)
        throw InvalidArgument("DenseModel: jump through channel " + std::to_string(alpha) + " annihilates the state");
    s.psi.amplitudes() = (-kI * (np / ap)) * psi;
    s.chi.amplitudes() = (nc / bc) * chi;
}

void DenseModel::apply_operators(std::size_t alpha, BranchState<Environment>& s, double t) const {
    if (alpha >= 3) throw InvalidArgument("DenseModel: channel index out of range");
    s.psi.amplitudes() = a_[alpha] * s.psi.amplitudes();
    s.chi.amplitudes() = time_factor(alpha, t) * (b_[alpha] * s.chi.amplitudes());
}

CMatrix dense_default_initial(std::size_t env_dim) {
    if (env_dim < 3) throw InvalidArgument("dense_default_initial: env_dim must be at least 3");
    const auto de = static_cast<Eigen::Index>(env_dim);
    CMatrix rs(2, 2);
    rs << 0.5, 0.5, 0.5, 0.5;
    CMatrix re = CMatrix::Zero(de, de);
    re(0, 0) = 0.6;
    re(1, 1) = 0.3;
    re(2, 2) = 0.1;
    CMatrix rho(2 * de, 2 * de);
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) rho.block(i * de, j * de, de, de) = rs(i, j) * re;
    return rho;
}

EnsembleAccumulator simulate_dense(const DenseModel& model, const CMatrix& rho0, const std::vector<double>& grid,
                                   std::size_t n_traj, const EnsembleOptions& options) {
    const std::size_t ds = model.system_dim();
    const std::size_t de = model.env_dim();
    const auto pairs = decompose_density(rho0, ds, de);
    const PairSampler sampler(pairs);
    auto init = [&](RngStream& rng) { return pairs[sampler.sample(rng.uniform())].pair; };
    const DenseLayout layout{ds * de};
    using Snap = BranchSnapshot<StateVector>;
    auto record = [&](EnsembleAccumulator& acc, std::size_t g, const Snap& s1, const Snap& s2) {
        const CVector phi1 = std::exp(s1.log_drift) * kron(s1.state.psi, s1.state.chi);
        const CVector phi2 = std::exp(s2.log_drift) * kron(s2.state.psi, s2.state.chi);
        const std::size_t d = layout.dim;
        for (std::size_t k = 0; k < d; ++k) {
            const auto ki = static_cast<Eigen::Index>(k);
            for (std::size_t l = 0; l < d; ++l)
                acc.add_paired(layout.full() + k * d + l, g, phi1[ki] * std::conj(phi2[static_cast<Eigen::Index>(l)]));
            acc.add(layout.components() + k, g, phi1[ki], phi2[ki], phi1[ki] * std::conj(phi2[ki]));
        }
        const Complex overlap = environment_overlap(model, s1, s2);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                acc.add_paired(layout.rho_s() + 2 * i + j, g, s1.state.psi[i] * std::conj(s2.state.psi[j]) * overlap);
        acc.add_norms(g, pair_norm_product(s1, s2));
    };
    return run_pair_ensemble(model, init, grid, n_traj, layout.count(), record, options);
}

} // namespace pdpmc
