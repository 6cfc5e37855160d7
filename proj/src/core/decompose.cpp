#include "pdpmc/core/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pdpmc/core/error.hpp"

namespace pdpmc {

namespace {

void require_orthonormal(const CMatrix& basis, const char* name) {
    if (basis.rows() != basis.cols())
        throw InvalidArgument(std::string("decompose_density: ") + name + " basis must be square");
    const CMatrix gram = basis.adjoint() * basis;
    const double dev = (gram - CMatrix::Identity(basis.rows(), basis.cols())).cwiseAbs().maxCoeff();
    if (dev > 1e-10)
        throw InvalidArgument(std::string("decompose_density: ") + name + " basis is not orthonormal");
}

CMatrix kron_matrix(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace

std::vector<WeightedPair<StateVector>> decompose_density(const CMatrix& rho, const CMatrix& basis_s,
                                                         const CMatrix& basis_e,
                                                         const DecomposeOptions& options) {
    if (rho.rows() != rho.cols()) throw InvalidArgument("decompose_density: rho is not square");
    const Eigen::Index ds = basis_s.cols();
    const Eigen::Index de = basis_e.cols();
    if (rho.rows() != ds * de)
        throw InvalidArgument("decompose_density: rho has dimension " + std::to_string(rho.rows()) +
                              ", bases give " + std::to_string(ds * de));
    require_orthonormal(basis_s, "system");
    require_orthonormal(basis_e, "environment");
    const Complex tr = rho.trace();
    if (std::abs(tr - 1.0) > options.trace_tolerance)
        throw InvalidArgument("decompose_density: trace deviates from 1 by " +
                              std::to_string(std::abs(tr - 1.0)));

    const CMatrix full_basis = kron_matrix(basis_s, basis_e);
    const CMatrix elements = full_basis.adjoint() * rho * full_basis;

    double total = 0.0;
    for (Eigen::Index r = 0; r < elements.rows(); ++r)
        for (Eigen::Index c = 0; c < elements.cols(); ++c)
            if (std::abs(elements(r, c)) >= options.cutoff) total += std::abs(elements(r, c));

    std::vector<WeightedPair<StateVector>> pairs;
    const double scale = std::sqrt(total);
    for (Eigen::Index i = 0; i < ds; ++i) {
        for (Eigen::Index n = 0; n < de; ++n) {
            for (Eigen::Index j = 0; j < ds; ++j) {
                for (Eigen::Index m = 0; m < de; ++m) {
                    const Complex value = elements(i * de + n, j * de + m);
                    const double modulus = std::abs(value);
                    if (modulus < options.cutoff) continue;
                    double arg = std::arg(value);
                    if (arg <= -std::numbers::pi) arg = std::numbers::pi;
                    const double phi = 0.5 * arg;
                    WeightedPair<StateVector> wp;
                    wp.pair.psi[0] = StateVector(scale * std::polar(1.0, phi) * basis_s.col(i));
                    wp.pair.chi[0] = StateVector(CVector(basis_e.col(n)));
                    wp.pair.psi[1] = StateVector(scale * std::polar(1.0, -phi) * basis_s.col(j));
                    wp.pair.chi[1] = StateVector(CVector(basis_e.col(m)));
                    wp.probability = modulus / total;
                    pairs.push_back(std::move(wp));
                }
            }
        }
    }
    return pairs;
}

std::vector<WeightedPair<StateVector>> decompose_density(const CMatrix& rho, std::size_t dim_s,
                                                         std::size_t dim_e,
                                                         const DecomposeOptions& options) {
    const auto ds = static_cast<Eigen::Index>(dim_s);
    const auto de = static_cast<Eigen::Index>(dim_e);
    return decompose_density(rho, CMatrix::Identity(ds, ds), CMatrix::Identity(de, de), options);
}

CMatrix resum_pairs(const std::vector<WeightedPair<StateVector>>& pairs) {
    if (pairs.empty()) throw InvalidArgument("resum_pairs: empty decomposition");
    const auto& first = pairs.front().pair;
    const auto dim = static_cast<Eigen::Index>(first.psi[0].dim() * first.chi[0].dim());
    CMatrix out = CMatrix::Zero(dim, dim);
    for (const auto& wp : pairs) {
        const CVector phi1 = kron(wp.pair.psi[0], wp.pair.chi[0]);
        const CVector phi2 = kron(wp.pair.psi[1], wp.pair.chi[1]);
        out += wp.probability * phi1 * phi2.adjoint();
    }
    return out;
}

PairSampler::PairSampler(const std::vector<WeightedPair<StateVector>>& pairs) {
    if (pairs.empty()) throw InvalidArgument("PairSampler: empty decomposition");
    cumulative_.reserve(pairs.size());
    double acc = 0.0;
    for (const auto& wp : pairs) {
        acc += wp.probability;
        cumulative_.push_back(acc);
    }
    for (auto& c : cumulative_) c /= acc;
}

std::size_t PairSampler::sample(double u) const {
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) return cumulative_.size() - 1;
    return static_cast<std::size_t>(it - cumulative_.begin());
}

} // namespace pdpmc
