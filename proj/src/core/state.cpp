#include "pdpmc/core/state.hpp"

#include <cmath>
#include <string>

#include "pdpmc/core/error.hpp"

namespace pdpmc {

StateVector::StateVector() : amps_(CVector::Zero(1)) {}

StateVector::StateVector(CVector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() < 1) throw InvalidArgument("StateVector: dimension must be at least 1");
    if (!amps_.allFinite()) throw InvalidArgument("StateVector: non-finite amplitude");
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
    if (index >= dim)
        throw InvalidArgument("StateVector::basis: index " + std::to_string(index) +
                              " out of range for dim " + std::to_string(dim));
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return StateVector(std::move(v));
}

StateVector StateVector::zero(std::size_t dim) {
    return StateVector(CVector::Zero(static_cast<Eigen::Index>(dim)));
}

StateVector StateVector::applied(const CMatrix& op) const {
    if (op.rows() != amps_.size() || op.cols() != amps_.size())
        throw InvalidArgument("StateVector::applied: operator shape does not match state dimension");
    return StateVector(op * amps_);
}

Complex inner_product(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim())
        throw InvalidArgument("inner_product: dimension mismatch (" + std::to_string(a.dim()) +
                              " vs " + std::to_string(b.dim()) + ")");
    return a.amplitudes().dot(b.amplitudes());
}

CVector kron(const StateVector& a, const StateVector& b) {
    const auto db = static_cast<Eigen::Index>(b.dim());
    CVector out(static_cast<Eigen::Index>(a.dim()) * db);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(a.dim()); ++i)
        out.segment(i * db, db) = a.amplitudes()[i] * b.amplitudes();
    return out;
}

} // namespace pdpmc
