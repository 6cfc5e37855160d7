#pragma once

#include <cmath>
#include <random>

#include "pdpmc/core/state.hpp"

namespace testing {

inline pdpmc::CMatrix random_complex(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> n;
    pdpmc::CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = {n(gen), n(gen)};
    return m;
}

/// Random density matrix G G^dag / tr.
inline pdpmc::CMatrix random_density(std::mt19937_64& gen, Eigen::Index dim) {
    const pdpmc::CMatrix g = random_complex(gen, dim, dim);
    pdpmc::CMatrix rho = g * g.adjoint();
    return rho / rho.trace();
}

inline pdpmc::CMatrix random_unitary(std::mt19937_64& gen, Eigen::Index dim) {
    Eigen::HouseholderQR<pdpmc::CMatrix> qr(random_complex(gen, dim, dim));
    return qr.householderQ() * pdpmc::CMatrix::Identity(dim, dim);
}

inline pdpmc::StateVector random_state(std::mt19937_64& gen, Eigen::Index dim) {
    return pdpmc::StateVector(pdpmc::CVector(random_complex(gen, dim, 1)));
}

inline double max_abs(const pdpmc::CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace testing
