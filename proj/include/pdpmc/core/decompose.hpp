#pragma once

#include <vector>

#include "pdpmc/core/state.hpp"

namespace pdpmc {

struct DecomposeOptions {
    double cutoff = 1e-14;          ///< entries with |rho_ijnm| below this are dropped
    double trace_tolerance = 1e-10;
};

/// Writes an arbitrary density matrix on H_S (x) H_E as a weighted sum of product pairs.
///
/// Every nonzero matrix element rho_ijnm = |rho| e^{2i phi} in the product basis
/// {psi_i (x) chi_n} becomes one pair
///     Phi_1 = sqrt(W) e^{+i phi} psi_i (x) chi_n,   Phi_2 = sqrt(W) e^{-i phi} psi_j (x) chi_m,
/// drawn with probability |rho_ijnm| / W, where W = sum |rho_ijnm|. Then
/// sum_l p_l |Phi_1^l><Phi_2^l| = rho exactly. phi = arg(rho_ijnm) / 2 with arg in (-pi, pi].
/// The bases are given column-wise and must be orthonormal.
std::vector<WeightedPair<StateVector>> decompose_density(const CMatrix& rho, const CMatrix& basis_s,
                                                         const CMatrix& basis_e,
                                                         const DecomposeOptions& options = {});

/// Same, in the standard product basis of dimensions dim_s * dim_e.
std::vector<WeightedPair<StateVector>> decompose_density(const CMatrix& rho, std::size_t dim_s,
                                                         std::size_t dim_e,
                                                         const DecomposeOptions& options = {});

/// sum_l p_l |Phi_1^l><Phi_2^l| over a decomposition; the dense inverse of decompose_density.
CMatrix resum_pairs(const std::vector<WeightedPair<StateVector>>& pairs);

/// Categorical sampler over a decomposition (inversion on the cumulative weights).
class PairSampler {
public:
    explicit PairSampler(const std::vector<WeightedPair<StateVector>>& pairs);
    /// Index of the pair selected by a uniform variate u in (0, 1).
    std::size_t sample(double u) const;
    std::size_t size() const { return cumulative_.size(); }

private:
    std::vector<double> cumulative_;
};

} // namespace pdpmc
