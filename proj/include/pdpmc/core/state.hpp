#pragma once

#include <array>
#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace pdpmc {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Basis of two-level systems: index 0 is |e> (or |+>), index 1 is |g> (or |->).
inline constexpr std::size_t kExcited = 0;
inline constexpr std::size_t kGround = 1;

/// Dense complex state vector of a finite Hilbert space (dim >= 1, finite amplitudes).
class StateVector {
public:
    StateVector();
    explicit StateVector(CVector amplitudes);

    static StateVector basis(std::size_t dim, std::size_t index);
    static StateVector zero(std::size_t dim);

    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    const CVector& amplitudes() const { return amps_; }
    CVector& amplitudes() { return amps_; }

    Complex operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }
    Complex& operator[](std::size_t i) { return amps_[static_cast<Eigen::Index>(i)]; }

    double norm() const { return amps_.norm(); }
    double squared_norm() const { return amps_.squaredNorm(); }

    StateVector& operator*=(Complex c) {
        amps_ *= c;
        return *this;
    }
    friend StateVector operator*(Complex c, StateVector v) { return v *= c; }

    /// Returns op * this; op must be dim x dim.
    StateVector applied(const CMatrix& op) const;

private:
    CVector amps_;
};

/// <a|b>, conjugate-linear in the first argument.
Complex inner_product(const StateVector& a, const StateVector& b);

/// Kronecker product a (x) b with index layout i * dim(b) + n.
CVector kron(const StateVector& a, const StateVector& b);

/// The pair |Phi_nu> = psi_nu (x) chi_nu, nu = 0, 1, at a common model time.
template <class Env>
struct ProductPairState {
    std::array<StateVector, 2> psi;
    std::array<Env, 2> chi;
    double t = 0.0;
};

template <class Env>
struct WeightedPair {
    ProductPairState<Env> pair;
    double probability = 0.0;
};

} // namespace pdpmc
