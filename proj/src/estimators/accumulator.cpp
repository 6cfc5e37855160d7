#include "pdpmc/estimators/accumulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdpmc/core/error.hpp"

namespace pdpmc {

double RealMoments::mean() const { return n_ ? s1_.value() / static_cast<double>(n_) : 0.0; }

double RealMoments::variance() const {
    if (n_ < 2) return 0.0;
    const double n = static_cast<double>(n_);
    const double m = s1_.value() / n;
    return std::max(0.0, (s2_.value() - n * m * m) / (n - 1.0));
}

double RealMoments::standard_error() const {
    return n_ ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

void ComplexMoments::merge(const ComplexMoments& other) {
    n_ += other.n_;
    sx_.merge(other.sx_);
    sy_.merge(other.sy_);
    sxx_.merge(other.sxx_);
    syy_.merge(other.syy_);
    sxy_.merge(other.sxy_);
}

Complex ComplexMoments::mean() const {
    if (!n_) return {};
    const double n = static_cast<double>(n_);
    return {sx_.value() / n, sy_.value() / n};
}

double ComplexMoments::var_re() const {
    if (n_ < 2) return 0.0;
    const double n = static_cast<double>(n_);
    const double m = sx_.value() / n;
    return std::max(0.0, (sxx_.value() - n * m * m) / (n - 1.0));
}

double ComplexMoments::var_im() const {
    if (n_ < 2) return 0.0;
    const double n = static_cast<double>(n_);
    const double m = sy_.value() / n;
    return std::max(0.0, (syy_.value() - n * m * m) / (n - 1.0));
}

double ComplexMoments::cov_re_im() const {
    if (n_ < 2) return 0.0;
    const double n = static_cast<double>(n_);
    return (sxy_.value() - sx_.value() * sy_.value() / n) / (n - 1.0);
}

EnsembleAccumulator::EnsembleAccumulator(std::size_t n_observables, std::size_t grid_size)
    : n_obs_(n_observables), n_grid_(grid_size), a_(n_observables * grid_size), b_(n_observables * grid_size),
      p_(n_observables * grid_size), norms_(grid_size) {}

std::size_t EnsembleAccumulator::index(std::size_t obs, std::size_t g) const {
    if (obs >= n_obs_ || g >= n_grid_)
        throw InvalidArgument("EnsembleAccumulator: index (" + std::to_string(obs) + ", " + std::to_string(g) +
                              ") out of range");
    return obs * n_grid_ + g;
}

void EnsembleAccumulator::add(std::size_t obs, std::size_t g, Complex a, Complex b, Complex paired) {
    const std::size_t k = index(obs, g);
    a_[k].add(a);
    b_[k].add(b);
    p_[k].add(paired);
}

void EnsembleAccumulator::add_paired(std::size_t obs, std::size_t g, Complex paired) { p_[index(obs, g)].add(paired); }

void EnsembleAccumulator::add_norms(std::size_t g, double norm_product) {
    if (g >= n_grid_) throw InvalidArgument("EnsembleAccumulator: grid index out of range");
    norms_[g].add(norm_product);
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& other) {
    if (other.n_obs_ != n_obs_ || other.n_grid_ != n_grid_)
        throw InvalidArgument("EnsembleAccumulator::merge: shape mismatch");
    for (std::size_t k = 0; k < p_.size(); ++k) {
        a_[k].merge(other.a_[k]);
        b_[k].merge(other.b_[k]);
        p_[k].merge(other.p_[k]);
    }
    for (std::size_t g = 0; g < n_grid_; ++g) norms_[g].merge(other.norms_[g]);
}

} // namespace pdpmc
