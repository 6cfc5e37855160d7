#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "pdpmc/core/state.hpp"

namespace pdpmc {

/// Neumaier-compensated running sum.
class NeumaierSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    void merge(const NeumaierSum& other) {
        add(other.sum_);
        comp_ += other.comp_;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// First and second moments of a real sample.
class RealMoments {
public:
    void add(double x) {
        ++n_;
        s1_.add(x);
        s2_.add(x * x);
    }
    void merge(const RealMoments& other) {
        n_ += other.n_;
        s1_.merge(other.s1_);
        s2_.merge(other.s2_);
    }
    std::size_t count() const { return n_; }
    double mean() const;
    double variance() const;        ///< sample variance (n - 1 denominator)
    double standard_error() const;  ///< sqrt(variance / n)

private:
    std::size_t n_ = 0;
    NeumaierSum s1_, s2_;
};

/// First and second moments of a complex sample, kept per real component so
/// that the 2x2 covariance of (Re, Im) is available.
class ComplexMoments {
public:
    void add(Complex z) {
        ++n_;
        const double x = z.real();
        const double y = z.imag();
        sx_.add(x);
        sy_.add(y);
        sxx_.add(x * x);
        syy_.add(y * y);
        sxy_.add(x * y);
    }
    void merge(const ComplexMoments& other);

    std::size_t count() const { return n_; }
    Complex mean() const;
    double var_re() const;
    double var_im() const;
    double cov_re_im() const;
    /// E|z - E z|^2 = var_re + var_im.
    double variance() const { return var_re() + var_im(); }

private:
    std::size_t n_ = 0;
    NeumaierSum sx_, sy_, sxx_, syy_, sxy_;
};

/// Mergeable per-grid-point sums for a set of observables.
///
/// For a factorizable estimand <Phi_2|X|Phi_1> = conj(b) a the per-branch factors
/// a (from Phi_1) and b (from Phi_2) are kept alongside the paired value, so both
/// the paired and the product estimator can be formed. Observables that do not
/// factorize store only the paired value. The sums of ||Phi_1||^2 ||Phi_2||^2 feed
/// the fluctuation diagnostics.
class EnsembleAccumulator {
public:
    EnsembleAccumulator() = default;
    EnsembleAccumulator(std::size_t n_observables, std::size_t grid_size);

    void add(std::size_t obs, std::size_t g, Complex a, Complex b, Complex paired);
    void add_paired(std::size_t obs, std::size_t g, Complex paired);
    void add_norms(std::size_t g, double norm_product);

    /// Adds the other accumulator's samples; shapes must agree.
    void merge(const EnsembleAccumulator& other);

    std::size_t observables() const { return n_obs_; }
    std::size_t grid_size() const { return n_grid_; }

    const ComplexMoments& a(std::size_t obs, std::size_t g) const { return a_[index(obs, g)]; }
    const ComplexMoments& b(std::size_t obs, std::size_t g) const { return b_[index(obs, g)]; }
    const ComplexMoments& paired(std::size_t obs, std::size_t g) const { return p_[index(obs, g)]; }
    const RealMoments& norms(std::size_t g) const { return norms_[g]; }
    std::size_t count(std::size_t obs, std::size_t g) const { return p_[index(obs, g)].count(); }

private:
    std::size_t index(std::size_t obs, std::size_t g) const;

    std::size_t n_obs_ = 0;
    std::size_t n_grid_ = 0;
    std::vector<ComplexMoments> a_, b_, p_;
    std::vector<RealMoments> norms_;
};

} // namespace pdpmc
