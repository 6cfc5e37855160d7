#include "pdpmc/estimators/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pdpmc/core/error.hpp"

namespace pdpmc {

namespace {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

// Covariance of the sample mean of z as a 2x2 matrix over (Re, Im).
Mat2 mean_covariance(const ComplexMoments& m) {
    const double n = static_cast<double>(m.count());
    Mat2 c;
    c << m.var_re(), m.cov_re_im(), m.cov_re_im(), m.var_im();
    return c / n;
}

// Var(x^T M y) for independent x, y with means mx, my and covariances cx, cy.
double bilinear_variance(const Mat2& m, const Vec2& mx, const Mat2& cx, const Vec2& my, const Mat2& cy) {
    const double v = (m * cy * m.transpose() * cx).trace() + mx.dot(m * cy * m.transpose() * mx) +
                     my.dot(m.transpose() * cx * m * my);
    return std::max(0.0, v);
}

void require_samples(std::size_t n, const char* who) {
    if (n < 2) throw InvalidArgument(std::string(who) + ": at least two samples required, got " + std::to_string(n));
}

} // namespace

SigmaPair error_formulas(const ComplexMoments& a, const ComplexMoments& b) {
    const double n = static_cast<double>(a.count());
    const double v = 0.5 * (a.variance() + b.variance());
    const double mu2 = 0.5 * (std::norm(a.mean()) + std::norm(b.mean()));
    SigmaPair s;
    s.sigma1 = std::sqrt(v / n) * std::sqrt(v + 2.0 * mu2);
    s.sigma2 = std::sqrt(v / n) * std::sqrt(2.0 * mu2);
    return s;
}

Estimate estimate_paired(const EnsembleAccumulator& acc, std::size_t obs, std::size_t g) {
    const ComplexMoments& p = acc.paired(obs, g);
    require_samples(p.count(), "estimate_paired");
    const double n = static_cast<double>(p.count());
    Estimate e;
    e.value = p.mean();
    e.se_re = std::sqrt(p.var_re() / n);
    e.se_im = std::sqrt(p.var_im() / n);
    e.n = p.count();
    if (acc.a(obs, g).count() == p.count()) e.sigma = error_formulas(acc.a(obs, g), acc.b(obs, g)).sigma1;
    return e;
}

Estimate estimate_product(const EnsembleAccumulator& acc, std::size_t obs, std::size_t g, bool correlated_branches) {
    if (correlated_branches)
        throw InvalidArgument("estimate_product: branches are correlated, the product estimator is invalid");
    const ComplexMoments& a = acc.a(obs, g);
    const ComplexMoments& b = acc.b(obs, g);
    if (a.count() == 0) throw InvalidArgument("estimate_product: observable has no factorized samples");
    require_samples(a.count(), "estimate_product");
    const Complex ma = a.mean();
    const Complex mb = b.mean();
    const Vec2 x(mb.real(), mb.imag());
    const Vec2 y(ma.real(), ma.imag());
    const Mat2 cx = mean_covariance(b);
    const Mat2 cy = mean_covariance(a);
    Mat2 re_form = Mat2::Identity();
    Mat2 im_form;
    im_form << 0.0, 1.0, -1.0, 0.0;
    Estimate e;
    e.value = std::conj(mb) * ma;
    e.se_re = std::sqrt(bilinear_variance(re_form, x, cx, y, cy));
    e.se_im = std::sqrt(bilinear_variance(im_form, x, cx, y, cy));
    e.sigma = error_formulas(a, b).sigma2;
    e.n = a.count();
    return e;
}

Estimate estimate(const EnsembleAccumulator& acc, std::size_t obs, std::size_t g, EstimatorKind kind) {
    return kind == EstimatorKind::paired ? estimate_paired(acc, obs, g) : estimate_product(acc, obs, g);
}

Curve estimate_curve(const EnsembleAccumulator& acc, std::size_t obs, const std::vector<double>& grid,
                     EstimatorKind kind) {
    if (grid.size() != acc.grid_size()) throw InvalidArgument("estimate_curve: grid size mismatch");
    Curve c;
    c.t = grid;
    c.points.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) c.points.push_back(estimate(acc, obs, g, kind));
    return c;
}

CMatrix reconstruct_rho_s(const EnsembleAccumulator& acc, std::size_t first_obs, std::size_t dim_s, std::size_t g) {
    const auto d = static_cast<Eigen::Index>(dim_s);
    CMatrix rho(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const ComplexMoments& m = acc.paired(first_obs + static_cast<std::size_t>(i * d + j), g);
            if (m.count() == 0) throw InvalidArgument("reconstruct_rho_s: empty ensemble");
            rho(i, j) = m.mean();
        }
    }
    return rho;
}

CMatrix reconstruct_rho_s_product(const EnsembleAccumulator& acc, std::size_t first_obs, std::size_t dim_s,
                                  std::size_t dim_e, std::size_t g) {
    const auto ds = static_cast<Eigen::Index>(dim_s);
    const auto de = static_cast<Eigen::Index>(dim_e);
    CMatrix mean1(ds, de);
    CMatrix mean2(ds, de);
    for (Eigen::Index i = 0; i < ds; ++i) {
        for (Eigen::Index n = 0; n < de; ++n) {
            const std::size_t obs = first_obs + static_cast<std::size_t>(i * de + n);
            if (acc.a(obs, g).count() == 0) throw InvalidArgument("reconstruct_rho_s_product: empty ensemble");
            mean1(i, n) = acc.a(obs, g).mean();
            mean2(i, n) = acc.b(obs, g).mean();
        }
    }
    return mean1 * mean2.adjoint();
}

FluctuationReport fluctuation_report(const EnsembleAccumulator& acc, const std::vector<double>& grid, double gamma0,
                                     double tr_rho2, double d2_initial) {
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0))
        throw InvalidArgument("fluctuation_report: the rate bound Gamma_0 must be a positive number");
    if (grid.size() != acc.grid_size()) throw InvalidArgument("fluctuation_report: grid size mismatch");
    FluctuationReport report;
    report.points.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const RealMoments& m = acc.norms(g);
        if (m.count() == 0) throw InvalidArgument("fluctuation_report: empty ensemble");
        FluctuationPoint p;
        p.t = grid[g];
        p.d2 = m.mean() - tr_rho2;
        p.se = m.standard_error();
        const double growth = std::exp(4.0 * gamma0 * grid[g]);
        p.bound = tr_rho2 * std::expm1(4.0 * gamma0 * grid[g]) + d2_initial * growth;
        p.alarm = p.d2 - 3.0 * p.se > p.bound * (1.0 + 1e-12) + 1e-12;
        report.alarm = report.alarm || p.alarm;
        report.points.push_back(p);
    }
    return report;
}

} // namespace pdpmc
