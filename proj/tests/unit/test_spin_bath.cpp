#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "pdpmc/core/error.hpp"
#include "pdpmc/estimators/estimators.hpp"
#include "pdpmc/models/spin_bath.hpp"
#include "pdpmc/oracles/references.hpp"

using namespace pdpmc;

namespace {

std::vector<double> linspace(double t_end, int steps) {
    std::vector<double> g;
    for (int i = 0; i <= steps; ++i) g.push_back(t_end * i / steps);
    return g;
}

// C(N, k) by the multiplicative formula, for small N.
double choose(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

} // namespace

TEST_CASE("multiplicities for four spins") {
    CHECK(multiplicity(4, 0) == doctest::Approx(2.0));
    CHECK(multiplicity(4, 2) == doctest::Approx(3.0));
    CHECK(multiplicity(4, 4) == doctest::Approx(1.0));
    CHECK(jm_probability(4, {2, 0}) == doctest::Approx(3.0 / 16.0));
    CHECK_THROWS_AS(multiplicity(4, 1), InvalidArgument);
    CHECK_THROWS_AS(multiplicity(4, 6), InvalidArgument);
}

TEST_CASE("multiplets fill the 2^N dimensional bath") {
    for (int n = 1; n <= 30; ++n) {
        double dim = 0.0;
        for (int two_j = n % 2; two_j <= n; two_j += 2) dim += (two_j + 1) * multiplicity(n, two_j);
        CHECK(dim == doctest::Approx(std::ldexp(1.0, n)).epsilon(1e-12));
    }
}

TEST_CASE("m marginal is binomial") {
    CHECK(marginal_pm(4, 0) == doctest::Approx(6.0 / 16.0));
    CHECK(marginal_pm(4, 4) == doctest::Approx(1.0 / 16.0));
    CHECK_THROWS_AS(marginal_pm(4, 1), InvalidArgument);
    CHECK_THROWS_AS(marginal_pm(4, 6), InvalidArgument);
    for (int n = 1; n <= 12; ++n) {
        for (int two_m = -n; two_m <= n; two_m += 2) {
            double sum = 0.0;
            for (int two_j = std::abs(two_m); two_j <= n; two_j += 2) sum += jm_probability(n, {two_j, two_m});
            CHECK(sum == doctest::Approx(marginal_pm(n, two_m)).epsilon(1e-12));
            CHECK(marginal_pm(n, two_m) == doctest::Approx(choose(n, (n + two_m) / 2) / std::ldexp(1.0, n)));
        }
    }
}

TEST_CASE("j marginal sums to one for large N") {
    for (std::size_t n : {1u, 2u, 7u, 100u, 1000u, 1001u, 2000u}) {
        const JmSampler sampler(n);
        double sum = 0.0;
        for (int two_j = sampler.min_two_j(); two_j <= static_cast<int>(n); two_j += 2)
            sum += sampler.j_probability(two_j);
        CHECK(std::abs(sum - 1.0) < 1e-10);
    }
}

TEST_CASE("sampled (j, m) follow P(j, m)") {
    const std::size_t n = 10;
    const std::size_t samples = 100000;
    RngStream rng(2024, 0);
    const JmSampler sampler(n);
    std::map<std::pair<int, int>, double> counts;
    for (std::size_t i = 0; i < samples; ++i) {
        const SpinBathLabel l = sampler.sample(rng);
        REQUIRE(std::abs(l.two_m) <= l.two_j);
        counts[{l.two_j, l.two_m}] += 1.0;
    }
    double chi2 = 0.0;
    int cells = 0;
    for (int two_j = 0; two_j <= 10; two_j += 2) {
        for (int two_m = -two_j; two_m <= two_j; two_m += 2) {
            const double expected = samples * jm_probability(n, {two_j, two_m});
            const double observed = counts[{two_j, two_m}];
            chi2 += (observed - expected) * (observed - expected) / expected;
            ++cells;
        }
    }
    const boost::math::chi_squared dist(cells - 1);
    CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 1e-4);
}

TEST_CASE("branch rates and frequencies") {
    const SpinBathParams p{4, 1.0, 0.5};
    const SpinRates r = spin_rates(p, {2, 0});  // j = 1, m = 0
    CHECK(r.plus == doctest::Approx(std::sqrt(2.0)));
    CHECK(r.minus == doctest::Approx(std::sqrt(2.0)));
    const SpinRates top = spin_rates(p, {4, 4});
    CHECK(top.plus == 0.0);
    CHECK(top.minus == doctest::Approx(2.0));
    const SpinRates w = spin_frequencies(p, {4, 2});
    CHECK(w.plus == doctest::Approx(0.5 + 1.0 * 3.0));
    CHECK(w.minus == doctest::Approx(0.5 + 1.0 * 1.0));
    double max_rate = 0.0;
    for (int two_j = 0; two_j <= 4; two_j += 2)
        for (int two_m = -two_j; two_m <= two_j; two_m += 2) {
            const SpinRates s = spin_rates(p, {two_j, two_m});
            max_rate = std::max({max_rate, s.plus, s.minus});
        }
    CHECK(max_rate <= spin_rate_bound(p) + 1e-12);
    CHECK(max_rate == doctest::Approx(spin_rate_bound(p)).epsilon(0.1));
    CHECK(spin_rate_bound(p) == doctest::Approx(5.0 / 2.0));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(SpinBathParams({0, 1.0, 1.0}).validate(), InvalidArgument);
    CHECK_THROWS_AS(SpinBathParams({4, -1.0, 1.0}).validate(), InvalidArgument);
    CHECK_THROWS_AS(tcl2_coherence(SpinBathParams{4, 1.0, 0.0}, 1.0), InvalidArgument);
    CHECK_THROWS_AS(error_growth_estimate(SpinBathParams{}, 1.0, 0), InvalidArgument);
}

TEST_CASE("uncoupled bath leaves the coherence at one") {
    const auto grid = linspace(2.0, 4);
    const auto acc = simulate_spin_coherence(SpinBathParams{6, 0.0, 1.0}, grid, 200);
    for (std::size_t g = 0; g < grid.size(); ++g)
        CHECK(std::abs(estimate_paired(acc, SpinObservable::coherence, g).value - 1.0) < 1e-14);
}

TEST_CASE("without flip-flop terms the coherence is cos^N") {
    const SpinBathParams p{6, 1.0, 1.0};
    const auto grid = linspace(3.0, 12);
    const auto acc = simulate_spin_coherence(p, grid, 20000, EnsembleOptions{.seed = 9},
                                             SpinSimulationOptions{.flip_flop = false});
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const Estimate e = estimate_paired(acc, SpinObservable::coherence, g);
        const double ref = spin_closed_forms(p, grid[g]).cos_n;
        CHECK(std::abs(e.value.real() - ref) <= 4.5 * e.se_re + 1e-12);
        CHECK(std::abs(e.value.imag()) <= 4.5 * e.se_im + 1e-12);
    }
}

TEST_CASE("fast path and generic engine agree trajectory by trajectory") {
    const SpinBathParams p{5, 0.8, 1.5};
    const auto grid = linspace(1.5, 6);
    const auto fast = simulate_spin_coherence(p, grid, 500, EnsembleOptions{.seed = 21});
    const auto engine = simulate_spin_coherence_engine(p, grid, 500, EnsembleOptions{.seed = 21});
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const Complex a = fast.paired(SpinObservable::coherence, g).mean();
        const Complex b = engine.paired(SpinObservable::coherence, g).mean();
        CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("Monte Carlo coherence matches the dense oracle") {
    for (std::size_t n : {2u, 4u, 8u}) {
        const SpinBathParams p{n, 1.0, 2.0};
        const auto grid = linspace(0.8, 8);
        const auto ref = spin_coherence_dense(p, grid);
        const auto acc = simulate_spin_coherence(p, grid, 100000, EnsembleOptions{.seed = 100 + n});
        int outside = 0;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const Estimate e = estimate_paired(acc, SpinObservable::coherence, g);
            const double zr = std::abs(e.value.real() - ref[g].real()) / std::max(e.se_re, 1e-12);
            const double zi = std::abs(e.value.imag() - ref[g].imag()) / std::max(e.se_im, 1e-12);
            CHECK(zr < 4.5);
            CHECK(zi < 4.5);
            outside += (zr > 3.0) + (zi > 3.0);
            CHECK(e.se_re <= 2.0 * error_growth_estimate(p, grid[g], 100000) + 1e-12);
        }
        CHECK(outside <= 2);
    }
}

TEST_CASE("TCL2 coherence") {
    const SpinBathParams p{100, 1.0, 2.0};
    CHECK(std::abs(tcl2_coherence(p, 0.0) - 1.0) == 0.0);
    // small-x series and the direct formula join continuously
    const double x_edge = 0.1 / p.omega0;
    CHECK(std::abs(tcl2_coherence(p, x_edge * (1 - 1e-9)) - tcl2_coherence(p, x_edge * (1 + 1e-9))) < 1e-10);
    double prev = 1.0;
    for (double t = 0.05; t < 3.0; t += 0.05) {
        const double mod = std::abs(tcl2_coherence(p, t));
        CHECK(mod < prev);
        prev = mod;
    }
    // Gamma(t) at t = 1: 2 A^2 (1 + 2 (1 - cos 2) / 4) and phase 4 A^2 / omega0 (1 - sin 2 / 2)
    const Complex z = tcl2_coherence(p, 1.0);
    CHECK(-std::log(std::abs(z)) == doctest::Approx(2.0 * (1.0 + 0.5 * (1.0 - std::cos(2.0)))));
    CHECK(-std::arg(z) == doctest::Approx(2.0 * (1.0 - 0.5 * std::sin(2.0))));
}

TEST_CASE("error growth estimate") {
    const SpinBathParams p{10, 0.5, 1.0};
    CHECK(error_growth_estimate(p, 0.0, 400) == doctest::Approx(0.05));
    CHECK(error_growth_estimate(p, 1.0, 400) == doctest::Approx(0.05 * std::exp(2.0)));
}
