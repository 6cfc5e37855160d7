#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "pdpmc/core/decompose.hpp"
#include "pdpmc/core/error.hpp"
#include "pdpmc/core/rng.hpp"
#include "pdpmc/core/state.hpp"

using namespace pdpmc;

TEST_CASE("state vector construction and validation") {
    const StateVector e = StateVector::basis(2, 0);
    CHECK(e.dim() == 2);
    CHECK(e.norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(StateVector(CVector(0)), InvalidArgument);
    CVector bad(2);
    bad << 1.0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(StateVector{bad}, InvalidArgument);
    CHECK_THROWS_AS(StateVector::basis(2, 2), InvalidArgument);
    CHECK_THROWS_AS(e.applied(CMatrix::Identity(3, 3)), InvalidArgument);
}

TEST_CASE("inner product examples") {
    const StateVector e = StateVector::basis(2, 0);
    const StateVector g = StateVector::basis(2, 1);
    CHECK(inner_product(e, e) == Complex(1.0));
    CHECK(inner_product(e, g) == Complex(0.0));
    CHECK_THROWS_AS(inner_product(e, StateVector::basis(3, 0)), InvalidArgument);
    // Conjugate-linear in the first argument.
    const Complex c(0.3, -1.2);
    CHECK(std::abs(inner_product(c * e, e) - std::conj(c)) < 1e-15);
    CHECK(std::abs(inner_product(e, c * e) - c) < 1e-15);
}

TEST_CASE("inner product symmetry and Cauchy-Schwarz on random states") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index dim = 1 + trial % 9;
        const StateVector a = testing::random_state(gen, dim);
        const StateVector b = testing::random_state(gen, dim);
        CHECK(std::abs(inner_product(a, b) - std::conj(inner_product(b, a))) < 1e-12);
        CHECK(std::abs(inner_product(a, b)) <= a.norm() * b.norm() * (1.0 + 1e-14));
    }
}

TEST_CASE("kron layout") {
    CVector a(2), b(3);
    a << 1.0, 2.0;
    b << 1.0, 10.0, 100.0;
    const CVector k = kron(StateVector(a), StateVector(b));
    REQUIRE(k.size() == 6);
    CHECK(k[4] == Complex(20.0));
}

TEST_CASE("decompose pure product state") {
    CMatrix rho = CMatrix::Zero(4, 4);
    rho(0, 0) = 1.0;  // |e>|0><e|<0|
    const auto pairs = decompose_density(rho, 2, 2);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].probability == doctest::Approx(1.0));
    for (int nu = 0; nu < 2; ++nu) {
        CHECK(std::abs(pairs[0].pair.psi[nu][0] - 1.0) < 1e-15);
        CHECK(std::abs(pairs[0].pair.chi[nu][0] - 1.0) < 1e-15);
    }
}

TEST_CASE("decompose maximally mixed single bath spin") {
    const CMatrix rho = 0.5 * CMatrix::Identity(2, 2);
    const auto pairs = decompose_density(rho, 1, 2);
    REQUIRE(pairs.size() == 2);
    for (const auto& wp : pairs) {
        CHECK(wp.probability == doctest::Approx(0.5));
        // sqrt(W) = 1 and phi = 0: unit amplitudes, no phase.
        CHECK(std::abs(wp.pair.psi[0][0] - 1.0) < 1e-15);
        CHECK(std::abs(wp.pair.psi[1][0] - 1.0) < 1e-15);
    }
    CHECK(testing::max_abs(resum_pairs(pairs) - rho) < 1e-15);
}

TEST_CASE("decompose random density matrices resums exactly") {
    std::mt19937_64 gen(11);
    const std::vector<std::pair<std::size_t, std::size_t>> shapes = {{2, 2}, {1, 4}, {4, 1}, {2, 4}, {4, 4}, {2, 8}};
    for (const auto& [ds, de] : shapes) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto dim = static_cast<Eigen::Index>(ds * de);
            const CMatrix rho = testing::random_density(gen, dim);
            const auto pairs = decompose_density(rho, ds, de);
            double total = 0.0;
            for (const auto& wp : pairs) total += wp.probability;
            CHECK(std::abs(total - 1.0) < 1e-12);
            CHECK(testing::max_abs(resum_pairs(pairs) - rho) < 1e-10);
        }
    }
}

TEST_CASE("decompose in rotated bases") {
    std::mt19937_64 gen(5);
    const CMatrix rho = testing::random_density(gen, 6);
    const CMatrix us = testing::random_unitary(gen, 2);
    const CMatrix ue = testing::random_unitary(gen, 3);
    const auto pairs = decompose_density(rho, us, ue);
    CHECK(testing::max_abs(resum_pairs(pairs) - rho) < 1e-10);
}

TEST_CASE("decompose phase convention") {
    CMatrix rho = CMatrix::Zero(2, 2);
    rho(0, 0) = 0.5;
    rho(1, 1) = 0.5;
    rho(0, 1) = -0.25;  // arg = pi
    rho(1, 0) = -0.25;
    const auto pairs = decompose_density(rho, 2, 1);
    REQUIRE(pairs.size() == 4);
    int found = 0;
    for (const auto& wp : pairs) {
        if (std::abs(wp.pair.psi[0][0]) > 0 && std::abs(wp.pair.psi[1][1]) > 0) {
            // arg(-0.25) = pi, so phi = pi/2 on branch 1 and -pi/2 on branch 2.
            CHECK(std::arg(wp.pair.psi[0][0]) == doctest::Approx(M_PI / 2));
            CHECK(std::arg(wp.pair.psi[1][1]) == doctest::Approx(-M_PI / 2));
            ++found;
        }
    }
    CHECK(found == 1);
    CHECK(testing::max_abs(resum_pairs(pairs) - rho) < 1e-15);
}

TEST_CASE("decompose cutoff drops tiny entries") {
    CMatrix rho = CMatrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    rho(0, 1) = 1e-16;
    rho(1, 0) = 1e-16;
    CHECK(decompose_density(rho, 2, 1).size() == 1);
    DecomposeOptions opts;
    opts.cutoff = 1e-20;
    CHECK(decompose_density(rho, 2, 1, opts).size() == 3);
}

TEST_CASE("decompose error paths") {
    CHECK_THROWS_AS(decompose_density(CMatrix::Identity(2, 3), 2, 1), InvalidArgument);
    CHECK_THROWS_AS(decompose_density(0.25 * CMatrix::Identity(4, 4), 2, 3), InvalidArgument);
    CHECK_THROWS_AS(decompose_density(0.3 * CMatrix::Identity(4, 4), 2, 2), InvalidArgument);
    CMatrix skew = CMatrix::Identity(2, 2);
    skew(0, 1) = 0.5;
    CHECK_THROWS_AS(decompose_density(0.5 * CMatrix::Identity(2, 2), skew, CMatrix::Identity(1, 1)), InvalidArgument);
}

TEST_CASE("pair sampler frequencies follow the weights") {
    std::mt19937_64 gen(3);
    const CMatrix rho = testing::random_density(gen, 4);
    const auto pairs = decompose_density(rho, 2, 2);
    const PairSampler sampler(pairs);
    std::vector<double> counts(pairs.size(), 0.0);
    RngStream rng(99, 0);
    const int n = 200000;
    for (int i = 0; i < n; ++i) counts[sampler.sample(rng.uniform())] += 1.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double p = pairs[k].probability;
        CHECK(std::abs(counts[k] / n - p) < 5.0 * std::sqrt(p * (1 - p) / n) + 1e-12);
    }
}

TEST_CASE("rng streams are reproducible and distinct") {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    std::vector<double> va, vb, vc;
    for (int i = 0; i < 1000; ++i) {
        va.push_back(a.uniform());
        vb.push_back(b.uniform());
        vc.push_back(c.uniform());
    }
    CHECK(va == vb);
    CHECK(va != vc);
    for (double u : va) CHECK((u > 0.0 && u < 1.0));
    RngStream base(1, 3);
    CHECK(base.branch(0).uniform() != base.branch(1).uniform());
    CHECK(base.branch(0).substream_index() == 1);
}

TEST_CASE("rng uniform moments across streams") {
    // Stream starts are uncorrelated: first variates of many streams look uniform.
    const int n = 100000;
    double s = 0.0, s2 = 0.0, lag = 0.0, prev = 0.5;
    for (int r = 0; r < n; ++r) {
        const double u = RngStream(2024, static_cast<std::uint64_t>(r)).uniform();
        s += u;
        s2 += u * u;
        lag += (u - 0.5) * (prev - 0.5);
        prev = u;
    }
    CHECK(std::abs(s / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(s2 / n - 1.0 / 3.0) < 0.005);
    CHECK(std::abs(lag / n) < 5.0 / 12.0 / std::sqrt(n));
}
