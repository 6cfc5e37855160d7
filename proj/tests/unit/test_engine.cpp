#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pdpmc/core/error.hpp"
#include "pdpmc/engine/pdp.hpp"
#include "pdpmc/models/dense_small.hpp"
#include "pdpmc/models/jaynes_cummings.hpp"

using namespace pdpmc;

namespace {

// Wraps a model and hides its closed-form hooks so the engine falls back to quadrature.
template <class M>
struct QuadratureOnly {
    using Environment = typename M::Environment;
    const M& inner;
    std::size_t channel_count() const { return inner.channel_count(); }
    void rates(const BranchState<Environment>& s, double t, std::span<double> out) const { inner.rates(s, t, out); }
    void apply_jump(std::size_t a, BranchState<Environment>& s, double t) const { inner.apply_jump(a, s, t); }
};

// Model with constant channel rates and identity-like jumps on a 1-dim environment.
struct ConstantModel {
    using Environment = StateVector;
    std::vector<double> gammas;
    std::size_t channel_count() const { return gammas.size(); }
    void rates(const BranchState<Environment>&, double, std::span<double> out) const {
        std::copy(gammas.begin(), gammas.end(), out.begin());
    }
    void apply_jump(std::size_t, BranchState<Environment>& s, double) const { s.psi *= -kI; }
    double cumulative_rate(const BranchState<Environment>&, double a, double b) const {
        double g = 0.0;
        for (double x : gammas) g += x;
        return g * (b - a);
    }
    void apply_operators(std::size_t, BranchState<Environment>&, double) const {}
    void scale_environment(Environment& chi, double c) const { chi *= c; }
};

BranchState<StateVector> unit_branch() {
    BranchState<StateVector> s;
    s.psi = StateVector::basis(1, 0);
    s.chi = StateVector::basis(1, 0);
    return s;
}

} // namespace

TEST_CASE("constant waiting time closed form") {
    CHECK(waiting_time_constant(2.0, std::exp(-1.0)).tau == doctest::Approx(0.5));
    CHECK(waiting_time_constant(0.0, 0.5).kind == WaitingTime::Kind::never);
    CHECK_THROWS_AS(waiting_time_constant(-1.0, 0.5), NegativeRate);
    CHECK_THROWS_AS(waiting_time_constant(1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(waiting_time_constant(1.0, 1.0), InvalidArgument);
}

TEST_CASE("numerical waiting-time inversion") {
    // Gamma(t) = t: int_0^tau = tau^2 / 2.
    auto rate = [](double t) { return t; };
    const double eta = 0.3;
    const WaitingTime w = sample_waiting_time(rate, 0.0, eta, 10.0);
    REQUIRE(w.is_jump());
    CHECK(w.tau == doctest::Approx(std::sqrt(-2.0 * std::log(eta))).epsilon(1e-8));
    // Starting later shifts the integral.
    const WaitingTime w2 = sample_waiting_time(rate, 1.0, eta, 10.0);
    CHECK((1.0 + w2.tau) * (1.0 + w2.tau) / 2.0 - 0.5 == doctest::Approx(-std::log(eta)).epsilon(1e-8));
    CHECK(sample_waiting_time(rate, 0.0, 1e-6, 1.0).kind == WaitingTime::Kind::beyond_horizon);
    CHECK_THROWS_AS(sample_waiting_time([](double) { return -1.0; }, 0.0, 0.5, 1.0), NegativeRate);
    CHECK_THROWS_AS(sample_waiting_time(rate, 0.0, 0.5, 0.0), InvalidArgument);
    auto nan_rate = [](double) { return std::numeric_limits<double>::quiet_NaN(); };
    CHECK_THROWS(sample_waiting_time(nan_rate, 0.0, 0.5, 1.0));
}

TEST_CASE("defective waiting-time law goes to infinity below q") {
    // Gamma(t) = e^{-t}: int_0^inf = 1, q = e^{-1}.
    auto rate = [](double t) { return std::exp(-t); };
    auto cum = [](double a, double b) { return std::exp(-a) - std::exp(-b); };
    const double q = std::exp(-1.0);
    CHECK(sample_waiting_time(rate, cum, 0.0, 0.9 * q, 100.0, 1.0).kind == WaitingTime::Kind::never);
    CHECK(sample_waiting_time(rate, cum, 0.0, q, 100.0, 1.0).kind == WaitingTime::Kind::never);
    const WaitingTime w = sample_waiting_time(rate, cum, 0.0, 0.5, 100.0, 1.0);
    REQUIRE(w.is_jump());
    CHECK(w.tau == doctest::Approx(-std::log(1.0 + std::log(0.5))).epsilon(1e-8));
}

TEST_CASE("channel selection") {
    const std::vector<double> equal{1.0, 1.0};
    CHECK(select_channel(equal, 0.25) == 0);
    CHECK(select_channel(equal, 0.75) == 1);
    CHECK(select_channel(equal, 0.5) == 0);  // boundary goes to the lower channel
    const std::vector<double> single{2.5};
    for (double u : {0.01, 0.5, 0.99}) CHECK(select_channel(single, u) == 0);
    const std::vector<double> with_zero{0.0, 1.0, 0.0};
    CHECK(select_channel(with_zero, 0.999) == 1);
    CHECK_THROWS_AS(select_channel(std::vector<double>{0.0, 0.0}, 0.5), InvalidArgument);
    CHECK_THROWS_AS(select_channel(std::vector<double>{1.0, -0.1}, 0.5), NegativeRate);
}

TEST_CASE("channel frequencies follow the rates") {
    const std::vector<double> rates{3.0, 1.0};
    RngStream rng(5, 0);
    int zero = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) zero += select_channel(rates, rng.uniform()) == 0;
    CHECK(std::abs(zero / double(n) - 0.75) < 0.01);
}

TEST_CASE("all rates zero: no jumps, states unchanged") {
    ConstantModel model{{0.0, 0.0}};
    ProductPairState<StateVector> p;
    p.psi = {StateVector::basis(1, 0), StateVector::basis(1, 0)};
    p.chi = {StateVector::basis(1, 0), StateVector::basis(1, 0)};
    const auto rec = evolve_trajectory(p, model, 3.0, RngStream(1, 1));
    for (const auto& b : rec.branch) {
        CHECK(b.jumps.empty());
        CHECK(b.final_log_drift == 0.0);
        CHECK(b.terminal.psi[0] == Complex(1.0));
        CHECK(b.terminal.chi[0] == Complex(1.0));
    }
}

TEST_CASE("evolve_branch rejects bad inputs") {
    ConstantModel model{{1.0}};
    auto s = unit_branch();
    RngStream rng(1, 0);
    CHECK_THROWS_AS(evolve_branch(model, s, 0.0, rng), InvalidArgument);
    const std::vector<double> unsorted{0.5, 0.2};
    CHECK_THROWS_AS(evolve_branch(model, s, 1.0, rng, unsorted), InvalidArgument);
    const std::vector<double> outside{0.5, 2.0};
    CHECK_THROWS_AS(evolve_branch(model, s, 1.0, rng, outside), InvalidArgument);
}

TEST_CASE("constant rates: Poissonian jump counts") {
    ConstantModel model{{0.7, 0.8}};
    const double t = 2.0;
    const std::array<std::vector<double>, 2> rates{model.gammas, model.gammas};
    ProductPairState<StateVector> p;
    p.psi = {StateVector::basis(1, 0), StateVector::basis(1, 0)};
    p.chi = p.psi;
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < n; ++r) {
        const auto rec = evolve_trajectory_constant_rate(p, model, rates, t, RngStream(17, r));
        const double k = static_cast<double>(rec.branch[0].jumps.size());
        sum += k;
        sum2 += k * k;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean / (1.5 * t) - 1.0) < 0.02);
    CHECK(std::abs(var / (1.5 * t) - 1.0) < 0.05);
}

TEST_CASE("fixed rates equal to the natural rates reproduce the natural scheme") {
    ConstantModel model{{0.4, 1.1}};
    const std::array<std::vector<double>, 2> rates{model.gammas, model.gammas};
    ProductPairState<StateVector> p;
    p.psi = {StateVector::basis(1, 0), StateVector::basis(1, 0)};
    p.chi = p.psi;
    for (int r = 0; r < 50; ++r) {
        const auto a = evolve_trajectory(p, model, 5.0, RngStream(3, r));
        const auto b = evolve_trajectory_constant_rate(p, model, rates, 5.0, RngStream(3, r));
        for (int nu = 0; nu < 2; ++nu) {
            REQUIRE(a.branch[nu].jumps.size() == b.branch[nu].jumps.size());
            for (std::size_t k = 0; k < a.branch[nu].jumps.size(); ++k) {
                CHECK(a.branch[nu].jumps[k].t == doctest::Approx(b.branch[nu].jumps[k].t).epsilon(1e-8));
                CHECK(a.branch[nu].jumps[k].channel == b.branch[nu].jumps[k].channel);
            }
        }
    }
}

TEST_CASE("fixed-rate jump scales by 1/sqrt(Gamma)") {
    DenseModel model(DenseModelParams{});
    ProductPairState<StateVector> p;
    p.psi = {StateVector::basis(2, kExcited), StateVector::basis(2, kExcited)};
    p.chi = {StateVector::basis(3, 0), StateVector::basis(3, 0)};
    // Only sigma_z acts non-trivially in practice; channels 0/1 get negligible weight.
    const std::vector<double> r{1e-12, 1e-12, 4.0};
    const std::array<std::vector<double>, 2> rates{r, r};
    int checked = 0;
    for (int k = 0; k < 200 && checked < 20; ++k) {
        const auto rec = evolve_trajectory_constant_rate(p, model, rates, 0.3, RngStream(2, k));
        const auto& b = rec.branch[0];
        if (b.jumps.size() != 1 || b.jumps[0].channel != 2) continue;
        CHECK(b.terminal.psi.norm() == doctest::Approx(0.5));
        const double t = b.jumps[0].t;
        CHECK(b.terminal.chi.norm() == doctest::Approx(0.5 * std::abs(std::cos(t)) * 0.5));
        ++checked;
    }
    CHECK(checked > 0);
    auto s = branch_from_pair(p, 0);
    RngStream rng(1, 0);
    CHECK_THROWS_AS(evolve_branch_constant_rate(model, s, std::array<double, 3>{1.0, 0.0, 1.0}, 1.0, rng),
                    InvalidArgument);
}

TEST_CASE("jumps conserve norms and the drift log matches the integrated rate") {
    const DenseModel model(DenseModelParams{});
    const QuadratureOnly<DenseModel> quad{model};
    ProductPairState<StateVector> p;
    CVector psi(2);
    psi << 0.6, Complex(0.0, 0.8);
    CVector chi(3);
    chi << 0.8, 0.6, 0.0;
    p.psi = {StateVector(psi), StateVector(psi)};
    p.chi = {StateVector(chi), StateVector(chi)};
    for (int r = 0; r < 200; ++r) {
        // Replay each branch and integrate its rate between jumps independently.
        const auto rec = evolve_trajectory(p, model, 4.0, RngStream(8, r));
        for (int nu = 0; nu < 2; ++nu) {
            const auto& b = rec.branch[nu];
            CHECK(std::abs(b.terminal.psi.norm() - 1.0) < 1e-12);
            CHECK(std::abs(b.terminal.chi.norm() - 1.0) < 1e-12);
            BranchState<StateVector> s = branch_from_pair(p, nu);
            double drift = 0.0;
            double t_prev = 0.0;
            std::vector<double> buf(3);
            for (const auto& j : b.jumps) {
                drift += integrate_adaptive_simpson(
                    [&](double x) {
                        model.rates(s, x, buf);
                        return buf[0] + buf[1] + buf[2];
                    },
                    t_prev, j.t, 1e-12, 50);
                model.apply_jump(j.channel, s, j.t);
                t_prev = j.t;
            }
            drift += integrate_adaptive_simpson(
                [&](double x) {
                    model.rates(s, x, buf);
                    return buf[0] + buf[1] + buf[2];
                },
                t_prev, 4.0, 1e-12, 50);
            CHECK(std::abs(b.final_log_drift - drift) <= 1e-9 * std::max(1.0, drift));
        }
        // The quadrature fallback yields the same path up to the root tolerance.
        const auto rq = evolve_trajectory(p, quad, 4.0, RngStream(8, r));
        for (int nu = 0; nu < 2; ++nu) {
            REQUIRE(rq.branch[nu].jumps.size() == rec.branch[nu].jumps.size());
            for (std::size_t k = 0; k < rq.branch[nu].jumps.size(); ++k)
                CHECK(rq.branch[nu].jumps[k].t == doctest::Approx(rec.branch[nu].jumps[k].t).epsilon(1e-7));
        }
    }
}

TEST_CASE("grid observer sees right-continuous snapshots and a monotone drift") {
    const JaynesCummingsModel model(BathCorrelation(1.0, 0.2));
    auto p = jc_excited_vacuum();
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(0.05 * i);
    for (int r = 0; r < 100; ++r) {
        std::vector<double> drifts(grid.size(), -1.0);
        std::vector<std::size_t> jumps_seen(grid.size());
        BranchState<SymbolicReservoirState> s = branch_from_pair(p, 0);
        RngStream rng = RngStream(4, r).branch(0);
        std::vector<JumpEvent> jumps;
        evolve_branch(
            model, s, grid.back(), rng, grid,
            [&](std::size_t g, const BranchState<SymbolicReservoirState>& st, double d) {
                drifts[g] = d;
                jumps_seen[g] = st.jumps;
            },
            &jumps);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            CHECK(drifts[g] >= 0.0);
            if (g > 0) CHECK(drifts[g] >= drifts[g - 1] - 1e-15);
            const auto expected = static_cast<std::size_t>(std::count_if(
                jumps.begin(), jumps.end(), [&](const JumpEvent& j) { return j.t <= grid[g]; }));
            CHECK(jumps_seen[g] == expected);
        }
        for (std::size_t k = 1; k < jumps.size(); ++k) CHECK(jumps[k].t > jumps[k - 1].t);
    }
}

TEST_CASE("waiting-time survival function within DKW bands") {
    // Gamma(t) = 1 + sin(t)^2 evaluated by quadrature inversion.
    auto rate = [](double t) { return 1.0 + std::sin(t) * std::sin(t); };
    auto cum = [](double t) { return 1.5 * t - 0.25 * std::sin(2.0 * t); };
    const int n = 100000;
    std::vector<double> taus;
    taus.reserve(n);
    RngStream rng(12, 0);
    for (int i = 0; i < n; ++i) {
        const WaitingTime w = sample_waiting_time(rate, 0.0, rng.uniform(), 50.0);
        taus.push_back(w.is_jump() ? w.tau : std::numeric_limits<double>::infinity());
    }
    std::sort(taus.begin(), taus.end());
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(taus[i])) break;
        const double survival = std::exp(-cum(taus[i]));
        dmax = std::max(dmax, std::abs((1.0 - double(i) / n) - survival));
        dmax = std::max(dmax, std::abs((1.0 - double(i + 1) / n) - survival));
    }
    const double alpha = 1e-3;
    const double band = std::sqrt(std::log(2.0 / alpha) / (2.0 * n));
    CHECK(dmax < band);
}

TEST_CASE("branches draw independent randomness") {
    const JaynesCummingsModel model(BathCorrelation(1.0, 0.2));
    const auto p = jc_excited_vacuum();
    const int n = 20000;
    double s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
    for (int r = 0; r < n; ++r) {
        const auto rec = evolve_trajectory(p, model, 5.0, RngStream(77, r));
        const double k1 = double(rec.branch[0].jumps.size());
        const double k2 = double(rec.branch[1].jumps.size());
        s1 += k1;
        s2 += k2;
        s11 += k1 * k1;
        s22 += k2 * k2;
        s12 += k1 * k2;
    }
    const double cov = s12 / n - (s1 / n) * (s2 / n);
    const double corr = cov / std::sqrt((s11 / n - s1 * s1 / n / n) * (s22 / n - s2 * s2 / n / n));
    CHECK(std::abs(corr) < 3.0 / std::sqrt(double(n)));
}
