#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "pdpmc/core/error.hpp"

namespace pdpmc {

/// Outcome of drawing the time to the next jump of one branch.
struct WaitingTime {
    enum class Kind {
        jump,            ///< next jump after tau
        beyond_horizon,  ///< no jump before the simulation horizon
        never,           ///< defective law: the integrated rate stays below -ln(eta) forever
    };
    Kind kind = Kind::never;
    double tau = std::numeric_limits<double>::infinity();

    bool is_jump() const { return kind == Kind::jump; }

    static WaitingTime jump_after(double tau) { return {Kind::jump, tau}; }
    static WaitingTime beyond() { return {Kind::beyond_horizon, std::numeric_limits<double>::infinity()}; }
    static WaitingTime infinite() { return {Kind::never, std::numeric_limits<double>::infinity()}; }
};

struct WaitingTimeOptions {
    double rel_tol = 1e-9;      ///< quadrature and root tolerance
    int max_iterations = 200;   ///< safeguarded Newton/bisection steps
    int max_quadrature_depth = 40;
};

/// Time-constant total rate: tau = -ln(eta) / rate. A zero rate never jumps.
inline WaitingTime waiting_time_constant(double rate, double eta) {
    if (!(rate >= 0.0)) throw NegativeRate("waiting_time_constant: negative or NaN rate");
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("waiting_time_constant: eta must lie in (0,1)");
    if (rate == 0.0) return WaitingTime::infinite();
    return WaitingTime::jump_after(-std::log(eta) / rate);
}

namespace detail {

template <class F>
double simpson_step(F& f, double a, double fa, double b, double fb, double whole, double fm, double tol,
                    int depth, bool& ok) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || !std::isfinite(delta)) {
        ok = false;
        return left + right + delta / 15.0;
    }
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, fa, m, fm, left, flm, 0.5 * tol, depth - 1, ok) +
           simpson_step(f, m, fm, b, fb, right, frm, 0.5 * tol, depth - 1, ok);
}

} // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] with relative tolerance rel_tol
/// (absolute floor rel_tol * 1e-3). Throws ConvergenceError when the recursion depth runs out.
template <class F>
double integrate_adaptive_simpson(F&& f, double a, double b, double rel_tol = 1e-9, int max_depth = 40) {
    if (b == a) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double coarse = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Pre-split so that integrands with sign changes or kinks are resolved at depth 1.
    constexpr int kPanels = 8;
    double total = 0.0;
    bool ok = true;
    const double tol = std::max(std::abs(coarse) * rel_tol, rel_tol * 1e-3) / kPanels;
    for (int p = 0; p < kPanels; ++p) {
        const double x0 = a + (b - a) * p / kPanels;
        const double x1 = (p == kPanels - 1) ? b : a + (b - a) * (p + 1) / kPanels;
        const double f0 = f(x0);
        const double f1 = f(x1);
        const double fmid = f(0.5 * (x0 + x1));
        const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fmid + f1);
        total += detail::simpson_step(f, x0, f0, x1, f1, whole, fmid, tol, max_depth, ok);
    }
    if (!ok || !std::isfinite(total))
        throw ConvergenceError("integrate_adaptive_simpson: tolerance not reached on [" + std::to_string(a) +
                               ", " + std::to_string(b) + "]");
    return total;
}

/// Draws tau from eta = exp(-int_{t0}^{t0+tau} rate(s) ds).
///
/// `cumulative(t0, t1)` returns the integrated total rate; `limit`, when known, is
/// int_{t0}^{inf} rate ds. If -ln(eta) >= limit the jump never happens (eta = q
/// goes to the no-jump branch). If the integral up to `horizon` stays below
/// -ln(eta) the result is beyond_horizon. Otherwise the root is found by a
/// safeguarded Newton iteration on the integrated rate (the log of the survival).
template <class RateFn, class CumulativeFn>
WaitingTime sample_waiting_time(RateFn&& rate, CumulativeFn&& cumulative, double t0, double eta,
                                double horizon, std::optional<double> limit = std::nullopt,
                                const WaitingTimeOptions& options = {}) {
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("sample_waiting_time: eta must lie in (0,1)");
    if (!(horizon > t0)) throw InvalidArgument("sample_waiting_time: horizon must exceed t0");
    const double target = -std::log(eta);
    if (limit && target >= *limit) return WaitingTime::infinite();

    const double span = horizon - t0;
    const double at_horizon = cumulative(t0, horizon);
    if (!std::isfinite(at_horizon)) throw ConvergenceError("sample_waiting_time: non-finite integrated rate");
    if (at_horizon < target) return WaitingTime::beyond();

    double lo = 0.0;
    double hi = span;
    double tau = span * std::min(1.0, target / at_horizon);
    for (int it = 0; it < options.max_iterations; ++it) {
        const double value = cumulative(t0, t0 + tau) - target;
        if (!std::isfinite(value)) throw ConvergenceError("sample_waiting_time: non-finite integrated rate");
        if (value < 0.0)
            lo = tau;
        else
            hi = tau;
        if (std::abs(value) <= options.rel_tol * std::max(target, 1e-300) ||
            hi - lo <= options.rel_tol * std::max(hi, 1e-300)) {
            return WaitingTime::jump_after(tau);
        }
        const double g = rate(t0 + tau);
        if (g < 0.0) throw NegativeRate("sample_waiting_time: negative rate at t=" + std::to_string(t0 + tau));
        double next = (g > 0.0) ? tau - value / g : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        tau = next;
    }
    throw ConvergenceError("sample_waiting_time: inversion did not converge within " +
                           std::to_string(options.max_iterations) + " iterations");
}

/// Quadrature-only variant for rates with no closed-form integral.
template <class RateFn>
WaitingTime sample_waiting_time(RateFn&& rate, double t0, double eta, double horizon,
                                const WaitingTimeOptions& options = {}) {
    auto checked = [&](double s) {
        const double g = rate(s);
        if (g < 0.0) throw NegativeRate("sample_waiting_time: negative rate at t=" + std::to_string(s));
        return g;
    };
    auto cumulative = [&](double a, double b) {
        return integrate_adaptive_simpson(checked, a, b, options.rel_tol, options.max_quadrature_depth);
    };
    return sample_waiting_time(checked, cumulative, t0, eta, horizon, std::nullopt, options);
}

} // namespace pdpmc
