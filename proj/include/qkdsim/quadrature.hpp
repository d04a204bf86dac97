#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qkdsim/errors.hpp"

namespace qkdsim {

struct QuadratureOptions {
    double abs_tol = 1e-10;
    // Interval budget shared across the whole integration call. Non-smooth
    // integrands refine heavily near kinks; 2^18 leaves ample headroom.
    std::size_t max_intervals = std::size_t{1} << 18;
};

namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_step(const F& f, double a, double fa, double b, double fb, double m, double fm,
                     double whole, double tol, std::size_t& budget) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    if (budget < 2) {
        throw QuadratureNotConverged("interval budget exhausted at [" + std::to_string(a) +
                                     ", " + std::to_string(b) + "]");
    }
    budget -= 2;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, budget) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, budget);
}

} // namespace detail

/// Adaptive Simpson integration of f over [a, b] to an absolute tolerance.
template <class F>
double adaptive_simpson(const F& f, double a, double b, const QuadratureOptions& opts = {}) {
    if (!(a < b)) return 0.0;
    std::size_t budget = opts.max_intervals;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(m);
    const double whole = detail::simpson(a, fa, b, fb, fm);
    return detail::adaptive_step(f, a, fa, b, fb, m, fm, whole, opts.abs_tol, budget);
}

/// Integrates f over [a, b], first splitting the domain at the supplied
/// breakpoints (kinks or jumps of the integrand) so each piece is smooth.
/// The tolerance is distributed across pieces proportionally to length.
template <class F>
double integrate_with_breakpoints(const F& f, double a, double b, std::vector<double> breakpoints,
                                  const QuadratureOptions& opts = {}) {
    if (!(a < b)) return 0.0;
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<double> cuts;
    for (double x : breakpoints) {
        if (x <= a || x >= b) continue;
        if (!cuts.empty() && x - cuts.back() < 1e-13) continue;
        cuts.push_back(x);
    }
    std::vector<double> edges;
    edges.push_back(a);
    edges.insert(edges.end(), cuts.begin(), cuts.end());
    edges.push_back(b);

    const double total = b - a;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = edges[i];
        const double hi = edges[i + 1];
        QuadratureOptions piece = opts;
        piece.abs_tol = std::max(opts.abs_tol * (hi - lo) / total, 1e-16);
        sum += adaptive_simpson(f, lo, hi, piece);
    }
    return sum;
}

} // namespace qkdsim
