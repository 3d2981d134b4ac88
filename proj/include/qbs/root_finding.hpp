#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbs/errors.hpp"

namespace qbs {

struct RootOptions {
    // Absolute tolerance on x added to the 2*eps*|x| floor. Zero iterates to
    // machine precision, which is cheap for a superlinear method.
    double x_tolerance = 0.0;
    int max_iterations = 200;
};

struct RootResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Brent's bracketed root finder: secant and inverse quadratic steps,
/// falling back to bisection whenever an interpolated step is not safe.
/// Requires f(a) and f(b) of opposite sign (or one of them zero).
template <class F>
RootResult brent_root(F&& f, double a, double b, double fa, double fb,
                      const RootOptions& options = {}) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (fa == 0.0) {
        return {a, fa, 0, true};
    }
    if (fb == 0.0) {
        return {b, fb, 0, true};
    }
    if ((fa > 0.0) == (fb > 0.0)) {
        throw NumericalError("brent_root: root not bracketed");
    }
    double c = b;
    double fc = fb;
    double d = b - a;
    double e = d;
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * eps * std::abs(b) + 0.5 * options.x_tolerance;
        const double half = 0.5 * (c - b);
        if (std::abs(half) <= tol || fb == 0.0) {
            return {b, fb, iter, true};
        }
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            const double s = fb / fa;
            double p;
            double q;
            if (a == c) {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) {
                q = -q;
            }
            p = std::abs(p);
            const double limit_interp = 3.0 * half * q - std::abs(tol * q);
            const double limit_prev = std::abs(e * q);
            if (2.0 * p < std::min(limit_interp, limit_prev)) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol ? d : std::copysign(tol, half);
        fb = f(b);
    }
    return {b, fb, options.max_iterations, false};
}

}  // namespace qbs
