#pragma once

#include <cmath>
#include <numbers>

#include "qbs/errors.hpp"

namespace qbs {

namespace detail {

// N(x) = erfc(-x / sqrt 2) / 2. For x < 0 the erfc argument is positive, so the
// lower tail is evaluated directly rather than as 1 - N(|x|). Accepts +-inf.
inline double normal_cdf_unchecked(double x) noexcept {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

}  // namespace detail

/// Standard normal cumulative distribution function.
///
/// Absolute error is bounded by the accuracy of std::erfc (a few ulp), well
/// inside 1e-12. Throws DomainError for NaN or infinite input.
inline double normal_cdf(double x) {
    if (!std::isfinite(x)) {
        throw DomainError("normal_cdf: argument is not finite");
    }
    return detail::normal_cdf_unchecked(x);
}

}  // namespace qbs
