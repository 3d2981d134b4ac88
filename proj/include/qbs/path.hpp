#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbs/errors.hpp"

namespace qbs {

inline constexpr int kTradingDaysPerYear = 252;
inline constexpr double kTradingDayYears = 1.0 / kTradingDaysPerYear;

// Piecewise-constant function of time sampled once per step, starting at tau = 0.
// Sample i holds on [i*step, (i+1)*step).
class SampledPath {
public:
    SampledPath() = default;

    explicit SampledPath(std::vector<double> values, double step_years = kTradingDayYears)
        : values_(std::move(values)), step_(step_years) {
        if (!(step_ > 0.0) || !std::isfinite(step_)) {
            throw DomainError("path step must be positive and finite");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw DomainError("path sample " + std::to_string(i) + " is not finite");
            }
        }
    }

    static SampledPath constant(double value, std::size_t samples,
                                double step_years = kTradingDayYears) {
        return SampledPath(std::vector<double>(samples, value), step_years);
    }

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double step_years() const noexcept { return step_; }

    // The same path re-anchored so that tau = 0 falls on sample `first`.
    SampledPath tail(std::size_t first) const {
        if (first > values_.size()) {
            throw CoverageError("path tail starts past the last sample");
        }
        return SampledPath(std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(first),
                                               values_.end()),
                           step_);
    }

    bool covers(double years) const;

private:
    std::vector<double> values_;
    double step_ = kTradingDayYears;
};

// Annualized volatility samples; every sample is >= 0.
class VolatilityPath : public SampledPath {
public:
    VolatilityPath() = default;

    explicit VolatilityPath(std::vector<double> sigmas, double step_years = kTradingDayYears)
        : SampledPath(std::move(sigmas), step_years) {
        const auto v = values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] < 0.0) {
                throw DomainError("volatility sample " + std::to_string(i) + " is negative");
            }
        }
    }

    static VolatilityPath constant(double sigma, std::size_t samples,
                                   double step_years = kTradingDayYears) {
        return VolatilityPath(std::vector<double>(samples, sigma), step_years);
    }

    VolatilityPath tail(std::size_t first) const {
        const auto t = SampledPath::tail(first);
        return VolatilityPath(std::vector<double>(t.values().begin(), t.values().end()),
                              step_years());
    }
};

namespace detail {

// Positions within 1e-9 steps of a grid point are treated as on it, so that
// T = n/252 lands on sample boundary n regardless of rounding in n/252.
inline double snap_to_grid(double steps) {
    const double nearest = std::round(steps);
    if (std::abs(steps - nearest) <= 1e-9 * std::max(1.0, std::abs(nearest))) {
        return nearest;
    }
    return steps;
}

struct StepRange {
    double begin;  // in units of steps, snapped
    double end;
};

inline StepRange to_steps(double from_years, double to_years, double step) {
    if (!(from_years >= 0.0) || !(to_years >= from_years) || !std::isfinite(to_years)) {
        throw DomainError("integration interval must satisfy 0 <= from <= to < inf");
    }
    return {snap_to_grid(from_years / step), snap_to_grid(to_years / step)};
}

inline std::size_t samples_needed(double end_steps) {
    return end_steps <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(end_steps));
}

// Left-endpoint Riemann sum over [from, to) of a piecewise-constant integrand
// whose value on step i is term(i): full steps contribute term * step, a
// partial first or last step its overlap. Terms are added in ascending order
// in the accumulator type Acc.
template <class Acc = double, class Term>
Acc left_riemann(std::size_t available, double step, double from_years, double to_years,
                 Term&& term) {
    const StepRange r = to_steps(from_years, to_years, step);
    if (r.end <= r.begin) {
        return Acc(0);
    }
    const std::size_t first = static_cast<std::size_t>(std::floor(r.begin));
    const std::size_t last = samples_needed(r.end);
    if (last > available) {
        throw CoverageError("path of " + std::to_string(available) + " samples does not cover " +
                            std::to_string(to_years) + " years (needs " + std::to_string(last) + ")");
    }
    Acc sum = 0;
    for (std::size_t i = first; i < last; ++i) {
        const double lo = std::max(r.begin, static_cast<double>(i));
        const double hi = std::min(r.end, static_cast<double>(i + 1));
        const double width = hi - lo;
        sum += Acc(term(i)) * Acc(width == 1.0 ? step : width * step);
    }
    return sum;
}

}  // namespace detail

inline bool SampledPath::covers(double years) const {
    if (!(years >= 0.0) || !std::isfinite(years)) {
        return false;
    }
    return detail::samples_needed(detail::snap_to_grid(years / step_)) <= values_.size();
}

/// Integrated variance of the path over [from, to), left-Riemann rule.
inline double accumulated_variance(const VolatilityPath& path, double from_years, double to_years) {
    const auto sigmas = path.values();
    return detail::left_riemann(sigmas.size(), path.step_years(), from_years, to_years,
                                [&](std::size_t i) { return sigmas[i] * sigmas[i]; });
}

/// Integrated variance over [0, T): sum of sigma_i^2 / 252 for the samples in [0, T).
inline double accumulated_variance(const VolatilityPath& path, double years) {
    return accumulated_variance(path, 0.0, years);
}

}  // namespace qbs
