#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qbs/errors.hpp"
#include "qbs/path.hpp"
#include "qbs/pricing.hpp"
#include "qbs/root_finding.hpp"
#include "qbs/series.hpp"

namespace qbs {

inline constexpr double kPriceRelTolerance = 1e-9;
inline constexpr double kRegimeTolerance = 1e-7;  // epsilon on Im f(T)
inline constexpr double kInitialBracketLow = 1e-8;
inline constexpr double kInitialBracketHigh = 10.0;
inline constexpr double kBracketCeiling = 1e4;
inline constexpr int kMaxSolverIterations = 200;

// Real: s* > sigma_public (market above the classical price), im_f = sqrt(s*^2 - sigma^2).
// Imaginary: s* < sigma_public, Im f(T) itself is imaginary; im_f holds its modulus.
enum class Regime { Real, Imaginary, Zero };

inline std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::Real: return "real";
        case Regime::Imaginary: return "imaginary";
        case Regime::Zero: return "zero";
    }
    return "?";
}

struct CalibrationResult {
    double s_star = 0.0;
    double sigma_public = 0.0;
    double im_f = 0.0;
    Regime regime = Regime::Zero;
    double residual = 0.0;  // model price at s_star minus market price
};

inline double price_tolerance(double market_price) {
    return kPriceRelTolerance * std::max(1.0, std::abs(market_price));
}

/// Generalized volatility s* at which the expanded-model price matches the
/// market price. The price is increasing in s, so the root is bracketed on
/// [1e-8, 10] (the upper end doubled as needed, up to 1e4) and refined with
/// Brent's method to machine precision.
///
/// Throws NoSolutionError when the price lies outside the open interval
/// (max(S - K e^{-rT}, 0), S), DivergenceError if no bracket or no
/// convergence is found.
inline double implied_s(const PricingInputs& in, double market_price, double gamma = 1.0,
                        KMode k_mode = KMode::Wiener) {
    in.validate();
    QuantumVolParams{gamma, 0.0, k_mode}.validate();
    if (!(in.time_to_maturity > 0.0)) {
        throw DomainError("implied volatility needs time to maturity > 0");
    }
    if (!std::isfinite(market_price)) {
        throw DomainError("market price is not finite");
    }
    const double lower = detail::discounted_intrinsic(in);
    if (!(market_price > lower)) {
        throw NoSolutionError("market price " + std::to_string(market_price) +
                                  " is at or below the lower no-arbitrage bound " +
                                  std::to_string(lower),
                              PriceBound::Lower);
    }
    if (!(market_price < in.spot)) {
        throw NoSolutionError("market price " + std::to_string(market_price) +
                                  " is at or above the upper no-arbitrage bound S = " +
                                  std::to_string(in.spot),
                              PriceBound::Upper);
    }

    const auto excess = [&](double s) {
        return static_cast<double>(detail::qbs_price_wide(in, QuantumVolParams{gamma, s, k_mode}) -
                                   market_price);
    };

    double lo = kInitialBracketLow;
    double f_lo = excess(lo);
    if (f_lo > 0.0) {
        lo = 0.0;
        f_lo = lower - market_price;
    }
    double hi = kInitialBracketHigh;
    double f_hi = excess(hi);
    while (f_hi < 0.0) {
        if (hi >= kBracketCeiling) {
            throw DivergenceError("no volatility up to " + std::to_string(hi) +
                                  " reaches market price " + std::to_string(market_price));
        }
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = excess(hi);
    }

    const RootResult root =
        brent_root(excess, lo, hi, f_lo, f_hi, RootOptions{0.0, kMaxSolverIterations});
    if (!root.converged && std::abs(root.fx) > price_tolerance(market_price)) {
        throw DivergenceError("implied volatility did not converge in " +
                              std::to_string(kMaxSolverIterations) + " iterations");
    }
    if (std::abs(root.fx) > price_tolerance(market_price)) {
        throw DivergenceError("implied volatility residual " + std::to_string(root.fx) +
                              " exceeds price tolerance");
    }
    return root.x;
}

/// Splits the implied generalized volatility into the public part
/// sigma_public and the non-classical part Im f(T): s*^2 = sigma^2 + Im(f)^2.
inline CalibrationResult calibrate_im_f(const PricingInputs& in, double market_price,
                                        double sigma_public, double gamma = 1.0,
                                        KMode k_mode = KMode::Wiener) {
    detail::require_nonnegative_sigma(sigma_public);
    CalibrationResult out;
    out.sigma_public = sigma_public;
    out.s_star = implied_s(in, market_price, gamma, k_mode);
    out.residual = static_cast<double>(
        detail::qbs_price_wide(in, QuantumVolParams{gamma, out.s_star, k_mode}) - market_price);

    const double excess_variance = (out.s_star - sigma_public) * (out.s_star + sigma_public);
    constexpr double threshold = kRegimeTolerance * kRegimeTolerance;
    if (excess_variance > threshold) {
        out.regime = Regime::Real;
        out.im_f = std::sqrt(excess_variance);
    } else if (excess_variance < -threshold) {
        out.regime = Regime::Imaginary;
        out.im_f = std::sqrt(-excess_variance);
    } else {
        out.regime = Regime::Zero;
        out.im_f = 0.0;
    }
    return out;
}

// One trading day of calibration input. sigma_public is the public volatility
// applicable over the option's remaining life.
struct MarketDay {
    Date date;
    double spot = 0.0;
    double option_close = 0.0;
    double sigma_public = 0.0;
};

struct SeriesSettings {
    double rate = 0.0008;
    double gamma = 1.0;
    KMode k_mode = KMode::Wiener;
};

struct DayCalibration {
    Date date;
    double years_to_maturity = 0.0;
    double spot = 0.0;
    double market_price = 0.0;
    double classical_price = 0.0;  // bs_call_price at sigma_public
    std::optional<CalibrationResult> result;
    std::string error;  // set when result is empty

    bool calibrated() const noexcept { return result.has_value(); }
};

/// Years to maturity on day `index` of a window of `days` trading days. The
/// last day keeps one trading day of life so every row has T > 0.
inline double years_remaining(std::size_t index, std::size_t days) {
    return static_cast<double>(days - index) / kTradingDaysPerYear;
}

/// Calibrates every day of an aligned series independently. Days whose price
/// admits no solution carry an error marker instead of aborting the series.
inline std::vector<DayCalibration> calibrate_series(const OptionSpec& spec,
                                                    std::span<const MarketDay> market,
                                                    const SeriesSettings& settings = {}) {
    spec.validate();
    if (market.empty()) {
        throw InputError("calibration series is empty");
    }
    for (std::size_t i = 0; i < market.size(); ++i) {
        const Date& d = market[i].date;
        if (d < spec.issuance || spec.maturity < d) {
            throw InputError("market date " + d.str() + " lies outside the option window " +
                             spec.issuance.str() + ".." + spec.maturity.str());
        }
        if (i > 0 && !(market[i - 1].date < d)) {
            throw InputError("market dates not strictly ascending at " + d.str());
        }
    }

    std::vector<DayCalibration> out(market.size());
    for (std::size_t i = 0; i < market.size(); ++i) {
        const MarketDay& day = market[i];
        DayCalibration& row = out[i];
        row.date = day.date;
        row.years_to_maturity = years_remaining(i, market.size());
        row.spot = day.spot;
        row.market_price = day.option_close;
        const PricingInputs in{day.spot, spec.strike, row.years_to_maturity, settings.rate};
        try {
            row.classical_price = bs_call_price(in, day.sigma_public);
            row.result = calibrate_im_f(in, day.option_close, day.sigma_public, settings.gamma,
                                        settings.k_mode);
        } catch (const NumericalError& e) {
            row.error = e.what();
        }
    }
    return out;
}

}  // namespace qbs
