#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "qbs/errors.hpp"
#include "qbs/normal.hpp"
#include "qbs/path.hpp"

namespace qbs {

// Contract and market terms shared by every pricer. Volatility is supplied separately.
struct PricingInputs {
    double spot = 0.0;              // S
    double strike = 0.0;            // K
    double time_to_maturity = 0.0;  // T, years
    double rate = 0.0;              // r, continuously compounded, may be negative

    void validate() const {
        if (!(spot >= 0.0) || !std::isfinite(spot)) {
            throw DomainError("spot must be finite and >= 0");
        }
        if (!(strike >= 0.0) || !std::isfinite(strike)) {
            throw DomainError("strike must be finite and >= 0");
        }
        if (!(time_to_maturity >= 0.0) || !std::isfinite(time_to_maturity)) {
            throw DomainError("time to maturity must be finite and >= 0");
        }
        if (!std::isfinite(rate)) {
            throw DomainError("rate must be finite");
        }
    }
};

// Correlation structure of the generalized process: k = s^2 (Wiener) or k = 0.
enum class KMode { Wiener, SerialCorrelated };

inline std::string_view to_string(KMode mode) {
    return mode == KMode::Wiener ? "wiener" : "serial";
}

inline KMode parse_k_mode(std::string_view text) {
    if (text == "wiener") {
        return KMode::Wiener;
    }
    if (text == "serial") {
        return KMode::SerialCorrelated;
    }
    throw InputError("unknown k_mode '" + std::string(text) + "' (expected wiener|serial)");
}

inline double effective_k(double s, KMode mode) noexcept {
    return mode == KMode::Wiener ? s * s : 0.0;
}

// Parameters of the expanded model. k is derived from (s, k_mode) on demand.
struct QuantumVolParams {
    double gamma = 1.0;
    double s = 0.0;  // |f(T)|
    KMode k_mode = KMode::Wiener;

    double k() const noexcept { return effective_k(s, k_mode); }

    void validate() const {
        if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
            throw DomainError("gamma must be finite and >= 1");
        }
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw DomainError("generalized volatility s must be finite and >= 0");
        }
    }
};

// f(T) = re + i*im: re is the public (classical) volatility, im the non-classical part.
struct ComplexVol {
    double re = 0.0;
    double im = 0.0;

    double modulus() const noexcept { return std::hypot(re, im); }
};

namespace detail {

// Prices are assembled in extended precision and rounded once on return, so
// the result is close to correctly rounded and stays smooth enough in the
// volatility for calibration to resolve s* near machine precision.
using Wide = long double;

inline Wide normal_cdf_wide(Wide x) { return 0.5L * std::erfc(-x / std::numbers::sqrt2_v<Wide>); }

inline double payoff(double spot, double strike) { return std::max(spot - strike, 0.0); }

// Limit of every pricer when the diffusion term vanishes.
inline double discounted_intrinsic(const PricingInputs& in) {
    return std::max(in.spot - in.strike * std::exp(-in.rate * in.time_to_maturity), 0.0);
}

inline Wide square(Wide x) { return x * x; }

inline Wide wide_k(double s, KMode mode) { return mode == KMode::Wiener ? square(s) : Wide(0); }

// Shared call price for every pricer, given the integrated quantities
// total = int gamma^2 s^2 and drift = int k over [0, T):
//   S e^{(total - drift)/2} N(d1) - K e^{-rT} N(d2),
//   d1 = (ln(S/K) + rT + total - drift/2) / sqrt(total),
//   d2 = (ln(S/K) + rT - drift/2) / sqrt(total).
// Black-Scholes is total = drift = sigma^2 T.
inline Wide expanded_price(const PricingInputs& in, Wide total, Wide drift) {
    const Wide S = in.spot;
    const Wide K = in.strike;
    const Wide T = in.time_to_maturity;
    const Wide r = in.rate;
    if (T == 0) {
        return std::max(S - K, Wide(0));
    }
    if (S == 0) {
        return 0;
    }
    const Wide growth = std::exp(0.5L * (total - drift));
    if (K == 0) {
        return S * growth;
    }
    const Wide discount = std::exp(-r * T);
    if (total == 0) {
        return std::max(S - K * discount, Wide(0));
    }
    const Wide moneyness = std::log(S / K) + r * T;
    const Wide root = std::sqrt(total);
    const Wide d1 = (moneyness + (total - 0.5L * drift)) / root;
    const Wide d2 = (moneyness - 0.5L * drift) / root;
    return std::max(S * growth * normal_cdf_wide(d1) - K * discount * normal_cdf_wide(d2), Wide(0));
}

inline void require_nonnegative_sigma(double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw DomainError("volatility must be finite and >= 0");
    }
}

inline Wide qbs_price_wide(const PricingInputs& in, const QuantumVolParams& q) {
    in.validate();
    q.validate();
    const Wide T = in.time_to_maturity;
    const Wide gs = Wide(q.gamma) * Wide(q.s);
    return expanded_price(in, gs * gs * T, wide_k(q.s, q.k_mode) * T);
}

}  // namespace detail

/// Black-Scholes price of a European call, C = S N(d1) - K e^{-rT} N(d2).
///
/// Degenerate cases return the analytic limits: max(S-K, 0) at T = 0,
/// max(S - K e^{-rT}, 0) when sigma*sqrt(T) = 0, 0 at S = 0 and S at K = 0.
inline double bs_call_price(const PricingInputs& in, double sigma) {
    in.validate();
    detail::require_nonnegative_sigma(sigma);
    if (in.time_to_maturity == 0.0) {
        return detail::payoff(in.spot, in.strike);
    }
    const detail::Wide variance =
        detail::Wide(sigma) * detail::Wide(sigma) * detail::Wide(in.time_to_maturity);
    return static_cast<double>(detail::expanded_price(in, variance, variance));
}

/// Black-Scholes call with time-dependent volatility: sigma^2 T is replaced by
/// the left-Riemann integral of sigma^2(tau) over [0, T). Rate stays constant.
inline double bs_call_price_td(const PricingInputs& in, const VolatilityPath& path) {
    in.validate();
    const double T = in.time_to_maturity;
    if (T == 0.0) {
        return detail::payoff(in.spot, in.strike);
    }
    if (!path.covers(T)) {
        throw CoverageError("volatility path of " + std::to_string(path.size()) +
                            " samples does not cover T = " + std::to_string(T));
    }
    const auto sigmas = path.values();
    const detail::Wide variance = detail::left_riemann<detail::Wide>(
        sigmas.size(), path.step_years(), 0.0, T,
        [&](std::size_t i) { return detail::square(sigmas[i]); });
    return static_cast<double>(detail::expanded_price(in, variance, variance));
}

/// Call price in the expanded model with constant parameters:
///   C = S e^{T(g^2 s^2 - k)/2} N(d1) - K e^{-rT} N(d2),
///   d1 = (ln(S/K) + (r + g^2 s^2 - k/2) T) / (g s sqrt T),
///   d2 = (ln(S/K) + (r - k/2) T) / (g s sqrt T).
/// With gamma = 1 and k = s^2 this is bs_call_price with sigma = s.
inline double qbs_call_price(const PricingInputs& in, const QuantumVolParams& q) {
    return static_cast<double>(detail::qbs_price_wide(in, q));
}

/// Expanded-model call with time-dependent gamma(tau) and s(tau). The integrals
/// of gamma^2 s^2 and k are accumulated with the same left-Riemann rule as
/// bs_call_price_td; both paths must share a step and cover [0, T).
inline double qbs_call_price_td(const PricingInputs& in, const SampledPath& gamma_path,
                                const VolatilityPath& s_path, KMode k_mode) {
    in.validate();
    const double T = in.time_to_maturity;
    if (T == 0.0) {
        return detail::payoff(in.spot, in.strike);
    }
    if (gamma_path.step_years() != s_path.step_years()) {
        throw InputError("gamma and s paths must share a step");
    }
    if (!gamma_path.covers(T) || !s_path.covers(T)) {
        throw CoverageError("gamma/s paths (" + std::to_string(gamma_path.size()) + "/" +
                            std::to_string(s_path.size()) + " samples) do not cover T = " +
                            std::to_string(T));
    }
    for (double g : gamma_path.values()) {
        if (!(g >= 1.0)) {
            throw DomainError("gamma path sample below 1");
        }
    }
    const auto gammas = gamma_path.values();
    const auto ss = s_path.values();
    const double step = s_path.step_years();
    const detail::Wide total = detail::left_riemann<detail::Wide>(
        ss.size(), step, 0.0, T,
        [&](std::size_t i) { return detail::square(detail::Wide(gammas[i]) * detail::Wide(ss[i])); });
    const detail::Wide drift = detail::left_riemann<detail::Wide>(
        ss.size(), step, 0.0, T, [&](std::size_t i) { return detail::wide_k(ss[i], k_mode); });
    return static_cast<double>(detail::expanded_price(in, total, drift));
}

}  // namespace qbs
