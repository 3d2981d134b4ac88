#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbs/errors.hpp"

namespace qbs {

/// Per-ticker beta against the S&P 500. Values may be negative or zero.
class BetaTable {
public:
    BetaTable() = default;

    void set(const std::string& ticker, double beta) {
        if (ticker.empty()) {
            throw InputError("beta table: empty ticker symbol");
        }
        if (!std::isfinite(beta)) {
            throw InputError("beta table: beta for '" + ticker + "' is not finite");
        }
        entries_[ticker] = beta;
    }

    bool contains(const std::string& ticker) const { return entries_.count(ticker) != 0; }

    double at(const std::string& ticker) const {
        const auto it = entries_.find(ticker);
        if (it == entries_.end()) {
            throw InputError("beta table has no entry for ticker '" + ticker + "'");
        }
        return it->second;
    }

    std::size_t size() const noexcept { return entries_.size(); }
    const std::map<std::string, double>& entries() const noexcept { return entries_; }

    friend bool operator==(const BetaTable&, const BetaTable&) = default;

private:
    std::map<std::string, double> entries_;
};

// The 20 S&P 500 constituents and betas used for the October-November 2020 window.
inline BetaTable default_beta_table() {
    static const std::pair<const char*, double> rows[] = {
        {"AAL", 1.71},  {"AAPL", 1.36}, {"AMD", 2.32},   {"AMZN", 1.31}, {"BA", 1.41},
        {"BAC", 1.57},  {"BRK-B", 0.84}, {"C", 1.82},    {"GS", 1.42},   {"INTC", 0.68},
        {"JPM", 1.12},  {"M", 1.82},    {"MAR", 1.68},   {"NFLX", 0.98}, {"NKE", 0.82},
        {"PFE", 0.72},  {"RCL", 2.76},  {"TSLA", 1.97},  {"WMT", 0.40},  {"ZM", 1.05},
    };
    BetaTable table;
    for (const auto& [ticker, beta] : rows) {
        table.set(ticker, beta);
    }
    return table;
}

/// Annualized stock volatility sigma = beta * VIX / 100.
///
/// A negative result (beta < 0) is not a usable volatility and raises
/// NegativeVolatilityError carrying the offending beta.
inline double sigma_from_beta_vix(double beta, double vix_level) {
    if (!std::isfinite(beta)) {
        throw DomainError("beta is not finite");
    }
    if (!(vix_level >= 0.0) || !std::isfinite(vix_level)) {
        throw DomainError("VIX level must be finite and >= 0");
    }
    const double sigma = beta * vix_level / 100.0;
    if (sigma < 0.0) {
        throw NegativeVolatilityError(
            "beta " + std::to_string(beta) + " gives negative volatility " + std::to_string(sigma),
            beta);
    }
    return sigma + 0.0;  // folds -0.0 into +0.0
}

// ---------------------------------------------------------------------------
// VIX from a single-expiry index option chain
// ---------------------------------------------------------------------------

// One strike of the chain. q_mid is Q(K), the bid-ask midpoint of the option
// entering the variance strip at this strike.
struct ChainQuote {
    double strike = 0.0;
    double call_mid = 0.0;
    double put_mid = 0.0;
    double q_mid = 0.0;
};

struct VixInputs {
    std::vector<ChainQuote> chain;  // ascending strikes
    double time_to_expiration = 0.0;  // years
    double rate = 0.0;

    void validate() const {
        if (chain.size() < 3) {
            throw InputError("VIX needs at least 3 strikes, got " + std::to_string(chain.size()));
        }
        for (std::size_t i = 0; i < chain.size(); ++i) {
            const ChainQuote& q = chain[i];
            if (!(q.strike > 0.0) || !std::isfinite(q.strike)) {
                throw InputError("chain row " + std::to_string(i) + ": strike must be > 0");
            }
            if (i > 0 && !(q.strike > chain[i - 1].strike)) {
                throw InputError("chain row " + std::to_string(i) + ": strikes must be strictly increasing");
            }
            for (double price : {q.call_mid, q.put_mid, q.q_mid}) {
                if (!(price >= 0.0) || !std::isfinite(price)) {
                    throw InputError("chain row " + std::to_string(i) + ": prices must be finite and >= 0");
                }
            }
        }
        if (!(time_to_expiration > 0.0) || !std::isfinite(time_to_expiration)) {
            throw DomainError("VIX time to expiration must be > 0");
        }
        if (!std::isfinite(rate)) {
            throw DomainError("VIX rate must be finite");
        }
    }
};

/// F = K + e^{RT} (call - put) at the given strike.
inline double forward_index_level(const ChainQuote& at_strike, double rate, double years) {
    return at_strike.strike + std::exp(rate * years) * (at_strike.call_mid - at_strike.put_mid);
}

/// Index of the strike minimizing |call_mid - put_mid| (lowest strike on ties).
inline std::size_t forward_strike_index(std::span<const ChainQuote> chain) {
    if (chain.empty()) {
        throw InputError("empty option chain");
    }
    std::size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const double gap = std::abs(chain[i].call_mid - chain[i].put_mid);
        if (gap < best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    return best;
}

/// Index of K0, the highest strike at or below the forward level.
inline std::size_t k0_index(std::span<const ChainQuote> chain, double forward) {
    std::size_t found = chain.size();
    for (std::size_t i = 0; i < chain.size() && chain[i].strike <= forward; ++i) {
        found = i;
    }
    if (found == chain.size()) {
        throw DomainError("forward level " + std::to_string(forward) + " lies below the lowest strike");
    }
    return found;
}

/// Strike spacing: central difference inside the chain, one-sided at both ends.
inline std::vector<double> strike_intervals(std::span<const ChainQuote> chain) {
    const std::size_t n = chain.size();
    std::vector<double> dk(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            dk[i] = chain[1].strike - chain[0].strike;
        } else if (i + 1 == n) {
            dk[i] = chain[i].strike - chain[i - 1].strike;
        } else {
            dk[i] = 0.5 * (chain[i + 1].strike - chain[i - 1].strike);
        }
    }
    return dk;
}

/// Copy of the chain with q_mid filled from the out-of-the-money side: puts
/// below K0, calls above, the average of both at K0.
inline std::vector<ChainQuote> with_otm_midpoints(std::vector<ChainQuote> chain, double rate,
                                                  double years) {
    const double forward = forward_index_level(chain[forward_strike_index(chain)], rate, years);
    const std::size_t k0 = k0_index(chain, forward);
    for (std::size_t i = 0; i < chain.size(); ++i) {
        ChainQuote& q = chain[i];
        if (i < k0) {
            q.q_mid = q.put_mid;
        } else if (i > k0) {
            q.q_mid = q.call_mid;
        } else {
            q.q_mid = 0.5 * (q.call_mid + q.put_mid);
        }
    }
    return chain;
}

struct VixBreakdown {
    double forward = 0.0;
    std::size_t forward_index = 0;  // strike used to derive F
    std::size_t k0_index = 0;
    double k0 = 0.0;
    std::vector<double> delta_k;
    std::vector<double> contributions;  // (2/T) dK/K^2 e^{RT} Q(K), per strike
    double forward_adjustment = 0.0;    // (1/T) (F/K0 - 1)^2
    double variance = 0.0;              // sigma^2, may be negative for a degenerate chain
};

inline VixBreakdown vix_breakdown(const VixInputs& in) {
    in.validate();
    const double T = in.time_to_expiration;
    const double growth = std::exp(in.rate * T);

    VixBreakdown out;
    out.forward_index = forward_strike_index(in.chain);
    out.forward = forward_index_level(in.chain[out.forward_index], in.rate, T);
    out.k0_index = k0_index(in.chain, out.forward);
    out.k0 = in.chain[out.k0_index].strike;
    out.delta_k = strike_intervals(in.chain);

    out.contributions.resize(in.chain.size());
    double strip = 0.0;
    for (std::size_t i = 0; i < in.chain.size(); ++i) {
        const double k = in.chain[i].strike;
        out.contributions[i] = (2.0 / T) * (out.delta_k[i] / (k * k)) * growth * in.chain[i].q_mid;
        strip += out.contributions[i];
    }
    const double gap = out.forward / out.k0 - 1.0;
    out.forward_adjustment = gap * gap / T;
    out.variance = strip - out.forward_adjustment;
    return out;
}

/// VIX = 100 * sqrt(sigma^2) from a single expiry. Throws DomainError when the
/// chain yields sigma^2 < 0 and InputError for fewer than 3 strikes.
inline double compute_vix(const VixInputs& in) {
    const VixBreakdown b = vix_breakdown(in);
    if (b.variance < 0.0) {
        throw DomainError("chain yields negative variance " + std::to_string(b.variance));
    }
    return 100.0 * std::sqrt(b.variance);
}

}  // namespace qbs
