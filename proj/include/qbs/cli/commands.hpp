#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qbs/calibration.hpp"
#include "qbs/errors.hpp"
#include "qbs/market_data.hpp"
#include "qbs/path.hpp"
#include "qbs/pricing.hpp"
#include "qbs/volatility.hpp"

namespace qbs::cli {

enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitNumericalError = 2 };

// Result of one command: the exit code contract plus the text destined for
// standard output (or --out).
struct CommandOutcome {
    int exit_code = kExitOk;
    std::string report;
};

inline constexpr int kOutputDigits = 10;

enum class Model { Bs, BsTd, Qbs, QbsTd };

inline Model parse_model(const std::string& name) {
    if (name == "bs") return Model::Bs;
    if (name == "bs-td") return Model::BsTd;
    if (name == "qbs") return Model::Qbs;
    if (name == "qbs-td") return Model::QbsTd;
    throw InputError("unknown model '" + name + "' (expected bs|bs-td|qbs|qbs-td)");
}

// Flags shared by price, calibrate and compare. Unset optionals fall back to
// the option spec file, then the config file, then built-in defaults.
struct PipelineArgs {
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> spec;
    std::optional<std::filesystem::path> stock;
    std::optional<std::filesystem::path> option;
    std::optional<std::filesystem::path> vix;
    std::optional<std::filesystem::path> beta_table;
    std::optional<std::string> ticker;
    std::optional<double> strike;
    std::optional<std::string> issue;
    std::optional<std::string> expiry;
    std::string model = "bs-td";
    std::optional<double> gamma;
    std::optional<std::string> k_mode;
    std::optional<double> rate;
    double im_f = 0.0;  // constant Im f(T) added in quadrature to sigma for the qbs models
};

struct VixArgs {
    std::optional<std::filesystem::path> config;
    std::filesystem::path chain;
    std::optional<double> years;
    std::optional<double> calendar_days;
    std::optional<double> rate;
};

namespace detail {

inline std::string fmt(double v) { return format_number(v, kOutputDigits); }

inline RunConfig resolve_config(const std::optional<std::filesystem::path>& config_path,
                                const std::optional<double>& rate,
                                const std::optional<double>& gamma,
                                const std::optional<std::string>& k_mode,
                                const std::optional<std::filesystem::path>& beta_table) {
    RunConfig cfg = config_path ? load_config(*config_path) : RunConfig{};
    if (rate) cfg.rate = *rate;
    if (gamma) cfg.gamma = *gamma;
    if (k_mode) cfg.k_mode = parse_k_mode(*k_mode);
    if (beta_table) {
        cfg.beta_table = load_beta_table(*beta_table);
        cfg.beta_table_path = *beta_table;
    }
    cfg.validate();
    return cfg;
}

inline OptionSpec resolve_spec(const PipelineArgs& args) {
    OptionSpec spec;
    bool have_strike = false;
    bool have_issue = false;
    bool have_expiry = false;
    if (args.spec) {
        spec = load_option_spec(*args.spec);
        have_strike = have_issue = have_expiry = true;
    }
    if (args.ticker) spec.ticker = *args.ticker;
    if (args.strike) {
        spec.strike = *args.strike;
        have_strike = true;
    }
    if (args.issue) {
        spec.issuance = Date(*args.issue);
        have_issue = true;
    }
    if (args.expiry) {
        spec.maturity = Date(*args.expiry);
        have_expiry = true;
    }
    if (spec.ticker.empty()) throw InputError("no ticker given (--ticker or --spec)");
    if (!have_strike) throw InputError("no strike given (--strike or --spec)");
    if (!have_issue) throw InputError("no issuance date given (--issue or --spec)");
    if (!have_expiry) throw InputError("no expiry date given (--expiry or --spec)");
    spec.validate();
    return spec;
}

template <class T>
const T& required(const std::optional<T>& value, const char* flag) {
    if (!value) {
        throw InputError(std::string("missing required flag ") + flag);
    }
    return *value;
}

// Loaded, validated and aligned inputs for one option over its window.
struct Pipeline {
    RunConfig config;
    OptionSpec spec;
    double beta = 0.0;
    AlignedTable table;  // columns: stock, vix[, option]
    VolatilityPath sigma_path;

    static constexpr std::size_t kStock = 0;
    static constexpr std::size_t kVix = 1;
    static constexpr std::size_t kOption = 2;

    std::size_t days() const noexcept { return table.rows(); }
    double spot(std::size_t i) const { return table.columns[kStock][i]; }
    double option_close(std::size_t i) const { return table.columns[kOption][i]; }
    double years(std::size_t i) const { return years_remaining(i, days()); }

    PricingInputs inputs(std::size_t i) const {
        return PricingInputs{spot(i), spec.strike, years(i), config.rate};
    }
};

inline Pipeline prepare(const PipelineArgs& args, bool with_option) {
    Pipeline p;
    p.config = resolve_config(args.config, args.rate, args.gamma, args.k_mode, args.beta_table);
    p.spec = resolve_spec(args);
    p.beta = p.config.beta_table.at(p.spec.ticker);
    std::vector<DatedSeries> series;
    series.push_back(load_series(required(args.stock, "--stock")));
    series.push_back(load_series(required(args.vix, "--vix")));
    if (with_option) {
        series.push_back(load_series(required(args.option, "--option")));
    }
    p.table = align(series, DateWindow{p.spec.issuance, p.spec.maturity});
    if (p.table.rows() == 0) {
        throw InputError("no trading days inside " + p.spec.issuance.str() + ".." +
                         p.spec.maturity.str());
    }
    p.sigma_path = build_vol_path(p.table.column_series(Pipeline::kVix), p.beta);
    return p;
}

inline std::vector<MarketDay> market_days(const Pipeline& p) {
    std::vector<MarketDay> days(p.days());
    for (std::size_t i = 0; i < p.days(); ++i) {
        days[i] = MarketDay{p.table.dates[i], p.spot(i), p.option_close(i),
                            effective_volatility(p.sigma_path.tail(i), p.years(i))};
    }
    return days;
}

// Runs `body`, mapping library errors onto the exit code contract.
template <class Body>
CommandOutcome guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return {kExitInputError, {}};
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return {kExitNumericalError, {}};
    }
}

inline std::vector<DayCalibration> calibrate_pipeline(const Pipeline& p, std::ostream& err) {
    const auto days = market_days(p);
    auto rows = calibrate_series(p.spec, days,
                                 SeriesSettings{p.config.rate, p.config.gamma, p.config.k_mode});
    for (const auto& row : rows) {
        if (!row.calibrated()) {
            err << "warning: " << row.date.str() << ": no calibration: " << row.error << '\n';
        }
    }
    return rows;
}

inline bool any_calibrated(const std::vector<DayCalibration>& rows) {
    for (const auto& r : rows) {
        if (r.calibrated()) return true;
    }
    return false;
}

}  // namespace detail

/// Daily model prices over the option window: CSV `date,model_price`.
inline CommandOutcome cmd_price(const PipelineArgs& args, std::ostream& err) {
    return detail::guarded(err, [&]() -> CommandOutcome {
        const Model model = parse_model(args.model);
        if (!(args.im_f >= 0.0) || !std::isfinite(args.im_f)) {
            throw InputError("--im-f must be finite and >= 0");
        }
        const detail::Pipeline p = detail::prepare(args, false);
        const double gamma = p.config.gamma;
        const KMode k_mode = p.config.k_mode;

        std::ostringstream out;
        out << "date,model_price\n";
        for (std::size_t i = 0; i < p.days(); ++i) {
            const PricingInputs in = p.inputs(i);
            const VolatilityPath remaining = p.sigma_path.tail(i);
            double price = 0.0;
            switch (model) {
                case Model::Bs:
                    price = bs_call_price(in, p.sigma_path[i]);
                    break;
                case Model::BsTd:
                    price = bs_call_price_td(in, remaining);
                    break;
                case Model::Qbs:
                    price = qbs_call_price(
                        in, QuantumVolParams{gamma, std::hypot(p.sigma_path[i], args.im_f), k_mode});
                    break;
                case Model::QbsTd: {
                    std::vector<double> s(remaining.size());
                    for (std::size_t j = 0; j < s.size(); ++j) {
                        s[j] = std::hypot(remaining[j], args.im_f);
                    }
                    const auto gammas = SampledPath::constant(gamma, s.size());
                    price = qbs_call_price_td(in, gammas, VolatilityPath(std::move(s)), k_mode);
                    break;
                }
            }
            out << p.table.dates[i].str() << ',' << detail::fmt(price) << '\n';
        }
        return {kExitOk, out.str()};
    });
}

/// Per-day calibration of Im f(T): CSV
/// `date,market_price,model_price,s_star,im_f,regime`. Days without a solution
/// keep empty s_star/im_f and regime `none`.
inline CommandOutcome cmd_calibrate(const PipelineArgs& args, std::ostream& err) {
    return detail::guarded(err, [&]() -> CommandOutcome {
        const detail::Pipeline p = detail::prepare(args, true);
        const auto rows = detail::calibrate_pipeline(p, err);

        std::ostringstream out;
        out << "date,market_price,model_price,s_star,im_f,regime\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const DayCalibration& row = rows[i];
            const double model_price = bs_call_price_td(p.inputs(i), p.sigma_path.tail(i));
            out << row.date.str() << ',' << detail::fmt(row.market_price) << ','
                << detail::fmt(model_price) << ',';
            if (row.calibrated()) {
                out << detail::fmt(row.result->s_star) << ',' << detail::fmt(row.result->im_f) << ','
                    << to_string(row.result->regime);
            } else {
                out << ",,none";
            }
            out << '\n';
        }
        if (!detail::any_calibrated(rows)) {
            err << "error: no day could be calibrated\n";
            return {kExitNumericalError, out.str()};
        }
        return {kExitOk, out.str()};
    });
}

struct GapSummary {
    std::size_t days = 0;
    double mean_abs = 0.0;
    double max_abs = 0.0;
    double mean_rel = 0.0;
    double max_rel = 0.0;
};

/// Absolute and relative (to market) gaps between a model column and the market.
inline GapSummary summarize_gaps(const std::vector<double>& market, const std::vector<double>& model) {
    GapSummary s;
    for (std::size_t i = 0; i < market.size(); ++i) {
        const double gap = std::abs(model[i] - market[i]);
        const double rel = market[i] > 0.0 ? gap / market[i] : 0.0;
        ++s.days;
        s.mean_abs += gap;
        s.mean_rel += rel;
        s.max_abs = std::max(s.max_abs, gap);
        s.max_rel = std::max(s.max_rel, rel);
    }
    if (s.days) {
        s.mean_abs /= static_cast<double>(s.days);
        s.mean_rel /= static_cast<double>(s.days);
    }
    return s;
}

inline std::string render_summary(const std::string& column, const GapSummary& s) {
    return "# gap_summary column=" + column + " days=" + std::to_string(s.days) +
           " mean_abs=" + detail::fmt(s.mean_abs) + " max_abs=" + detail::fmt(s.max_abs) +
           " mean_rel=" + detail::fmt(s.mean_rel) + " max_rel=" + detail::fmt(s.max_rel) + "\n";
}

/// Market vs classical time-dependent price vs expanded-model price at the
/// calibrated s*: CSV `date,market,bs_td,qbs_at_calibrated_s` followed by two
/// `# gap_summary` lines (bs_td over all days with a market price > 0, qbs over
/// calibrated days).
inline CommandOutcome cmd_compare(const PipelineArgs& args, std::ostream& err) {
    return detail::guarded(err, [&]() -> CommandOutcome {
        const detail::Pipeline p = detail::prepare(args, true);
        const auto rows = detail::calibrate_pipeline(p, err);

        std::ostringstream out;
        out << "date,market,bs_td,qbs_at_calibrated_s\n";
        std::vector<double> market_all, bs_all, market_cal, qbs_cal;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const DayCalibration& row = rows[i];
            const PricingInputs in = p.inputs(i);
            const double bs_td = bs_call_price_td(in, p.sigma_path.tail(i));
            out << row.date.str() << ',' << detail::fmt(row.market_price) << ',' << detail::fmt(bs_td)
                << ',';
            if (row.market_price > 0.0) {
                market_all.push_back(row.market_price);
                bs_all.push_back(bs_td);
            }
            if (row.calibrated()) {
                const double qbs = qbs_call_price(
                    in, QuantumVolParams{p.config.gamma, row.result->s_star, p.config.k_mode});
                out << detail::fmt(qbs);
                market_cal.push_back(row.market_price);
                qbs_cal.push_back(qbs);
            }
            out << '\n';
        }
        out << render_summary("bs_td", summarize_gaps(market_all, bs_all));
        out << render_summary("qbs", summarize_gaps(market_cal, qbs_cal));
        if (!detail::any_calibrated(rows)) {
            err << "error: no day could be calibrated\n";
            return {kExitNumericalError, out.str()};
        }
        return {kExitOk, out.str()};
    });
}

/// Single-expiry VIX from a chain file: `vix=<points>`.
inline CommandOutcome cmd_vix(const VixArgs& args, std::ostream& err) {
    return detail::guarded(err, [&]() -> CommandOutcome {
        if (args.years.has_value() == args.calendar_days.has_value()) {
            throw InputError("give exactly one of --time (years) or --days (calendar days)");
        }
        const double years = args.years ? *args.years : *args.calendar_days / 365.0;
        const RunConfig cfg = args.config ? load_config(*args.config) : RunConfig{};
        const double rate = args.rate ? *args.rate : cfg.rate;
        const VixInputs in{load_chain(args.chain), years, rate};
        return {kExitOk, "vix=" + detail::fmt(compute_vix(in)) + "\n"};
    });
}

}  // namespace qbs::cli
