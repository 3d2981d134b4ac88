#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qbs/errors.hpp"
#include "qbs/path.hpp"
#include "qbs/pricing.hpp"
#include "qbs/series.hpp"
#include "qbs/volatility.hpp"

namespace qbs {

// ---------------------------------------------------------------------------
// CSV layer
// ---------------------------------------------------------------------------

struct CsvRow {
    std::size_t line = 0;  // 1-based line number in the source
    std::vector<std::string> fields;
};

namespace detail {

inline std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            return out;
        }
        out.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) {
            out += sep;
        }
        out += parts[i];
    }
    return out;
}

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path.string() + "'");
    }
    return in;
}

}  // namespace detail

/// Reads a comma-separated file whose first line must equal `header` exactly.
/// Blank lines are skipped; every other row must have one field per column.
inline std::vector<CsvRow> read_csv(const std::filesystem::path& path,
                                    const std::vector<std::string>& header) {
    std::ifstream in = detail::open_input(path);
    const std::string where = path.string();
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw InputError(where + ": empty file, expected header '" + detail::join(header, ",") + "'");
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (detail::split_fields(line) != header) {
        throw InputError(where + ":1: header '" + line + "' does not match '" +
                         detail::join(header, ",") + "'");
    }
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (detail::trim(line).empty()) {
            continue;
        }
        CsvRow row{line_no, detail::split_fields(line)};
        if (row.fields.size() != header.size()) {
            throw InputError(where + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, found " +
                             std::to_string(row.fields.size()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Parses a finite decimal number occupying the whole field.
inline double parse_number(std::string_view field, std::string_view where, std::string_view column) {
    const std::string text = detail::trim(field);
    double value = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw InputError(std::string(where) + ": column '" + std::string(column) +
                         "': malformed number '" + text + "'");
    }
    if (!std::isfinite(value)) {
        throw InputError(std::string(where) + ": column '" + std::string(column) +
                         "': non-finite value '" + text + "'");
    }
    return value;
}

/// Renders with `digits` significant digits, shortest form (printf %g).
inline std::string format_number(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

// ---------------------------------------------------------------------------
// Dated series
// ---------------------------------------------------------------------------

struct SeriesSchema {
    std::string date_column = "date";
    std::string value_column = "value";
};

inline constexpr int kSeriesDigits = 12;

/// Loads a two-column dated series. Rejects malformed rows, non-finite values,
/// duplicate and out-of-order dates, naming the offending line.
inline DatedSeries load_series(const std::filesystem::path& path, const SeriesSchema& schema = {}) {
    const std::string where = path.string();
    const auto rows = read_csv(path, {schema.date_column, schema.value_column});
    std::vector<DatedPoint> points;
    points.reserve(rows.size());
    std::map<std::string, std::size_t> seen;
    for (const CsvRow& row : rows) {
        const std::string at = where + ":" + std::to_string(row.line);
        const std::string date_text = detail::trim(row.fields[0]);
        if (!Date::well_formed(date_text)) {
            throw InputError(at + ": column '" + schema.date_column + "': invalid date '" +
                             date_text + "'");
        }
        const Date date(date_text);
        if (const auto it = seen.find(date_text); it != seen.end()) {
            throw InputError(at + ": duplicate date " + date_text + " (first on line " +
                             std::to_string(it->second) + ")");
        }
        if (!points.empty() && date < points.back().date) {
            throw InputError(at + ": date " + date_text + " precedes previous date " +
                             points.back().date.str());
        }
        seen.emplace(date_text, row.line);
        points.push_back({date, parse_number(row.fields[1], at, schema.value_column)});
    }
    return DatedSeries(where, std::move(points));
}

inline void write_series(std::ostream& out, const DatedSeries& series, const SeriesSchema& schema = {}) {
    out << schema.date_column << ',' << schema.value_column << '\n';
    for (const auto& p : series.points()) {
        out << p.date.str() << ',' << format_number(p.value, kSeriesDigits) << '\n';
    }
}

inline void write_series(const std::filesystem::path& path, const DatedSeries& series,
                         const SeriesSchema& schema = {}) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'");
    }
    write_series(out, series, schema);
}

// ---------------------------------------------------------------------------
// Alignment
// ---------------------------------------------------------------------------

struct DateWindow {
    Date first;
    Date last;
};

// Inner join of several series on their dates inside a window. columns[j][i]
// is series j on dates[i].
struct AlignedTable {
    std::vector<Date> dates;
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const noexcept { return dates.size(); }

    DatedSeries column_series(std::size_t j) const {
        std::vector<DatedPoint> pts;
        pts.reserve(dates.size());
        for (std::size_t i = 0; i < dates.size(); ++i) {
            pts.push_back({dates[i], columns[j][i]});
        }
        return DatedSeries(names[j], std::move(pts));
    }
};

/// Joins series on the trading dates inside [window.first, window.last].
/// Every series must span the window and contain every date any other series
/// has inside it; nothing is forward-filled.
inline AlignedTable align(std::span<const DatedSeries> series, const DateWindow& window) {
    if (window.last < window.first) {
        throw InputError("window end " + window.last.str() + " precedes window start " +
                         window.first.str());
    }
    if (series.empty()) {
        throw InputError("align: no series given");
    }
    std::vector<std::string> problems;
    for (const DatedSeries& s : series) {
        if (s.empty()) {
            problems.push_back(s.name() + ": series is empty");
            continue;
        }
        if (window.first < s[0].date) {
            problems.push_back(s.name() + ": starts " + s[0].date.str() + ", after window start " +
                               window.first.str());
        }
        if (s[s.size() - 1].date < window.last) {
            problems.push_back(s.name() + ": ends " + s[s.size() - 1].date.str() +
                               ", before window end " + window.last.str());
        }
    }
    if (!problems.empty()) {
        throw CoverageError("coverage error: " + detail::join(problems, "; "));
    }

    const auto in_window = [&](const Date& d) { return !(d < window.first) && !(window.last < d); };
    std::set<Date> all_dates;
    for (const DatedSeries& s : series) {
        for (const auto& p : s.points()) {
            if (in_window(p.date)) {
                all_dates.insert(p.date);
            }
        }
    }

    AlignedTable table;
    table.dates.assign(all_dates.begin(), all_dates.end());
    for (const DatedSeries& s : series) {
        std::map<Date, double> by_date;
        for (const auto& p : s.points()) {
            if (in_window(p.date)) {
                by_date.emplace(p.date, p.value);
            }
        }
        std::vector<std::string> missing;
        std::vector<double> column;
        column.reserve(table.dates.size());
        for (const Date& d : table.dates) {
            const auto it = by_date.find(d);
            if (it == by_date.end()) {
                missing.push_back(d.str());
            } else {
                column.push_back(it->second);
            }
        }
        if (!missing.empty()) {
            problems.push_back(s.name() + ": missing " + detail::join(missing, " "));
        }
        table.names.push_back(s.name());
        table.columns.push_back(std::move(column));
    }
    if (!problems.empty()) {
        throw CoverageError("gap error: " + detail::join(problems, "; "));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Volatility paths from VIX
// ---------------------------------------------------------------------------

/// Daily path sigma_i = beta * VIX_i / 100, one sample per trading day.
inline VolatilityPath build_vol_path(const DatedSeries& vix, double beta) {
    std::vector<double> sigmas;
    sigmas.reserve(vix.size());
    for (const auto& p : vix.points()) {
        try {
            sigmas.push_back(sigma_from_beta_vix(beta, p.value));
        } catch (const NegativeVolatilityError& e) {
            throw NegativeVolatilityError("negative volatility on " + p.date.str() + ": " + e.what(),
                                          beta);
        } catch (const DomainError& e) {
            throw DomainError("invalid VIX on " + p.date.str() + ": " + e.what());
        }
    }
    return VolatilityPath(std::move(sigmas));
}

/// Constant volatility equivalent to the path over its first `years`:
/// sqrt(accumulated_variance / years).
inline double effective_volatility(const VolatilityPath& path, double years) {
    if (!(years > 0.0)) {
        throw DomainError("effective volatility needs a positive horizon");
    }
    return std::sqrt(accumulated_variance(path, years) / years);
}

// ---------------------------------------------------------------------------
// Beta table, chain, option spec and run configuration files
// ---------------------------------------------------------------------------

inline BetaTable load_beta_table(const std::filesystem::path& path) {
    BetaTable table;
    for (const CsvRow& row : read_csv(path, {"ticker", "beta"})) {
        const std::string at = path.string() + ":" + std::to_string(row.line);
        const std::string ticker = detail::trim(row.fields[0]);
        if (table.contains(ticker)) {
            throw InputError(at + ": duplicate ticker '" + ticker + "'");
        }
        if (ticker.empty()) {
            throw InputError(at + ": empty ticker");
        }
        table.set(ticker, parse_number(row.fields[1], at, "beta"));
    }
    return table;
}

inline std::vector<ChainQuote> load_chain(const std::filesystem::path& path) {
    std::vector<ChainQuote> chain;
    for (const CsvRow& row : read_csv(path, {"strike", "call_mid", "put_mid", "q_mid"})) {
        const std::string at = path.string() + ":" + std::to_string(row.line);
        ChainQuote q{parse_number(row.fields[0], at, "strike"),
                     parse_number(row.fields[1], at, "call_mid"),
                     parse_number(row.fields[2], at, "put_mid"),
                     parse_number(row.fields[3], at, "q_mid")};
        if (!(q.strike > 0.0)) {
            throw InputError(at + ": strike must be > 0");
        }
        if (q.call_mid < 0.0 || q.put_mid < 0.0 || q.q_mid < 0.0) {
            throw InputError(at + ": prices must be >= 0");
        }
        if (!chain.empty() && !(q.strike > chain.back().strike)) {
            throw InputError(at + ": strikes must be strictly ascending");
        }
        chain.push_back(q);
    }
    return chain;
}

/// Flat `key=value` text; '#' starts a comment, blank lines are ignored.
inline std::map<std::string, std::string> read_key_values(
    const std::filesystem::path& path, const std::set<std::string>& allowed) {
    std::ifstream in = detail::open_input(path);
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string at = path.string() + ":" + std::to_string(line_no);
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string text = detail::trim(line);
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw InputError(at + ": expected key=value");
        }
        const std::string key = detail::trim(std::string_view(text).substr(0, eq));
        const std::string value = detail::trim(std::string_view(text).substr(eq + 1));
        if (!allowed.count(key)) {
            throw InputError(at + ": unknown key '" + key + "'");
        }
        if (!out.emplace(key, value).second) {
            throw InputError(at + ": duplicate key '" + key + "'");
        }
    }
    return out;
}

inline OptionSpec load_option_spec(const std::filesystem::path& path) {
    const auto kv = read_key_values(path, {"ticker", "strike", "issue", "expiry"});
    const auto need = [&](const std::string& key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            throw InputError(path.string() + ": missing key '" + key + "'");
        }
        return it->second;
    };
    OptionSpec spec;
    spec.ticker = need("ticker");
    spec.strike = parse_number(need("strike"), path.string(), "strike");
    spec.issuance = Date(need("issue"));
    spec.maturity = Date(need("expiry"));
    spec.validate();
    return spec;
}

struct RunConfig {
    double rate = 0.0008;
    BetaTable beta_table = default_beta_table();
    std::filesystem::path beta_table_path;  // empty when the built-in table is used
    int day_count = kTradingDaysPerYear;
    double gamma = 1.0;
    KMode k_mode = KMode::Wiener;

    void validate() const {
        if (!std::isfinite(rate)) {
            throw InputError("config: rate must be finite");
        }
        if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
            throw InputError("config: gamma must be >= 1");
        }
        if (day_count != kTradingDaysPerYear) {
            throw InputError("config: day_count is fixed at 252");
        }
    }
};

/// Loads a run configuration. A relative beta_table path is resolved against
/// the directory holding the config file.
inline RunConfig load_config(const std::filesystem::path& path) {
    const auto kv = read_key_values(path, {"rate", "gamma", "k_mode", "beta_table", "day_count"});
    RunConfig cfg;
    const std::string where = path.string();
    if (const auto it = kv.find("rate"); it != kv.end()) {
        cfg.rate = parse_number(it->second, where, "rate");
    }
    if (const auto it = kv.find("gamma"); it != kv.end()) {
        cfg.gamma = parse_number(it->second, where, "gamma");
    }
    if (const auto it = kv.find("k_mode"); it != kv.end()) {
        cfg.k_mode = parse_k_mode(it->second);
    }
    if (const auto it = kv.find("day_count"); it != kv.end()) {
        const double days = parse_number(it->second, where, "day_count");
        if (days != kTradingDaysPerYear) {
            throw InputError(where + ": day_count is fixed at 252, got " + it->second);
        }
    }
    if (const auto it = kv.find("beta_table"); it != kv.end()) {
        std::filesystem::path table = it->second;
        if (table.is_relative()) {
            table = path.parent_path() / table;
        }
        cfg.beta_table = load_beta_table(table);
        cfg.beta_table_path = table;
    }
    cfg.validate();
    return cfg;
}

}  // namespace qbs
