#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qbs/errors.hpp"

namespace qbs {

// ISO-8601 calendar date (YYYY-MM-DD). Ordering is lexical, which matches
// chronological order for this format.
class Date {
public:
    Date() = default;

    explicit Date(std::string_view iso) : iso_(iso) {
        if (!well_formed(iso)) {
            throw InputError("invalid ISO-8601 date '" + std::string(iso) + "'");
        }
    }

    const std::string& str() const noexcept { return iso_; }

    friend auto operator<=>(const Date&, const Date&) = default;
    friend bool operator==(const Date&, const Date&) = default;

    static bool well_formed(std::string_view s) {
        if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
            return false;
        }
        for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
            if (s[i] < '0' || s[i] > '9') {
                return false;
            }
        }
        const auto num = [&](std::size_t pos, std::size_t len) {
            int v = 0;
            for (std::size_t i = pos; i < pos + len; ++i) {
                v = v * 10 + (s[i] - '0');
            }
            return v;
        };
        const int year = num(0, 4);
        const int month = num(5, 2);
        const int day = num(8, 2);
        if (month < 1 || month > 12 || day < 1) {
            return false;
        }
        static constexpr int days_in_month[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        const int limit = month == 2 && leap ? 29 : days_in_month[month - 1];
        return day <= limit;
    }

private:
    std::string iso_;
};

struct DatedPoint {
    Date date;
    double value = 0.0;

    friend bool operator==(const DatedPoint&, const DatedPoint&) = default;
};

// Ascending, duplicate-free sequence of dated finite values. `name` labels the
// series in diagnostics (usually the file it came from).
class DatedSeries {
public:
    DatedSeries() = default;

    DatedSeries(std::string name, std::vector<DatedPoint> points)
        : name_(std::move(name)), points_(std::move(points)) {
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (!std::isfinite(points_[i].value)) {
                throw InputError(name_ + ": value on " + points_[i].date.str() + " is not finite");
            }
            if (i > 0 && !(points_[i - 1].date < points_[i].date)) {
                throw InputError(name_ + ": dates not strictly ascending at " + points_[i].date.str());
            }
        }
    }

    const std::string& name() const noexcept { return name_; }
    const std::vector<DatedPoint>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const DatedPoint& operator[](std::size_t i) const { return points_[i]; }

    std::vector<double> values() const {
        std::vector<double> out;
        out.reserve(points_.size());
        for (const auto& p : points_) {
            out.push_back(p.value);
        }
        return out;
    }

private:
    std::string name_;
    std::vector<DatedPoint> points_;
};

// European call contract terms.
struct OptionSpec {
    std::string ticker;
    double strike = 0.0;
    Date issuance;
    Date maturity;

    void validate() const {
        if (!(strike > 0.0) || !std::isfinite(strike)) {
            throw InputError("option strike must be > 0");
        }
        if (!(issuance < maturity)) {
            throw InputError("maturity date " + maturity.str() + " is not after issuance date " +
                             issuance.str());
        }
    }
};

}  // namespace qbs
