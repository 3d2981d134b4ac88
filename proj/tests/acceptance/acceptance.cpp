// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qbs/cli/commands.hpp"
#include "qbs/qbs.hpp"
#include "support/frozen.hpp"
#include "support/oracles.hpp"

namespace {

namespace fs = std::filesystem;
namespace frozen = qbs::test::frozen;
using qbs::KMode;
using qbs::PricingInputs;
using qbs::Regime;
using Clock = std::chrono::steady_clock;

constexpr double kRate = 0.0008;
const fs::path kData = QBS_DATA_DIR;
const fs::path kFixtures = QBS_FIXTURE_DIR;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct GridPoint {
    PricingInputs in;
    double sigma;
};

// 11 moneyness x 10 maturities x 10 volatilities, K = 100.
std::vector<GridPoint> pricing_grid() {
    std::vector<GridPoint> grid;
    for (int m = 0; m <= 10; ++m) {
        const double moneyness = 0.5 * std::pow(4.0, m / 10.0);  // 0.5 .. 2, log-spaced
        for (int t = 0; t < 10; ++t) {
            const double years = (1.0 / 252.0) * std::pow(504.0, t / 9.0);  // 1/252 .. 2
            for (int v = 0; v < 10; ++v) {
                const double sigma = 0.05 + 0.95 * v / 9.0;
                grid.push_back({{100.0 * moneyness, 100.0, years, kRate}, sigma});
            }
        }
    }
    return grid;
}

Verdict oracle_equivalence() {
    const auto start = Clock::now();
    const auto grid = pricing_grid();
    double worst = 0.0;
    std::size_t subnormal = 0;
    std::size_t failures = 0;
    for (const auto& p : grid) {
        const double price = qbs::bs_call_price(p.in, p.sigma);
        const long double oracle = qbs::test::lognormal_call_quadrature(
            p.in.spot, p.in.strike, p.in.time_to_maturity, p.in.rate, p.sigma);
        if (oracle < std::numeric_limits<double>::min()) {
            // Below the normal double range relative error is not representable.
            ++subnormal;
            if (std::abs(price - static_cast<double>(oracle)) > std::numeric_limits<double>::min()) {
                ++failures;
            }
            continue;
        }
        const double rel = static_cast<double>(std::abs((price - oracle) / oracle));
        worst = std::isnan(rel) ? rel : std::max(worst, rel);
        if (!(rel <= 1e-8)) {
            ++failures;
        }
    }
    const double elapsed = seconds_since(start);
    return {failures == 0 && grid.size() >= 1000 && elapsed < 10.0,
            fmt("%zu points, max rel err %.3g (limit 1e-8), %zu below DBL_MIN, %zu failures, %.2fs (limit 10s)",
                grid.size(), worst, subnormal, failures, elapsed)};
}

Verdict reduction_identity() {
    const auto grid = pricing_grid();
    double worst = 0.0;
    for (const auto& p : grid) {
        const double diff = std::abs(qbs::qbs_call_price(p.in, {1.0, p.sigma, KMode::Wiener}) -
                                     qbs::bs_call_price(p.in, p.sigma));
        worst = std::max(worst, diff);
    }
    return {worst <= 1e-12, fmt("%zu points, max |qbs - bs| %.3g (limit 1e-12)", grid.size(), worst)};
}

Verdict boundary_suite() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> spot(1.0, 200.0), strike(1.0, 200.0), years(1.0 / 252.0, 2.0),
        sigma(0.05, 1.0);
    const qbs::SampledPath unit_gamma = qbs::SampledPath::constant(1.0, 600);
    double worst = 0.0;
    int cases = 0;
    for (int i = 0; i < 500; ++i) {
        const double S = spot(rng), K = strike(rng), T = years(rng), s = sigma(rng);
        const qbs::QuantumVolParams q{1.0, s, KMode::Wiener};
        const auto path = qbs::VolatilityPath::constant(s, 600);
        const std::vector<std::function<double(const PricingInputs&)>> pricers{
            [&](const PricingInputs& in) { return qbs::bs_call_price(in, s); },
            [&](const PricingInputs& in) { return qbs::qbs_call_price(in, q); },
            [&](const PricingInputs& in) { return qbs::bs_call_price_td(in, path); },
            [&](const PricingInputs& in) { return qbs::qbs_call_price_td(in, unit_gamma, path, KMode::Wiener); },
        };
        for (const auto& price : pricers) {
            worst = std::max(worst, std::abs(price({S, K, 0.0, kRate}) - std::max(S - K, 0.0)));
            worst = std::max(worst, std::abs(price({0.0, K, T, kRate})));
            worst = std::max(worst, std::abs(price({S, 0.0, T, kRate}) - S));
            worst = std::max(worst, std::abs(price({S, 1e-15, T, kRate}) - S));
            cases += 4;
        }
    }
    return {worst <= 1e-12, fmt("%d checks over bs, qbs, bs-td, qbs-td, max deviation %.3g (limit 1e-12)",
                                cases, worst)};
}

Verdict riemann_exactness() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> moneyness(0.5, 2.0), sigma(0.05, 1.0), gamma(1.0, 2.0);
    std::uniform_int_distribution<int> days(1, 504);
    // Tolerance 1e-14 scaled by max(1, |price|): above 1 it is a relative bound,
    // since one ulp of a price of 64 or more already exceeds 1e-14.
    double worst_abs = 0.0;
    double worst_scaled = 0.0;
    const auto record = [&](double td, double constant) {
        const double diff = std::abs(td - constant);
        worst_abs = std::max(worst_abs, diff);
        worst_scaled = std::max(worst_scaled, diff / std::max(1.0, std::abs(constant)));
    };
    for (int i = 0; i < 100; ++i) {
        const int n = days(rng);
        const PricingInputs in{100.0 * moneyness(rng), 100.0, n / 252.0, kRate};
        const double s = sigma(rng);
        const double g = gamma(rng);
        const KMode mode = i % 2 == 0 ? KMode::Wiener : KMode::SerialCorrelated;
        const auto path = qbs::VolatilityPath::constant(s, static_cast<std::size_t>(n));
        const auto gammas = qbs::SampledPath::constant(g, static_cast<std::size_t>(n));
        record(qbs::bs_call_price_td(in, path), qbs::bs_call_price(in, s));
        record(qbs::qbs_call_price_td(in, gammas, path, mode), qbs::qbs_call_price(in, {g, s, mode}));
    }
    return {worst_scaled <= 1e-14,
            fmt("100 cases (bs-td and qbs-td), max |td - constant| / max(1, price) %.3g (limit 1e-14), "
                "max absolute %.3g",
                worst_scaled, worst_abs)};
}

Verdict calibration_round_trip() {
    const auto start = Clock::now();
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> moneyness(0.8, 1.25), sigma(0.1, 0.6);
    std::uniform_int_distribution<int> days(5, 252), level(1, 10), coin(0, 1);
    double worst = 0.0;
    int wrong_regime = 0;
    int imaginary = 0;
    for (int i = 0; i < 500; ++i) {
        const PricingInputs in{100.0 * moneyness(rng), 100.0, days(rng) / 252.0, kRate};
        const double pub = sigma(rng);
        const double im_f = 0.05 * level(rng);
        const KMode mode = coin(rng) ? KMode::Wiener : KMode::SerialCorrelated;
        // Subtract the non-classical variance when enough public variance remains.
        const bool sub = coin(rng) && pub * pub - im_f * im_f >= 0.05 * 0.05;
        const double s = sub ? std::sqrt(pub * pub - im_f * im_f) : std::hypot(pub, im_f);
        const double market = qbs::qbs_call_price(in, {1.0, s, mode});
        const auto r = qbs::calibrate_im_f(in, market, pub, 1.0, mode);
        worst = std::max(worst, std::abs(r.im_f - im_f));
        if (r.regime != (sub ? Regime::Imaginary : Regime::Real)) {
            ++wrong_regime;
        }
        imaginary += sub;
    }
    const double elapsed = seconds_since(start);
    return {worst <= 1e-6 && wrong_regime == 0 && elapsed < 5.0,
            fmt("500 cases (%d imaginary), max |im_f error| %.3g (limit 1e-6), %d wrong regimes, %.2fs (limit 5s)",
                imaginary, worst, wrong_regime, elapsed)};
}

Verdict regime_classification() {
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> moneyness(0.8, 1.25), sigma(0.1, 0.6), shift(0.02, 0.5);
    std::uniform_int_distribution<int> days(5, 252);
    int wrong = 0;
    int cases = 0;
    for (int i = 0; i < 100; ++i) {
        const PricingInputs in{100.0 * moneyness(rng), 100.0, days(rng) / 252.0, kRate};
        const double pub = sigma(rng);
        const double classical = qbs::bs_call_price(in, pub);
        const double over = qbs::bs_call_price(in, pub * (1.0 + shift(rng)));
        const double under = qbs::bs_call_price(in, pub * (1.0 - 0.5 * shift(rng)));
        const struct {
            double market;
            Regime expected;
        } constructed[] = {{over, Regime::Real}, {under, Regime::Imaginary}, {classical, Regime::Zero}};
        for (const auto& c : constructed) {
            const bool consistent = (c.expected == Regime::Real) == (c.market > classical) &&
                                    (c.expected == Regime::Imaginary) == (c.market < classical);
            if (!consistent || qbs::calibrate_im_f(in, c.market, pub).regime != c.expected) {
                ++wrong;
            }
            ++cases;
        }
    }
    return {wrong == 0 && cases == 300, fmt("%d constructed cases, %d misclassified", cases, wrong)};
}

Verdict vix_fixture() {
    const qbs::VixInputs bundled{qbs::load_chain(kData / "spx_chain.csv"), 30.0 / 365.0, kRate};
    const double vix = qbs::compute_vix(bundled);
    const double gap = std::abs(vix - frozen::kBundledChainVix);

    // Zero-spread chain: every Q(K) is zero.
    std::vector<qbs::ChainQuote> flat{{90.0, 10.6, 0.4, 0.0}, {95.0, 6.4, 1.2, 0.0}, {100.0, 2.5, 2.5, 0.0},
                                      {105.0, 1.2, 6.4, 0.0}, {110.0, 0.4, 10.6, 0.0}};
    const double at_k0 = qbs::compute_vix({flat, 30.0 / 365.0, kRate});
    flat[2].call_mid = 3.0;
    const qbs::VixInputs shifted{flat, 30.0 / 365.0, kRate};
    const auto b = qbs::vix_breakdown(shifted);
    const double expected = -(b.forward / b.k0 - 1.0) * (b.forward / b.k0 - 1.0) / shifted.time_to_expiration;
    bool rejected = false;
    try {
        qbs::compute_vix(shifted);
    } catch (const qbs::DomainError&) {
        rejected = true;
    }
    const double closed_form_gap = std::abs(b.variance - expected);
    return {gap <= 1e-10 && at_k0 == 0.0 && closed_form_gap <= 1e-15 && rejected,
            fmt("bundled chain VIX %.12g vs oracle %.12g (|diff| %.3g, limit 1e-10); zero-spread chain: "
                "VIX %.3g at F=K0, sigma^2 off closed form by %.3g, negative variance %s",
                vix, frozen::kBundledChainVix, gap, at_k0, closed_form_gap, rejected ? "rejected" : "accepted")};
}

Verdict calibration_constants() {
    const auto cfg = qbs::load_config(kData / "config.txt");
    const std::string betas = slurp(kData / "betas.csv");
    const bool text_ok = betas.find("\nAAL,1.71\n") != std::string::npos &&
                         betas.find("\nBRK-B,0.84\n") != std::string::npos &&
                         betas.find("\nWMT,0.40\n") != std::string::npos;
    const bool rate_ok = cfg.rate == 0.0008 && qbs::RunConfig{}.rate == 0.0008 &&
                         qbs::SeriesSettings{}.rate == 0.0008;
    const bool beta_ok = cfg.beta_table.at("AAL") == 1.71 && cfg.beta_table.at("BRK-B") == 0.84 &&
                         cfg.beta_table.at("WMT") == 0.40 && cfg.beta_table == qbs::default_beta_table();
    return {text_ok && rate_ok && beta_ok,
            fmt("rate %.4g (default %.4g), AAL %.2f, BRK-B %.2f, WMT %.2f from %s", cfg.rate,
                qbs::RunConfig{}.rate, cfg.beta_table.at("AAL"), cfg.beta_table.at("BRK-B"),
                cfg.beta_table.at("WMT"), cfg.beta_table_path.filename().c_str())};
}

Verdict end_to_end() {
    qbs::cli::PipelineArgs args;
    args.config = kData / "config.txt";
    args.spec = kData / "aal_call_13.spec";
    args.stock = kData / "aal_stock.csv";
    args.option = kData / "aal_call_13.csv";
    args.vix = kData / "vix.csv";
    std::ostringstream err;
    const auto start = Clock::now();
    const auto outcome = qbs::cli::cmd_calibrate(args, err);
    const double elapsed = seconds_since(start);
    const std::string fixture = slurp(kFixtures / "aal_13_calibrate.csv");
    const bool same = !fixture.empty() && outcome.report == fixture;
    return {outcome.exit_code == 0 && same && elapsed < 2.0,
            fmt("exit %d, %zu bytes, %s frozen fixture, %.3fs (limit 2s)", outcome.exit_code,
                outcome.report.size(), same ? "identical to" : "DIFFERS from", elapsed)};
}

}  // namespace

int main() {
    const struct {
        const char* name;
        Verdict (*run)();
    } criteria[] = {
        {"oracle equivalence", oracle_equivalence},
        {"reduction identity", reduction_identity},
        {"boundary suite", boundary_suite},
        {"Riemann exactness", riemann_exactness},
        {"calibration round-trip", calibration_round_trip},
        {"regime classification", regime_classification},
        {"VIX fixture", vix_fixture},
        {"calibration constants", calibration_constants},
        {"end-to-end pipeline", end_to_end},
    };
    int failed = 0;
    int index = 0;
    for (const auto& c : criteria) {
        ++index;
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", index, c.name, v.detail.c_str());
        failed += v.pass ? 0 : 1;
    }
    std::printf("%d/%d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
