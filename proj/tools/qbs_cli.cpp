// qbs: command-line front end for pricing, calibration and VIX computation.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qbs/cli/commands.hpp"

namespace {

void add_pipeline_flags(CLI::App& cmd, qbs::cli::PipelineArgs& a, bool with_option) {
    cmd.add_option("--config", a.config, "Run configuration (key=value)");
    cmd.add_option("--spec", a.spec, "Option spec file (ticker, strike, issue, expiry)");
    cmd.add_option("--stock", a.stock, "Stock closes CSV (date,value)");
    if (with_option) {
        cmd.add_option("--option", a.option, "Option closes CSV (date,value)");
    }
    cmd.add_option("--vix", a.vix, "VIX closes CSV (date,value)");
    cmd.add_option("--beta-table", a.beta_table, "Beta table CSV (ticker,beta)");
    cmd.add_option("--ticker", a.ticker, "Ticker symbol");
    cmd.add_option("--strike", a.strike, "Strike price");
    cmd.add_option("--issue", a.issue, "Issuance date (YYYY-MM-DD)");
    cmd.add_option("--expiry", a.expiry, "Maturity date (YYYY-MM-DD)");
    cmd.add_option("--gamma", a.gamma, "Scale gamma >= 1 (default 1)");
    cmd.add_option("--k-mode", a.k_mode, "wiener (k = s^2) or serial (k = 0)");
    cmd.add_option("--rate", a.rate, "Annual continuously compounded rate (default 0.0008)");
}

int emit(const qbs::cli::CommandOutcome& outcome, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << outcome.report;
    } else if (!outcome.report.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write '" << out_path << "'\n";
            return qbs::cli::kExitInputError;
        }
        out << outcome.report;
    }
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Black-Scholes and expanded (complex volatility) call pricing and calibration"};
    app.require_subcommand(1);
    std::string out_path;

    qbs::cli::PipelineArgs price_args;
    auto* price = app.add_subcommand("price", "Daily model prices over the option window");
    add_pipeline_flags(*price, price_args, false);
    price->add_option("--model", price_args.model, "bs | bs-td | qbs | qbs-td")
        ->check(CLI::IsMember({"bs", "bs-td", "qbs", "qbs-td"}));
    price->add_option("--im-f", price_args.im_f, "Constant Im f(T) for the qbs models (default 0)");
    price->add_option("--out", out_path, "Write CSV here instead of standard output");

    qbs::cli::PipelineArgs calibrate_args;
    auto* calibrate = app.add_subcommand("calibrate", "Per-day implied s* and Im f(T)");
    add_pipeline_flags(*calibrate, calibrate_args, true);
    calibrate->add_option("--out", out_path, "Write CSV here instead of standard output");

    qbs::cli::PipelineArgs compare_args;
    auto* compare = app.add_subcommand("compare", "Market vs classical vs calibrated prices");
    add_pipeline_flags(*compare, compare_args, true);
    compare->add_option("--out", out_path, "Write CSV here instead of standard output");

    qbs::cli::VixArgs vix_args;
    auto* vix = app.add_subcommand("vix", "Single-expiry VIX from an option chain");
    vix->add_option("--chain", vix_args.chain, "Chain CSV (strike,call_mid,put_mid,q_mid)")->required();
    vix->add_option("--time", vix_args.years, "Time to expiration in years");
    vix->add_option("--days", vix_args.calendar_days, "Time to expiration in calendar days (/365)");
    vix->add_option("--rate", vix_args.rate, "Risk-free rate R (default from config or 0.0008)");
    vix->add_option("--config", vix_args.config, "Run configuration (key=value)");
    vix->add_option("--out", out_path, "Write output here instead of standard output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qbs::cli::kExitInputError;
    }

    if (*price) return emit(qbs::cli::cmd_price(price_args, std::cerr), out_path);
    if (*calibrate) return emit(qbs::cli::cmd_calibrate(calibrate_args, std::cerr), out_path);
    if (*compare) return emit(qbs::cli::cmd_compare(compare_args, std::cerr), out_path);
    return emit(qbs::cli::cmd_vix(vix_args, std::cerr), out_path);
}
