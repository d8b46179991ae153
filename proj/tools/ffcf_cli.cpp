#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ffcf/harness.hpp"

namespace {

using ffcf::harness::Format;
using ffcf::harness::RunConfig;

int emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open " << cfg.out << " for writing\n";
        return 1;
    }
    f << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continued fractions over F_q((1/X)) and isotropic-form counting experiments"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::uint64_t q = 0;
    std::string format = "table", delta = "q^-1", k = "q^1", rho = "q^6", rho_min;

    app.add_option("--q", q, "Field size q = p^r (odd); default modulus")->group("Field");
    app.add_option("--p", cfg.p, "Characteristic (odd prime)")->group("Field");
    app.add_option("--r", cfg.r, "Extension degree")->group("Field");
    app.add_option("--modulus", cfg.modulus, "Monic irreducible over F_p, e.g. x^2+1")->group("Field");
    app.add_option("--format", format, "table, csv or json")->group("Output");
    app.add_option("--out", cfg.out, "Write the report to this file")->group("Output");
    app.add_option("--seed", cfg.seed, "RNG seed (xoshiro256**)")->group("Run");
    app.add_option("--budget", cfg.budget, "Maximum brute-force pair evaluations")->group("Run");
    app.add_option("--threads", cfg.threads, "Worker threads (0 = hardware concurrency)")->group("Run");
    app.add_option("--alpha", cfg.alpha, "Value literal: rat:P/Q, coeffs:j0:e1,..., cf:[..], cfper:[..|..], haar[:N], poly")
        ->group("Input");
    app.add_option("--form", cfg.form, "form:a=..;b=..;c=..;d=..")->group("Input");
    app.add_option("--precision", cfg.precision, "Known coefficients for inexact values")->group("Input");
    app.add_option("--n", cfg.n, "Number of partial quotients")->group("Input");
    app.add_option("--delta", delta, "delta = q^m (m <= -1)")->group("Thresholds");
    app.add_option("--k", k, "k = q^e (e >= 1)")->group("Thresholds");
    app.add_option("--rho", rho, "rho = q^R (largest R for count)")->group("Thresholds");
    app.add_option("--rho-min", rho_min, "Smallest R for count (default e_k + 1)")->group("Thresholds");
    app.add_option("--depth", cfg.depth, "Continued fraction depth")->group("Experiments");
    app.add_option("--samples", cfg.samples, "Monte Carlo samples")->group("Experiments");
    app.add_option("--levels", cfg.levels, "Largest l in freq(deg b >= l)")->group("Experiments");
    app.add_flag("--allow-rational", cfg.allow_rational, "Accept rational alpha (diagnostic mode)")->group("Experiments");

    const char* subcommands[][2] = {
        {"cf", "Partial quotients, convergents, certification depth and identity checks"},
        {"identities", "Exact continued fraction identities at every index"},
        {"count", "#G (brute force) and #G' per R with the exact measure"},
        {"measure", "Closed-form and shell-sum Haar measure of H(rho)"},
        {"montecarlo", "Haar-random statistics of partial-quotient degrees"},
        {"theorem", "Ratio #G'/eta against the predicted band per depth"},
    };
    for (const auto& sc : subcommands) app.add_subcommand(sc[0], sc[1])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        cfg.format = ffcf::harness::parse_format(format);
    } catch (const ffcf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    try {
        if (q != 0) cfg.q = q;
        cfg.m = ffcf::parse_q_power(delta);
        cfg.e_k = ffcf::parse_q_power(k);
        cfg.R = ffcf::parse_q_power(rho);
        if (!rho_min.empty()) cfg.R_min = ffcf::parse_q_power(rho_min);
        const auto report = ffcf::harness::run_command(command, cfg);
        return emit(cfg, report.render(cfg.format));
    } catch (const ffcf::Error& e) {
        const std::string text = ffcf::harness::render_error(cfg, command, e, cfg.format);
        if (cfg.format == Format::Json) {
            emit(cfg, text);
        } else {
            std::cerr << text;
        }
        return ffcf::harness::exit_code(e.code());
    }
}
