// phasekey command-line tool.
//
//   phasekey bound    --mu 75 --Delta pi/50 --l 40
//   phasekey sweep    --Delta pi/50 --out rate.csv
//   phasekey maxdist  --Delta pi/150
//   phasekey simulate --mu 0.5 --delta 0.3 --l 0 --trials 1e6 --attack usd_vacuum --usd-success 0.01
//   phasekey verify   --suite all
//
// Exit status: 0 ok, 1 bad configuration, 2 verification failure, 3 I/O error.

#include <cstdio>
#include <exception>
#include <iostream>

#include "phasekey/montecarlo.hpp"
#include "phasekey/optimizer.hpp"
#include "phasekey/report.hpp"
#include "phasekey/run_config.hpp"
#include "phasekey/verify.hpp"

using namespace phasekey;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSuite = 2;
constexpr int kExitIo = 3;

// Share of conclusive events sacrificed to estimate the bit error rate.
constexpr double kTestFraction = 0.5;

void line(const char* key, double v) { std::printf("%-22s %.9e\n", key, v); }

int run_bound(const cli::RunConfig& cfg) {
    const auto op = optimizer::evaluate(cfg.l, cfg.mu, cfg.delta, cfg.p_dark);
    line("l_km", cfg.l);
    line("eta", op.params.eta);
    line("mu", cfg.mu);
    line("delta", cfg.delta);
    line("lambda_s", op.obs.lambda_s);
    line("lambda_fil", op.obs.lambda_fil);
    line("lambda_bit", op.obs.lambda_bit);
    line("lambda_1x", op.obs.lambda_1x);
    line("lambda_ph_bar", op.bound.lambda_ph_bar);
    line("p1_star", op.bound.p1_star);
    std::printf("%-22s %d\n", "saturated", op.bound.saturated ? 1 : 0);
    std::printf("%-22s %d\n", "feasible", op.bound.feasible ? 1 : 0);
    line("g_rate", op.g_rate);
    line("monitor_miss", monitor_miss_probability(op.params));
    const auto rule = optimizer::sanity_design_rule(cfg.l, cfg.delta, cfg.mu);
    std::printf("design rule: mu >= 1/eta = %.4g (%s), delta <= sqrt(eta) = %.4g (%s)\n", rule.mu_min,
                rule.mu_ok ? "met" : "not met", rule.delta_max, rule.delta_ok ? "met" : "not met");
    return kExitOk;
}

int run_sweep(const cli::RunConfig& cfg) {
    optimizer::SweepConfig sc;
    sc.delta = cfg.delta;
    sc.l_min = cfg.l_min;
    sc.l_max = cfg.l_max;
    sc.l_step = cfg.l_step;
    sc.p_dark = cfg.p_dark;
    const auto points = optimizer::sweep_distance(sc);
    if (cfg.out.empty()) {
        cli::write_sweep_csv(std::cout, points);
        std::cout.flush();
        if (!std::cout) throw cli::IoError("write to standard output failed");
    } else {
        cli::emit_sweep_csv(points, cfg.out);
        std::fprintf(stderr, "wrote %zu rows to %s\n", points.size(), cfg.out.c_str());
    }
    return kExitOk;
}

int run_maxdist(const cli::RunConfig& cfg) {
    const auto md = optimizer::max_distance(cfg.delta, cfg.p_dark, cfg.precision);
    std::printf("Delta = %.9e rad\n", 2.0 * cfg.delta);
    if (!md.feasible) {
        std::printf("no positive key rate at any scanned distance\n");
    } else {
        std::printf("max_distance_km = %.3f (bracket width %.3g km)\n", md.l_km, cfg.precision);
    }
    return kExitOk;
}

int run_simulate(const cli::RunConfig& cfg) {
    using namespace montecarlo;
    const ProtocolParams params{cfg.mu, cfg.delta, channel_eta(cfg.l), cfg.p_dark};
    const auto stats = run_trials(params, cfg.attack, cfg.trials, cfg.seed);
    const auto obs = observables(params);
    std::printf("trials %llu, seed %llu\n", static_cast<unsigned long long>(stats.n_trials),
                static_cast<unsigned long long>(stats.seed));
    std::printf("%-16s %12s %16s %16s\n", "event", "count", "fraction", "honest expect");
    const auto row = [&](const char* name, std::uint64_t count, double expect) {
        std::printf("%-16s %12llu %16.6e %16.6e\n", name, static_cast<unsigned long long>(count),
                    stats.fraction(count), expect);
    };
    row("conclusive", stats.n_conclusive, obs.lambda_fil);
    row("inconclusive", stats.n_inconclusive, expected_inconclusive_rate(params));
    row("loss", stats.n_loss, 1.0 - obs.lambda_fil - expected_inconclusive_rate(params));
    row("single_photon", stats.n_single_photon, obs.lambda_s);
    row("monitor_click", stats.n_monitor_click, expected_monitor_click_rate(params));
    row("monitor_single", stats.n_monitor_single, 1.0 - monitor_miss_probability(params));
    row("bit_error", stats.n_bit_error, obs.lambda_bit);

    const auto decision = abort_decision(stats, expected_monitor_click_rate(params));
    std::printf("monitor check: %s\n", decision == AbortDecision::abort ? "ABORT" : "continue");
    const auto est = estimate_bit_error(stats, kTestFraction, cfg.seed);
    if (est) {
        std::printf("bit error estimate: %.6e from %llu test bits (95%% Wilson %.6e +/- %.6e)\n", est->rate,
                    static_cast<unsigned long long>(est->n_tested), est->wilson_center, est->half_width);
    } else {
        std::printf("bit error estimate: undefined (no conclusive events)\n");
    }
    return kExitOk;
}

int run_verify(const cli::RunConfig& cfg) {
    verify::VerifyOptions opt;
    if (cfg.tamper_lambda_1x) opt.lambda_1x = verify::tampered_lambda_1x;
    const auto reports = verify::run(cfg.suite, opt);
    bool ok = true;
    double total = 0.0;
    for (const auto& r : reports) {
        for (const auto& c : r.checks) {
            std::printf("[%s] %s: %s  %s\n", c.passed ? "PASS" : "FAIL", r.suite.c_str(), c.name.c_str(),
                        c.detail.c_str());
        }
        std::printf("suite %s: %s (%.1f s)\n", r.suite.c_str(), r.passed() ? "ok" : "FAILED", r.seconds);
        ok = ok && r.passed();
        total += r.seconds;
    }
    if (total > 300.0) std::printf("note: verification took %.0f s, over the 5 minute budget\n", total);
    return ok ? kExitOk : kExitSuite;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        const auto cfg = cli::parse_config(argc, argv);
        if (cfg.show_help) {
            std::cout << cfg.help_text;
            return kExitOk;
        }
        switch (cfg.subcommand) {
            case cli::Subcommand::bound: return run_bound(cfg);
            case cli::Subcommand::sweep: return run_sweep(cfg);
            case cli::Subcommand::maxdist: return run_maxdist(cfg);
            case cli::Subcommand::simulate: return run_simulate(cfg);
            case cli::Subcommand::verify: return run_verify(cfg);
        }
    } catch (const cli::IoError& e) {
        std::fprintf(stderr, "phasekey: %s\n", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "phasekey: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "phasekey: %s\n", e.what());
        return kExitConfig;
    }
    return kExitConfig;
}
