// verify.hpp
// Self-check suites behind `phasekey verify`. Each check compares the library
// against an oracle from oracles.hpp or against a closed-form expectation.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasekey/montecarlo.hpp"
#include "phasekey/optimizer.hpp"
#include "phasekey/oracles.hpp"
#include "phasekey/protocol.hpp"
#include "phasekey/qstate.hpp"
#include "phasekey/security.hpp"

namespace phasekey::verify {

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;
    double seconds = 0.0;

    bool passed() const {
        for (const auto& c : checks) {
            if (!c.passed) return false;
        }
        return true;
    }
};

struct VerifyOptions {
    // Replaceable so that a deliberately wrong formula can be fed in as a negative control.
    std::function<double(double, double)> lambda_1x = lambda_1x_closed_form;
    std::uint64_t seed = 20240611;
    std::uint64_t mc_trials = 200000;
    int grid_points = 2000;
    int random_bound_sets = 5;
};

inline std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

inline Check max_error_check(std::string name, double max_err, double tol) {
    return {std::move(name), max_err <= tol, fmt("max |err| = %.3e (tol %.1e)", max_err, tol)};
}

/// Random observable sets drawn from physical operating conditions.
inline std::vector<std::pair<Observables, double>> random_observable_sets(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_mu(std::log(1.0), std::log(400.0));
    std::uniform_real_distribution<double> dist(0.0, 100.0);
    std::uniform_real_distribution<double> delta(0.005, 0.06);
    std::vector<std::pair<Observables, double>> out;
    for (int i = 0; i < count; ++i) {
        const double d = delta(rng);
        const ProtocolParams p{std::exp(log_mu(rng)), d, channel_eta(dist(rng)), kDefaultDarkCount};
        out.emplace_back(observables(p), d);
    }
    return out;
}

// ---------------------------------------------------------------------------

inline SuiteReport fock_suite(const VerifyOptions& opt) {
    SuiteReport r{"fock", {}, 0.0};

    double err = 0.0;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            const double mu = 0.2 + (4.0 - 0.2) * i / 4.0;
            const double delta = 0.02 + (0.5 - 0.02) * j / 4.0;
            err = std::max(err, std::abs(opt.lambda_1x(mu, delta) - oracles::lambda_1x_fock(mu, delta)));
        }
    }
    r.checks.push_back(max_error_check("lambda_1x closed form vs Fock oracle (25 points)", err, 1e-9));

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> radius(0.0, 3.0);
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    err = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto a = std::polar(radius(rng), phase(rng));
        const auto b = std::polar(radius(rng), phase(rng));
        const auto got = qstate::inner(qstate::make_coherent(a, 80), qstate::make_coherent(b, 80));
        err = std::max(err, std::abs(got - oracles::coherent_overlap_exact(a, b)));
    }
    r.checks.push_back(max_error_check("coherent overlap identity (50 random pairs)", err, 1e-9));

    err = 0.0;
    for (double mu : {0.5, 1.0, 2.0}) {
        for (double delta : {0.05, 0.2}) {
            const auto v = filtered_joint_state(mu, delta);
            err = std::max(err, std::abs(1.0 - qstate::y_mes_fidelity_up_to_local_phase(v)));
            const auto sc = qstate::schmidt_coefficients(v);
            err = std::max({err, std::abs(sc[0] - std::sqrt(0.5)), std::abs(sc[1] - std::sqrt(0.5))});
        }
    }
    r.checks.push_back(max_error_check("filtered state is a Y-basis MES (6 points)", err, 1e-12));

    err = 0.0;
    for (double delta : {0.01, 0.1, 0.5}) {
        const auto kit = measurement_kit(delta);
        using qstate::QubitOperator;
        const auto fs_dag_fs = kit.f_s.adjoint() * kit.f_s;
        err = std::max(err, max_abs_diff(kit.f0 + kit.f1 + kit.f_inconc, QubitOperator::identity()));
        err = std::max(err, max_abs_diff(kit.f_inconc, QubitOperator::identity() - fs_dag_fs));
        for (int j = 0; j < 2; ++j) {
            const auto fj = j == 0 ? kit.f0 : kit.f1;
            const auto target = QubitOperator::projector(qstate::apply(kit.f_s.adjoint(), qstate::y_ket(j)));
            err = std::max(err, max_abs_diff(fj, target));
        }
        for (const auto* op : {&kit.f0, &kit.f1, &kit.f_inconc}) {
            const auto ev = op->hermitian_eigenvalues();
            err = std::max(err, std::max(0.0, -ev[0]));
        }
    }
    r.checks.push_back(max_error_check("POVM and filter identities", err, 1e-12));
    return r;
}

inline SuiteReport security_suite(const VerifyOptions& opt) {
    SuiteReport r{"security", {}, 0.0};

    double err = 0.0;
    for (double delta : {0.01, 0.1, 0.5, 1.2}) {
        const auto ref = oracles::adjugate_inverse(oracles::constraint_rows(delta));
        const auto cm = security::c_matrix(delta);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) err = std::max(err, std::abs(cm.c(i, j) - ref[i][j]));
        }
        err = std::max(err, std::abs(oracles::det4(oracles::constraint_rows(delta)) - oracles::constraint_determinant(delta)));
    }
    r.checks.push_back(max_error_check("constraint matrix inverse vs adjugate", err, 1e-10));

    auto sets = random_observable_sets(opt.random_bound_sets, opt.seed);
    for (const auto& [l, mu] : {std::pair{40.0, 75.0}, std::pair{60.0, 225.0}}) {
        const double delta = mu < 100.0 ? std::numbers::pi / 100.0 : std::numbers::pi / 300.0;
        sets.emplace_back(observables({mu, delta, channel_eta(l), kDefaultDarkCount}), delta);
    }
    err = 0.0;
    for (const auto& [obs, delta] : sets) {
        const auto grid = oracles::brute_force_phase_bound(obs, delta, opt.grid_points);
        const auto b = security::phase_error_bound(obs, delta);
        const double solver = b.feasible ? b.lambda_ph_bar : -1.0;
        const double ref = grid.lambda_ph < 0.0 ? -1.0 : grid.lambda_ph;
        err = std::max(err, std::abs(solver - ref));
    }
    r.checks.push_back(max_error_check("phase-error bound vs brute-force grid", err, 1e-6));

    err = 0.0;
    for (double x : {0.0, 1e-6, 0.01, 0.11, 0.3, 0.5, 0.9, 1.0}) {
        err = std::max(err, std::abs(security::binary_entropy(x) - oracles::entropy_bits(x)));
    }
    r.checks.push_back(max_error_check("binary entropy", err, 1e-12));
    return r;
}

inline SuiteReport montecarlo_suite(const VerifyOptions& opt) {
    using namespace montecarlo;
    SuiteReport r{"montecarlo", {}, 0.0};
    const std::uint64_t n = opt.mc_trials;

    double worst = 0.0;
    for (const auto& p : {ProtocolParams{0.5, 0.3, 1.0, 0.0}, ProtocolParams{75.0, std::numbers::pi / 100.0,
                                                                             channel_eta(40.0), kDefaultDarkCount}}) {
        const auto s = run_trials(p, {}, n, opt.seed);
        const auto o = observables(p);
        for (const auto& [count, expect] : {std::pair{s.n_conclusive, o.lambda_fil}, std::pair{s.n_single_photon, o.lambda_s},
                                            std::pair{s.n_monitor_click, expected_monitor_click_rate(p)}}) {
            const double sigma = std::sqrt(expect * (1.0 - expect) / static_cast<double>(n));
            const double z = sigma > 0.0 ? std::abs(s.fraction(count) - expect) / sigma : (count == 0 ? 0.0 : 1e9);
            worst = std::max(worst, z);
        }
    }
    r.checks.push_back({"empirical rates within 4 sigma", worst <= 4.0, fmt("worst |z| = %.2f", worst)});

    const ProtocolParams p{0.5, 0.3, 1.0, 0.0};
    const bool same = run_trials(p, {}, 50000, opt.seed, 1) == run_trials(p, {}, 50000, opt.seed, 4);
    r.checks.push_back({"seeded runs identical across thread counts", same, ""});

    const ProtocolParams link{75.0, std::numbers::pi / 100.0, channel_eta(40.0), kDefaultDarkCount};
    AttackModel usd{AttackKind::usd_vacuum, 0.0, 0.01};
    const auto attacked = run_trials(link, usd, 100000, opt.seed);
    const bool aborted = abort_decision(attacked, expected_monitor_click_rate(link)) == AbortDecision::abort;
    r.checks.push_back({"USD-vacuum attack triggers abort", aborted, ""});
    return r;
}

inline std::vector<SuiteReport> run(const std::string& suite, const VerifyOptions& opt = {}) {
    using clock = std::chrono::steady_clock;
    std::vector<std::function<SuiteReport(const VerifyOptions&)>> todo;
    if (suite == "fock" || suite == "all") todo.emplace_back(fock_suite);
    if (suite == "security" || suite == "all") todo.emplace_back(security_suite);
    if (suite == "montecarlo" || suite == "all") todo.emplace_back(montecarlo_suite);
    if (todo.empty()) throw std::invalid_argument("verify: unknown suite '" + suite + "'");
    std::vector<SuiteReport> out;
    for (const auto& f : todo) {
        const auto t0 = clock::now();
        out.push_back(f(opt));
        out.back().seconds = std::chrono::duration<double>(clock::now() - t0).count();
    }
    return out;
}

/// Sign-flipped Lambda_1x used as the negative control.
inline double tampered_lambda_1x(double mu, double delta) {
    const double s = std::sin(delta);
    return 0.5 * (1.0 - std::exp(-2.0 * mu * s * s) * std::sin(mu * std::sin(2.0 * delta)));
}

}  // namespace phasekey::verify
