// optimizer.hpp
// Intensity optimization per distance, distance sweeps and the achievable-distance search.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "phasekey/parallel.hpp"
#include "phasekey/protocol.hpp"
#include "phasekey/scalar_search.hpp"
#include "phasekey/security.hpp"

namespace phasekey::optimizer {

/// n log-spaced values over [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0 && hi > lo) || n < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

inline std::vector<double> default_mu_grid() { return log_grid(1.0, 1e7, 200); }

inline void validate_mu_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("mu grid is empty");
    if (!(grid.front() > 0.0)) throw std::invalid_argument("mu grid must be positive");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("mu grid must be strictly increasing");
    }
}

/// Intensities where Lambda_1x has its first few local minima,
///   mu_k = (3 pi / 2 + 2 pi k) / sin(2 delta).
/// Near the achievable-distance limit G > 0 only in narrow windows around these.
inline std::vector<double> lambda_1x_minima(double delta, double mu_lo, double mu_hi, int count = 4) {
    std::vector<double> out;
    const double s = std::sin(2.0 * delta);
    if (!(s > 0.0)) return out;
    for (int k = 0; k < count; ++k) {
        const double mu = (1.5 * std::numbers::pi + 2.0 * std::numbers::pi * k) / s;
        if (mu > mu_hi) break;
        if (mu >= mu_lo) out.push_back(mu);
    }
    return out;
}

/// The configured grid merged with the Lambda_1x minima inside its range.
inline std::vector<double> candidate_mus(const std::vector<double>& grid, double delta) {
    std::vector<double> all = grid;
    const auto extra = lambda_1x_minima(delta, grid.front(), grid.back());
    all.insert(all.end(), extra.begin(), extra.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

struct SweepConfig {
    double delta = std::numbers::pi / 100.0;
    double l_min = 0.0;
    double l_max = 120.0;
    double l_step = 1.0;
    std::vector<double> mu_grid = default_mu_grid();
    double p_dark = kDefaultDarkCount;
    int refine_iters = 60;

    void validate() const {
        if (!(l_min >= 0.0 && l_min <= l_max)) throw std::invalid_argument("SweepConfig: need 0 <= l_min <= l_max");
        if (!(l_step > 0.0)) throw std::invalid_argument("SweepConfig: l_step must be positive");
        if (refine_iters < 0) throw std::invalid_argument("SweepConfig: refine_iters must be >= 0");
        validate_mu_grid(mu_grid);
    }

    std::vector<double> distances() const {
        const auto n = static_cast<std::size_t>(std::floor((l_max - l_min) / l_step + 1e-9)) + 1;
        std::vector<double> ls(n);
        for (std::size_t i = 0; i < n; ++i) ls[i] = l_min + l_step * static_cast<double>(i);
        return ls;
    }
};

/// Everything known about the protocol at one (distance, intensity) point.
struct OperatingPoint {
    ProtocolParams params;
    Observables obs;
    security::SecurityBound bound;
    double g_rate = 0.0;
};

inline OperatingPoint evaluate(double l_km, double mu, double delta, double p_dark) {
    OperatingPoint op;
    op.params = ProtocolParams{mu, delta, channel_eta(l_km), p_dark};
    op.obs = observables(op.params);
    op.bound = security::phase_error_bound(op.obs, delta);
    op.g_rate = security::key_rate(op.obs, op.bound);
    return op;
}

struct MuOptimum {
    OperatingPoint point;
    bool no_key = true;

    double mu_opt() const { return point.params.mu; }
    double g_rate() const { return point.g_rate; }
};

/// Maximizes G over the grid (plus the Lambda_1x minima), then refines by
/// golden section in log(mu) between the neighbours of the best candidate.
inline MuOptimum optimize_mu(double l_km, double delta, double p_dark, const std::vector<double>& grid,
                             int refine_iters) {
    validate_mu_grid(grid);
    const auto mu_grid = candidate_mus(grid, delta);
    std::size_t best_i = 0;
    OperatingPoint best = evaluate(l_km, mu_grid[0], delta, p_dark);
    for (std::size_t i = 1; i < mu_grid.size(); ++i) {
        OperatingPoint op = evaluate(l_km, mu_grid[i], delta, p_dark);
        if (op.g_rate > best.g_rate) {
            best = op;
            best_i = i;
        }
    }
    MuOptimum out;
    if (best.g_rate <= 0.0) {
        out.point = evaluate(l_km, mu_grid.front(), delta, p_dark);
        out.no_key = true;
        return out;
    }
    if (refine_iters > 0 && mu_grid.size() > 1) {
        const double lo = std::log(mu_grid[best_i == 0 ? 0 : best_i - 1]);
        const double hi = std::log(mu_grid[std::min(best_i + 1, mu_grid.size() - 1)]);
        const auto refined = search::golden_maximize(
            [&](double log_mu) { return evaluate(l_km, std::exp(log_mu), delta, p_dark).g_rate; }, lo, hi,
            refine_iters);
        if (refined.value > best.g_rate) best = evaluate(l_km, std::exp(refined.x), delta, p_dark);
    }
    out.point = best;
    out.no_key = false;
    return out;
}

struct KeyRatePoint {
    double l_km = 0.0;
    double mu_opt = 0.0;
    double g_rate = 0.0;
    Observables obs;
    security::SecurityBound bound;
};

inline std::vector<KeyRatePoint> sweep_distance(const SweepConfig& cfg) {
    cfg.validate();
    const auto ls = cfg.distances();
    std::vector<KeyRatePoint> out(ls.size());
    parallel_for(ls.size(), [&](std::size_t i) {
        const auto opt = optimize_mu(ls[i], cfg.delta, cfg.p_dark, cfg.mu_grid, cfg.refine_iters);
        out[i] = KeyRatePoint{ls[i], opt.mu_opt(), opt.g_rate(), opt.point.obs, opt.point.bound};
    });
    return out;
}

struct MaxDistanceOptions {
    double scan_step_km = 2.0;
    double scan_max_km = 250.0;
    std::vector<double> mu_grid = default_mu_grid();
    int refine_iters = 60;
};

struct MaxDistance {
    bool feasible = false;
    double l_km = 0.0;  // largest distance known to give G > 0
};

/// Largest distance with optimized G > 0. A scan locates the last positive
/// sample (G can be zero at short range, where the intensity that keeps
/// Lambda_1x small saturates the link), then bisection narrows the cutoff.
inline MaxDistance max_distance(double delta, double p_dark, double precision_km,
                                const MaxDistanceOptions& opt = {}) {
    if (!(precision_km > 0.0)) throw std::invalid_argument("max_distance: precision must be positive");
    const auto positive = [&](double l) {
        return optimize_mu(l, delta, p_dark, opt.mu_grid, opt.refine_iters).g_rate() > 0.0;
    };
    SweepConfig scan;
    scan.delta = delta;
    scan.l_min = 0.0;
    scan.l_max = opt.scan_max_km;
    scan.l_step = opt.scan_step_km;
    scan.mu_grid = opt.mu_grid;
    scan.p_dark = p_dark;
    scan.refine_iters = opt.refine_iters;
    const auto points = sweep_distance(scan);

    auto last = std::find_if(points.rbegin(), points.rend(), [](const KeyRatePoint& p) { return p.g_rate > 0.0; });
    if (last == points.rend()) return {};
    double good = last->l_km;
    double bad = good + opt.scan_step_km;
    if (last == points.rbegin()) return {true, good};  // still positive at the end of the scan
    while (bad - good > precision_km) {
        const double mid = 0.5 * (good + bad);
        if (positive(mid)) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    return {true, good};
}

struct DesignRuleReport {
    double eta = 0.0;
    double mu_min = 0.0;     // 1/eta
    double delta_max = 0.0;  // sqrt(eta)
    bool mu_ok = false;
    bool delta_ok = false;
};

/// Heuristic from the two security intuitions: strong monitoring wants
/// mu >= 1/eta, high nonorthogonality wants delta <= sqrt(eta). Advisory only.
inline DesignRuleReport sanity_design_rule(double l_km, double delta, double mu) {
    DesignRuleReport r;
    r.eta = channel_eta(l_km);
    r.mu_min = 1.0 / r.eta;
    r.delta_max = std::sqrt(r.eta);
    r.mu_ok = mu >= r.mu_min;
    r.delta_ok = delta <= r.delta_max;
    return r;
}

}  // namespace phasekey::optimizer
