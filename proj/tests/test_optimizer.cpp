#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phasekey/optimizer.hpp"

using namespace phasekey;
using namespace phasekey::optimizer;

namespace {

const double kPi = std::numbers::pi;

// Plain scan of G over a log grid, no refinement and no extra candidates.
double dense_scan(double l, double delta, std::size_t n) {
    double best = 0.0;
    for (double mu : log_grid(1.0, 1e7, n)) best = std::max(best, evaluate(l, mu, delta, kDefaultDarkCount).g_rate);
    return best;
}

}  // namespace

TEST(Grid, LogGrid) {
    const auto g = log_grid(1.0, 1e7, 200);
    ASSERT_EQ(g.size(), 200u);
    EXPECT_DOUBLE_EQ(g.front(), 1.0);
    EXPECT_DOUBLE_EQ(g.back(), 1e7);
    for (std::size_t i = 1; i < g.size(); ++i) {
        EXPECT_GT(g[i], g[i - 1]);
        EXPECT_NEAR(g[i] / g[i - 1], std::pow(1e7, 1.0 / 199), 1e-9);
    }
    EXPECT_THROW(log_grid(0.0, 1.0, 5), std::invalid_argument);
    EXPECT_THROW(log_grid(1.0, 2.0, 1), std::invalid_argument);
}

TEST(Grid, Validation) {
    EXPECT_THROW(validate_mu_grid({}), std::invalid_argument);
    EXPECT_THROW(validate_mu_grid({1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(validate_mu_grid({-1.0, 2.0}), std::invalid_argument);
    EXPECT_NO_THROW(validate_mu_grid({2.0}));
}

TEST(Grid, Lambda1xMinimaAreLocalMinima) {
    for (double delta : {kPi / 100, kPi / 300}) {
        const auto m = lambda_1x_minima(delta, 1.0, 1e7);
        ASSERT_FALSE(m.empty());
        for (double mu : m) {
            // The oscillating factor bottoms out here; the damping shifts the true minimum slightly.
            EXPECT_NEAR(std::sin(mu * std::sin(2 * delta)), -1.0, 1e-12);
            const double quarter = 0.5 * kPi / std::sin(2 * delta);
            const double v = lambda_1x_closed_form(mu, delta);
            EXPECT_LT(v, lambda_1x_closed_form(mu - quarter, delta));
            EXPECT_LT(v, lambda_1x_closed_form(mu + quarter, delta));
        }
        const auto c = candidate_mus(default_mu_grid(), delta);
        EXPECT_EQ(c.size(), default_mu_grid().size() + m.size());
        EXPECT_TRUE(std::is_sorted(c.begin(), c.end()));
    }
}

TEST(Sweep, ConfigValidation) {
    SweepConfig c;
    EXPECT_NO_THROW(c.validate());
    c.l_min = 10;
    c.l_max = 5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = SweepConfig{};
    c.l_step = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = SweepConfig{};
    c.mu_grid = {};
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Sweep, Distances) {
    SweepConfig c;
    EXPECT_EQ(c.distances().size(), 121u);
    c.l_min = c.l_max = 30;
    ASSERT_EQ(c.distances().size(), 1u);
    const auto pts = sweep_distance(c);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_DOUBLE_EQ(pts[0].l_km, 30.0);
}

TEST(OptimizeMu, BeyondCutoffHasNoKey) {
    const auto grid = default_mu_grid();
    const auto r = optimize_mu(120.0, kPi / 100, kDefaultDarkCount, grid, 60);
    EXPECT_TRUE(r.no_key);
    EXPECT_DOUBLE_EQ(r.g_rate(), 0.0);
    EXPECT_DOUBLE_EQ(r.mu_opt(), grid.front());
}

TEST(OptimizeMu, RefinementNeverWorsens) {
    const auto grid = default_mu_grid();
    for (double l : {30.0, 50.0, 62.0}) {
        const auto coarse = optimize_mu(l, kPi / 100, kDefaultDarkCount, grid, 0);
        const auto fine = optimize_mu(l, kPi / 100, kDefaultDarkCount, grid, 60);
        EXPECT_GE(fine.g_rate(), coarse.g_rate());
        EXPECT_GE(fine.mu_opt(), grid.front());
        EXPECT_LE(fine.mu_opt(), grid.back());
    }
}

TEST(OptimizeMu, AgreesWithTenfoldDenserGrid) {
    const auto grid = default_mu_grid();
    for (const auto& [l, delta] : {std::pair{30.0, kPi / 100}, std::pair{45.0, kPi / 100}, std::pair{60.0, kPi / 100},
                                   std::pair{55.0, kPi / 300}, std::pair{75.0, kPi / 300}}) {
        const double dense = dense_scan(l, delta, 2000);
        const double got = optimize_mu(l, delta, kDefaultDarkCount, grid, 60).g_rate();
        ASSERT_GT(dense, 0.0) << "l=" << l;
        EXPECT_NEAR(got, dense, 0.02 * dense) << "l=" << l;
    }
}

TEST(OptimizeMu, ShortRangeWithFinePrecisionHasNoKey) {
    // At 30 km the Delta = pi/150 modulator gives no key at any intensity.
    const double dense = dense_scan(30.0, kPi / 300, 2000);
    const auto r = optimize_mu(30.0, kPi / 300, kDefaultDarkCount, default_mu_grid(), 60);
    EXPECT_DOUBLE_EQ(dense, 0.0);
    EXPECT_TRUE(r.no_key);
}

TEST(Sweep, NonIncreasingBeyondPeak) {
    SweepConfig c;
    c.delta = kPi / 100;
    c.l_min = 0;
    c.l_max = 80;
    c.l_step = 2;
    const auto pts = sweep_distance(c);
    for (const auto& p : pts) EXPECT_GE(p.g_rate, 0.0);
    const auto peak = std::max_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.g_rate < b.g_rate;
    });
    ASSERT_GT(peak->g_rate, 0.0);
    for (auto it = peak; it + 1 != pts.end(); ++it) EXPECT_LE((it + 1)->g_rate, it->g_rate + 1e-12);
    EXPECT_DOUBLE_EQ(pts.back().g_rate, 0.0);
}

TEST(Sweep, Deterministic) {
    SweepConfig c;
    c.l_min = 40;
    c.l_max = 60;
    c.l_step = 5;
    const auto a = sweep_distance(c);
    const auto b = sweep_distance(c);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].l_km, b[i].l_km);
        EXPECT_EQ(a[i].mu_opt, b[i].mu_opt);
        EXPECT_EQ(a[i].g_rate, b[i].g_rate);
        if (i > 0) EXPECT_GT(a[i].l_km, a[i - 1].l_km);
    }
}

TEST(MaxDistance, FinerModulatorReachesFarther) {
    MaxDistanceOptions opt;
    opt.scan_step_km = 4.0;
    const auto a = max_distance(kPi / 100, kDefaultDarkCount, 0.5, opt);
    const auto b = max_distance(kPi / 200, kDefaultDarkCount, 0.5, opt);
    const auto c = max_distance(kPi / 300, kDefaultDarkCount, 0.5, opt);
    ASSERT_TRUE(a.feasible && b.feasible && c.feasible);
    EXPECT_GE(b.l_km, a.l_km);
    EXPECT_GE(c.l_km, b.l_km - 2.0);
}

TEST(MaxDistance, UselessModulator) {
    MaxDistanceOptions opt;
    opt.scan_step_km = 10.0;
    opt.scan_max_km = 100.0;
    const auto r = max_distance(1.5, kDefaultDarkCount, 1.0, opt);
    EXPECT_TRUE(!r.feasible || r.l_km < 20.0);
    EXPECT_THROW(max_distance(0.01, kDefaultDarkCount, 0.0), std::invalid_argument);
}

TEST(DesignRule, Values) {
    const auto r0 = sanity_design_rule(0.0, 0.1, 30.0);
    EXPECT_NEAR(r0.eta, 0.045, 1e-15);
    EXPECT_NEAR(r0.mu_min, 22.222, 1e-3);
    EXPECT_NEAR(r0.delta_max, 0.2121, 1e-4);
    EXPECT_TRUE(r0.mu_ok);
    EXPECT_TRUE(r0.delta_ok);
    // At 100 km the rounded-up choice mu = 1e4, delta = 1e-2 meets both conditions.
    const auto r100 = sanity_design_rule(100.0, 1e-2, 1e4);
    EXPECT_TRUE(r100.mu_ok);
    EXPECT_TRUE(r100.delta_ok);
    EXPECT_GT(r100.mu_min, 1e3);
    EXPECT_LT(r100.mu_min, 1e4);
    EXPECT_TRUE(sanity_design_rule(50.0, 0.0, 1.0).delta_ok);
    EXPECT_FALSE(sanity_design_rule(50.0, 0.0, 1.0).mu_ok);
}
