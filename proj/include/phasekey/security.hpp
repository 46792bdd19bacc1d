// security.hpp
// Worst-case phase-error rate from the filtered-qubit constraint and the
// asymptotic secret-key rate.
//
// The unknown joint distribution of Alice's and Bob's Gedanken X outcomes on
// the single-photon qubit is w = C z, with
//   z = (Lambda_s, Lambda_1x - p1 (1 - Lambda_s), Lambda_fil, Lambda_ph)
// and w = (P(0x,0x), P(0x,1x), P(1x,0x), P(1x,1x)) (Alice first, Bob second).
// The Y-basis correlation of the filtered pairs is limited by the X-basis
// coherences, giving
//   Lambda_fil - 2 Lambda_bit <= sin(delta) * g(C z).
// The bound is the largest Lambda_ph in [0, Lambda_fil] for which some
// p1 in [0, 1] satisfies the constraint.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "phasekey/protocol.hpp"
#include "phasekey/scalar_search.hpp"

namespace phasekey::security {

using Vec4 = std::array<double, 4>;
using Mat4 = Eigen::Matrix4d;

class SingularMatrixError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Components of C z may dip below zero by this much from rounding and still count as feasible.
inline constexpr double kFeasibilitySlack = 1e-14;

/// C^{-1} as a function of delta. Rows: total qubit weight, Alice-1x weight,
/// filter pass, filtered phase error.
inline Mat4 c_inverse(double delta) {
    if (!(delta > 0.0 && delta < std::numbers::pi)) {
        throw std::invalid_argument("c_inverse: delta must lie in (0, pi)");
    }
    // Rows 1 and 3 become parallel when sin^2(delta/2) = cos^2(delta/2).
    if (std::abs(std::cos(delta)) < 1e-12) {
        throw SingularMatrixError("c_inverse: singular at delta = pi/2");
    }
    const double s2 = std::pow(std::sin(delta / 2.0), 2);
    const double c2 = std::pow(std::cos(delta / 2.0), 2);
    Mat4 m;
    m << 1.0, 1.0, 1.0, 1.0,
         0.0, 0.0, 1.0, 1.0,
         s2,  c2,  s2,  c2,
         0.0, c2,  s2,  0.0;
    return m;
}

struct ConstraintMatrix {
    Mat4 c;
    Mat4 c_inv;

    Vec4 apply(const Vec4& z) const {
        Vec4 w{};
        for (int r = 0; r < 4; ++r) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) acc += c(r, k) * z[static_cast<std::size_t>(k)];
            w[static_cast<std::size_t>(r)] = acc;
        }
        return w;
    }
};

inline ConstraintMatrix c_matrix(double delta) {
    ConstraintMatrix out;
    out.c_inv = c_inverse(delta);
    Eigen::FullPivLU<Mat4> lu(out.c_inv);
    if (!lu.isInvertible()) throw SingularMatrixError("c_matrix: C^{-1} is not invertible");
    out.c = lu.inverse();
    const double residual = (out.c * out.c_inv - Mat4::Identity()).cwiseAbs().maxCoeff();
    if (residual > 1e-10) throw SingularMatrixError("c_matrix: inversion residual too large");
    return out;
}

/// Coherence budget g(w) = sqrt(w1 w4) + sqrt(w2 w3): the |0x0x>,|1x1x> pair and
/// the |0x1x>,|1x0x> pair are the two coherences that sigma_y ⊗ sigma_y couples.
/// nullopt marks a negative product (no physical state has these weights).
inline std::optional<double> g_function(const Vec4& w) {
    const double p = w[0] * w[3];
    const double q = w[1] * w[2];
    if (p < 0.0 || q < 0.0) return std::nullopt;
    return std::sqrt(p) + std::sqrt(q);
}

inline Vec4 z_vector(const Observables& obs, double p1, double lambda_ph) {
    return {obs.lambda_s, obs.lambda_1x - p1 * (1.0 - obs.lambda_s), obs.lambda_fil, lambda_ph};
}

enum class InequalityStatus { holds, violated, infeasible };

/// Evaluates the constraint at (p1, lambda_ph) through the matrix C.
/// Points where C z has a negative entry are infeasible.
inline InequalityStatus inequality_holds(const Observables& obs, double p1, double lambda_ph,
                                         double delta, const ConstraintMatrix& cm) {
    if (!(p1 >= 0.0 && p1 <= 1.0)) throw std::out_of_range("inequality_holds: p1 outside [0, 1]");
    if (!(lambda_ph >= 0.0 && lambda_ph <= obs.lambda_fil)) {
        throw std::out_of_range("inequality_holds: lambda_ph outside [0, lambda_fil]");
    }
    Vec4 w = cm.apply(z_vector(obs, p1, lambda_ph));
    for (double& x : w) {
        if (x < -kFeasibilitySlack) return InequalityStatus::infeasible;
        x = std::max(x, 0.0);
    }
    const auto g = g_function(w);
    if (!g) return InequalityStatus::infeasible;
    const double lhs = obs.lambda_fil - 2.0 * obs.lambda_bit;
    return lhs <= std::sin(delta) * *g ? InequalityStatus::holds : InequalityStatus::violated;
}

inline InequalityStatus inequality_holds(const Observables& obs, double p1, double lambda_ph, double delta) {
    return inequality_holds(obs, p1, lambda_ph, delta, c_matrix(delta));
}

// ---------------------------------------------------------------------------
// Phase-error bound
// ---------------------------------------------------------------------------

struct SecurityBound {
    double lambda_ph_bar = 0.0;  // worst-case filtered phase-error fraction
    double p1_star = 0.0;        // p1 attaining it
    bool saturated = false;      // bound reached the cap lambda_fil
    bool feasible = true;        // some (p1, lambda_ph) satisfies the constraint
};

struct SolverOptions {
    int p1_grid = 513;       // coarse samples across the feasible p1 band
    int golden_iters = 80;
    int bisect_iters = 100;
};

namespace detail {

// Closed-form solution of C^{-1} w = z. With X = z2 and u = B - X,
//   b = L + S u,  c = L - K u,  d = B - b,  a = lambda_s - X - b,
// where L = lambda_ph, S = sin^2(delta/2), K = cos^2(delta/2) and
// B = (lambda_fil - S lambda_s) / cos(delta) is the probability that Bob's
// X outcome is 1. All four entries are affine in (u, L), so the margin
// below is concave and the feasible region is a polygon.
class PhaseErrorProblem {
public:
    PhaseErrorProblem(const Observables& obs, double delta)
        : obs_(obs),
          s_(std::pow(std::sin(delta / 2.0), 2)),
          k_(std::pow(std::cos(delta / 2.0), 2)),
          sin_delta_(std::sin(delta)),
          bob_one_((obs.lambda_fil - s_ * obs.lambda_s) / std::cos(delta)),
          lhs_(obs.lambda_fil - 2.0 * obs.lambda_bit) {}

    double cap() const { return obs_.lambda_fil; }

    Vec4 weights(double u, double lam) const {
        const double b = lam + s_ * u;
        const double c = lam - k_ * u;
        const double d = bob_one_ - b;
        const double a = obs_.lambda_s - (bob_one_ - u) - b;
        return {a, b, c, d};
    }

    /// sin(delta) g(w) - (lambda_fil - 2 lambda_bit); >= 0 where the constraint holds.
    double margin(double u, double lam) const {
        const Vec4 w = weights(u, lam);
        const double p = std::max(0.0, w[0] * w[3]);
        const double q = std::max(0.0, w[1] * w[2]);
        return sin_delta_ * (std::sqrt(p) + std::sqrt(q)) - lhs_;
    }

    /// Range of lambda_ph keeping all weights non-negative at fixed u.
    std::pair<double, double> lambda_slice(double u) const {
        const double lo = std::max({0.0, -s_ * u, k_ * u});
        const double hi = std::min({cap(), bob_one_ - s_ * u, obs_.lambda_s - bob_one_ + k_ * u});
        return {lo, hi};
    }

    /// Range of u over which the slice is non-empty and p1 stays in [0, 1].
    std::optional<std::pair<double, double>> u_domain() const {
        double lo = bob_one_ - obs_.lambda_1x;
        double hi = bob_one_ - obs_.lambda_1x + (1.0 - obs_.lambda_s);
        // Each (lower bound, upper bound) pair of the slice gives one linear condition on u.
        const std::array<std::pair<double, double>, 3> lowers{{{0.0, 0.0}, {-s_, 0.0}, {k_, 0.0}}};
        const std::array<std::pair<double, double>, 3> uppers{
            {{0.0, cap()}, {-s_, bob_one_}, {k_, obs_.lambda_s - bob_one_}}};
        for (const auto& [sl, il] : lowers) {
            for (const auto& [su, iu] : uppers) {
                const double slope = sl - su;
                const double rhs = iu - il;
                if (slope > 0.0) {
                    hi = std::min(hi, rhs / slope);
                } else if (slope < 0.0) {
                    lo = std::max(lo, rhs / slope);
                } else if (rhs < 0.0) {
                    return std::nullopt;
                }
            }
        }
        if (lo > hi) return std::nullopt;
        return std::make_pair(lo, hi);
    }

    double p1_from_u(double u) const {
        if (obs_.lambda_s >= 1.0) return 0.0;
        const double x = bob_one_ - u;
        return std::clamp((obs_.lambda_1x - x) / (1.0 - obs_.lambda_s), 0.0, 1.0);
    }

    /// Best margin over the slice at u, with its argmax.
    search::Extremum best_margin(double u, const SolverOptions& opt) const {
        const auto [lo, hi] = lambda_slice(u);
        if (hi < lo) return {lo, -std::numeric_limits<double>::infinity()};
        return search::golden_maximize([&](double lam) { return margin(u, lam); }, lo, hi, opt.golden_iters);
    }

    /// Largest lambda_ph satisfying the constraint at u, or -inf if none does.
    double largest_holding(double u, const SolverOptions& opt) const {
        const auto [lo, hi] = lambda_slice(u);
        if (hi < lo) return -std::numeric_limits<double>::infinity();
        if (margin(u, hi) >= 0.0) return hi;
        const auto best = best_margin(u, opt);
        if (best.value < 0.0) return -std::numeric_limits<double>::infinity();
        return search::bisect_boundary([&](double lam) { return margin(u, lam) >= 0.0; }, best.x, hi,
                                       opt.bisect_iters);
    }

private:
    Observables obs_;
    double s_;
    double k_;
    double sin_delta_;
    double bob_one_;
    double lhs_;
};

}  // namespace detail

/// Worst case over p1 of the largest phase-error fraction compatible with the
/// observables. When no point satisfies the constraint the cap lambda_fil is
/// returned with feasible = false.
///
/// The holding set is convex in (u, lambda_ph), so both the per-u maximum and
/// the outer maximum over u are concave. A coarse grid over the holding band
/// of u is refined by golden section between the best sample's neighbours.
inline SecurityBound phase_error_bound(const Observables& obs, double delta, const SolverOptions& opt = {}) {
    obs.validate();
    c_inverse(delta);  // range and singularity checks

    SecurityBound out;
    if (obs.lambda_fil <= 0.0) {
        out.saturated = true;
        return out;
    }
    if (obs.lambda_fil - 2.0 * obs.lambda_bit <= 0.0) {
        // The left side is non-positive, so the constraint carries no information.
        out.lambda_ph_bar = obs.lambda_fil;
        out.saturated = true;
        return out;
    }
    const detail::PhaseErrorProblem prob(obs, delta);
    const auto infeasible = [&](double u) {
        SecurityBound b;
        b.lambda_ph_bar = obs.lambda_fil;
        b.p1_star = prob.p1_from_u(u);
        b.saturated = true;
        b.feasible = false;
        return b;
    };

    const auto domain = prob.u_domain();
    if (!domain) return infeasible(0.0);
    const auto [u_lo, u_hi] = *domain;

    const auto margin_at = [&](double u) { return prob.best_margin(u, opt).value; };
    const auto peak = search::golden_maximize(margin_at, u_lo, u_hi, opt.golden_iters);
    if (peak.value < 0.0) return infeasible(peak.x);

    const auto holds = [&](double u) { return margin_at(u) >= 0.0; };
    const double u_a = holds(u_lo) ? u_lo : search::bisect_boundary(holds, peak.x, u_lo, opt.bisect_iters);
    const double u_b = holds(u_hi) ? u_hi : search::bisect_boundary(holds, peak.x, u_hi, opt.bisect_iters);

    const auto lam_star = [&](double u) { return prob.largest_holding(u, opt); };
    const int n = std::max(opt.p1_grid, 2);
    double best_u = peak.x;
    double best_lam = lam_star(peak.x);
    for (int i = 0; i < n; ++i) {
        const double u = u_a + (u_b - u_a) * i / (n - 1);
        const double v = lam_star(u);
        if (v > best_lam) {
            best_lam = v;
            best_u = u;
        }
    }
    if (u_b > u_a) {
        const double step = (u_b - u_a) / (n - 1);
        const double lo = std::max(u_a, best_u - step);
        const double hi = std::min(u_b, best_u + step);
        const auto refined = search::golden_maximize(lam_star, lo, hi, opt.golden_iters);
        if (refined.value > best_lam) {
            best_lam = refined.value;
            best_u = refined.x;
        }
    }

    out.lambda_ph_bar = std::clamp(best_lam, 0.0, obs.lambda_fil);
    out.p1_star = prob.p1_from_u(best_u);
    out.saturated = out.lambda_ph_bar >= obs.lambda_fil * (1.0 - 1e-12);
    out.feasible = true;
    return out;
}

// ---------------------------------------------------------------------------
// Key rate
// ---------------------------------------------------------------------------

/// h(x) = -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0.
inline double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy: argument outside [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// G = Lambda_fil (1 - h(e_bit) - h(e_ph)) per pulse, clamped at 0.
/// Error fractions above 1/2 are read as 1/2: an upper bound beyond 1/2
/// carries no information, so h is taken as 1 there.
inline double key_rate(const Observables& obs, const SecurityBound& bound) {
    if (obs.lambda_fil <= 0.0) return 0.0;
    const double e_bit = std::min(0.5, obs.lambda_bit / obs.lambda_fil);
    const double e_ph = std::min(0.5, bound.lambda_ph_bar / obs.lambda_fil);
    const double g = obs.lambda_fil * (1.0 - binary_entropy(e_bit) - binary_entropy(e_ph));
    return std::max(0.0, g);
}

}  // namespace phasekey::security
