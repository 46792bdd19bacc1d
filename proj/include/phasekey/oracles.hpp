// oracles.hpp
// Slow, independent reference computations used by the test suites and by
// `phasekey verify`. None of these call the closed forms or the solver they
// are meant to check.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "phasekey/protocol.hpp"

namespace phasekey::oracles {

using cplx = std::complex<double>;
using Mat4Array = std::array<std::array<double, 4>, 4>;

/// Coherent-state amplitudes by the plain recurrence c_n = c_{n-1} alpha / sqrt(n).
inline std::vector<cplx> coherent_amplitudes(cplx alpha, int n_max) {
    if (n_max < 0) throw std::invalid_argument("coherent_amplitudes: n_max < 0");
    std::vector<cplx> c(static_cast<std::size_t>(n_max) + 1);
    c[0] = std::exp(-0.5 * std::norm(alpha));
    for (int n = 1; n <= n_max; ++n) c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
    return c;
}

/// <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)
inline cplx coherent_overlap_exact(cplx a, cplx b) {
    return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

/// <a|b> summed term by term in a truncated Fock space.
inline cplx coherent_overlap_fock(cplx a, cplx b, int n_max) {
    const auto ca = coherent_amplitudes(a, n_max);
    const auto cb = coherent_amplitudes(b, n_max);
    cplx s = 0.0;
    for (int n = 0; n <= n_max; ++n) s += std::conj(ca[n]) * cb[n];
    return s;
}

/// Probability that Alice's X measurement returns 1 on
///   (|0_y>|e^{i delta} sqrt(mu)> + |1_y>|e^{-i delta} sqrt(mu)>)/sqrt(2),
/// from the reduced density matrix built out of truncated Fock overlaps.
inline double lambda_1x_fock(double mu, double delta, int n_max = 120) {
    const double r = std::sqrt(mu);
    const std::array<cplx, 2> beta = {std::polar(r, delta), std::polar(r, -delta)};
    // |j_y> = (|0_z> + i(-1)^j |1_z>)/sqrt(2), |1_x> = (|0_z> - |1_z>)/sqrt(2)
    const cplx i(0.0, 1.0);
    const std::array<std::array<cplx, 2>, 2> y = {{{1.0 / std::sqrt(2.0), i / std::sqrt(2.0)},
                                                  {1.0 / std::sqrt(2.0), -i / std::sqrt(2.0)}}};
    const std::array<cplx, 2> one_x = {1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)};
    std::array<cplx, 2> proj{};  // <1_x|j_y>
    for (int j = 0; j < 2; ++j) proj[j] = std::conj(one_x[0]) * y[j][0] + std::conj(one_x[1]) * y[j][1];
    cplx total = 0.0;
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            // rho_A = 1/2 sum_jk |j_y><k_y| <beta_k|beta_j>
            total += 0.5 * proj[j] * std::conj(proj[k]) * coherent_overlap_fock(beta[k], beta[j], n_max);
        }
    }
    return total.real();
}

// ---------------------------------------------------------------------------
// 4x4 inverse by cofactors
// ---------------------------------------------------------------------------

inline double det3(const Mat4Array& m, int skip_r, int skip_c) {
    double a[3][3];
    for (int r = 0, rr = 0; r < 4; ++r) {
        if (r == skip_r) continue;
        for (int c = 0, cc = 0; c < 4; ++c) {
            if (c == skip_c) continue;
            a[rr][cc++] = m[r][c];
        }
        ++rr;
    }
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

inline double det4(const Mat4Array& m) {
    double d = 0.0;
    for (int c = 0; c < 4; ++c) d += ((c % 2) ? -1.0 : 1.0) * m[0][c] * det3(m, 0, c);
    return d;
}

inline Mat4Array adjugate_inverse(const Mat4Array& m) {
    const double d = det4(m);
    if (std::abs(d) < 1e-300) throw std::domain_error("adjugate_inverse: singular matrix");
    Mat4Array inv{};
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) inv[c][r] = (((r + c) % 2) ? -1.0 : 1.0) * det3(m, r, c) / d;
    }
    return inv;
}

/// The constraint map written out row by row: z = M w with
/// w = (P(0x,0x), P(0x,1x), P(1x,0x), P(1x,1x)) for (Alice, Bob).
inline Mat4Array constraint_rows(double delta) {
    const double s = std::pow(std::sin(delta / 2.0), 2);
    const double k = std::pow(std::cos(delta / 2.0), 2);
    return {{{1.0, 1.0, 1.0, 1.0}, {0.0, 0.0, 1.0, 1.0}, {s, k, s, k}, {0.0, k, s, 0.0}}};
}

/// det M = cos^2(delta/2) - sin^2(delta/2) = cos(delta), by row reduction.
inline double constraint_determinant(double delta) { return std::cos(delta); }

// ---------------------------------------------------------------------------
// Brute-force phase-error bound
// ---------------------------------------------------------------------------

struct GridBound {
    double lambda_ph = -1.0;  // -1 when no grid point satisfies the constraint
    double p1 = 0.0;
};

/// Largest lambda_ph on an n x n grid of (p1, lambda_ph) in [0,1] x [0, lambda_fil]
/// for which the probabilities w = C z are non-negative and
///   lambda_fil - 2 lambda_bit <= sin(delta) (sqrt(w0 w3) + sqrt(w1 w2)).
inline GridBound brute_force_phase_bound(const Observables& obs, double delta, int n = 2000) {
    if (n < 2) throw std::invalid_argument("brute_force_phase_bound: n >= 2");
    const Mat4Array c = adjugate_inverse(constraint_rows(delta));
    const double lhs = obs.lambda_fil - 2.0 * obs.lambda_bit;
    const double sd = std::sin(delta);
    const auto holds = [&](double p1, double lam) {
        const std::array<double, 4> z = {obs.lambda_s, obs.lambda_1x - p1 * (1.0 - obs.lambda_s), obs.lambda_fil, lam};
        std::array<double, 4> w{};
        for (int r = 0; r < 4; ++r) {
            for (int k = 0; k < 4; ++k) w[r] += c[r][k] * z[k];
        }
        for (double x : w) {
            if (x < -1e-14) return false;
        }
        const double g = std::sqrt(std::max(0.0, w[0] * w[3])) + std::sqrt(std::max(0.0, w[1] * w[2]));
        return lhs <= sd * g;
    };
    GridBound best;
    for (int i = 0; i < n; ++i) {
        const double p1 = static_cast<double>(i) / (n - 1);
        for (int j = n - 1; j >= 0; --j) {
            const double lam = obs.lambda_fil * j / (n - 1);
            if (lam <= best.lambda_ph) break;
            if (holds(p1, lam)) {
                best = {lam, p1};
                break;
            }
        }
    }
    return best;
}

/// Binary Shannon entropy from its definition, used to cross-check the key rate.
inline double entropy_bits(double x) {
    double h = 0.0;
    if (x > 0.0) h -= x * std::log(x);
    if (x < 1.0) h -= (1.0 - x) * std::log(1.0 - x);
    return h / std::log(2.0);
}

}  // namespace phasekey::oracles
