// qstate.hpp
// Truncated Fock-space kets and single-photon qubit algebra.
//
// These types are the numerical reference for the closed-form expressions in
// protocol.hpp: coherent states are expanded in a truncated number basis, the
// two-mode single-photon sector is mapped onto a qubit, and 2x2 operators act
// on that qubit.
//
// Qubit basis conventions:
//   |0_z> = |0>_SP |1>_RP,   |1_z> = |1>_SP |0>_RP
//   |j_x> = (|0_z> + (-1)^j |1_z>) / sqrt(2)
//   |j_y> = (|0_z> + i (-1)^j |1_z>) / sqrt(2)

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace phasekey::qstate {

using cplx = std::complex<double>;

/// Absolute tolerance for exact algebraic identities.
inline constexpr double kAlgebraTol = 1e-12;
/// Tolerance for quantities that pass through a normalization.
inline constexpr double kNormalizedTol = 1e-9;

// ---------------------------------------------------------------------------
// Fock space
// ---------------------------------------------------------------------------

/// Single-mode ket in the number basis |0>..|n_max>.
class FockKet {
public:
    explicit FockKet(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.empty()) {
            throw std::invalid_argument("FockKet: needs at least the vacuum amplitude");
        }
        for (const auto& a : amps_) {
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
                throw std::invalid_argument("FockKet: non-finite amplitude");
            }
        }
        if (squared_norm() > 1.0 + kAlgebraTol) {
            throw std::invalid_argument("FockKet: squared norm exceeds 1");
        }
    }

    static FockKet vacuum(int n_max) { return number(0, n_max); }

    static FockKet number(int n, int n_max) {
        if (n_max < 0 || n < 0 || n > n_max) {
            throw std::invalid_argument("FockKet::number: need 0 <= n <= n_max");
        }
        std::vector<cplx> amps(static_cast<std::size_t>(n_max) + 1);
        amps[static_cast<std::size_t>(n)] = 1.0;
        return FockKet(std::move(amps));
    }

    int n_max() const { return static_cast<int>(amps_.size()) - 1; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    cplx operator[](std::size_t n) const { return amps_[n]; }

    double squared_norm() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

    /// Probability mass lost to truncation, assuming the untruncated state was normalized.
    double tail_mass() const { return std::max(0.0, 1.0 - squared_norm()); }

private:
    std::vector<cplx> amps_;
};

/// Cutoff keeping the coherent-state tail below ~1e-12 for the amplitudes used here.
inline int default_cutoff(cplx alpha) {
    const double r = std::abs(alpha);
    return static_cast<int>(std::ceil(r * r + 10.0 * r + 20.0));
}

/// Coherent state |alpha> truncated at n_max.
/// Amplitudes are evaluated in log space so moderate |alpha| does not underflow.
inline FockKet make_coherent(cplx alpha, int n_max) {
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
        throw std::invalid_argument("make_coherent: non-finite amplitude");
    }
    if (n_max < 0) {
        throw std::invalid_argument("make_coherent: n_max must be non-negative");
    }
    std::vector<cplx> amps(static_cast<std::size_t>(n_max) + 1);
    const double r = std::abs(alpha);
    if (r == 0.0) {
        amps[0] = 1.0;
        return FockKet(std::move(amps));
    }
    const double log_r = std::log(r);
    const double phase = std::arg(alpha);
    for (int n = 0; n <= n_max; ++n) {
        const double log_mag = -0.5 * r * r + n * log_r - 0.5 * std::lgamma(n + 1.0);
        amps[static_cast<std::size_t>(n)] = std::polar(std::exp(log_mag), n * phase);
    }
    return FockKet(std::move(amps));
}

inline FockKet make_coherent(cplx alpha) { return make_coherent(alpha, default_cutoff(alpha)); }

/// <x|y>, conjugate-linear in x.
inline cplx inner(const FockKet& x, const FockKet& y) {
    if (x.dim() != y.dim()) {
        throw std::invalid_argument("inner: Fock dimension mismatch");
    }
    cplx s = 0.0;
    for (std::size_t n = 0; n < x.dim(); ++n) s += std::conj(x[n]) * y[n];
    return s;
}

// ---------------------------------------------------------------------------
// Qubit
// ---------------------------------------------------------------------------

struct QubitKet {
    cplx c0{};
    cplx c1{};

    double squared_norm() const { return std::norm(c0) + std::norm(c1); }

    QubitKet normalized() const {
        const double n = std::sqrt(squared_norm());
        if (n == 0.0) throw std::domain_error("QubitKet::normalized: zero vector");
        return {c0 / n, c1 / n};
    }

    friend QubitKet operator+(const QubitKet& a, const QubitKet& b) { return {a.c0 + b.c0, a.c1 + b.c1}; }
    friend QubitKet operator-(const QubitKet& a, const QubitKet& b) { return {a.c0 - b.c0, a.c1 - b.c1}; }
    friend QubitKet operator*(cplx s, const QubitKet& v) { return {s * v.c0, s * v.c1}; }
};

inline cplx inner(const QubitKet& x, const QubitKet& y) {
    return std::conj(x.c0) * y.c0 + std::conj(x.c1) * y.c1;
}

inline double sign_of_bit(int j) { return (j & 1) ? -1.0 : 1.0; }

inline QubitKet z_ket(int j) { return (j & 1) ? QubitKet{0.0, 1.0} : QubitKet{1.0, 0.0}; }

inline QubitKet x_ket(int j) {
    const double h = 1.0 / std::sqrt(2.0);
    return {h, sign_of_bit(j) * h};
}

inline QubitKet y_ket(int j) {
    const double h = 1.0 / std::sqrt(2.0);
    return {h, cplx(0.0, sign_of_bit(j) * h)};
}

/// |phi_j> = cos(delta/2)|0_x> - i(-1)^j sin(delta/2)|1_x>, the qubit Bob receives from Alice's j-th pulse pair.
inline QubitKet phi_ket(int j, double delta) {
    const cplx a = std::cos(delta / 2.0);
    const cplx b = cplx(0.0, -sign_of_bit(j) * std::sin(delta / 2.0));
    return a * x_ket(0) + b * x_ket(1);
}

/// A unit vector orthogonal to phi_ket(j, delta).
inline QubitKet phi_bar_ket(int j, double delta) {
    const cplx a = std::sin(delta / 2.0);
    const cplx b = cplx(0.0, sign_of_bit(j) * std::cos(delta / 2.0));
    return a * x_ket(0) + b * x_ket(1);
}

/// 2x2 complex matrix in the z basis, row-major.
class QubitOperator {
public:
    QubitOperator() = default;
    QubitOperator(cplx m00, cplx m01, cplx m10, cplx m11) : m_{m00, m01, m10, m11} {}

    static QubitOperator identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static QubitOperator zero() { return {}; }

    /// |v><v|
    static QubitOperator projector(const QubitKet& v) {
        return {v.c0 * std::conj(v.c0), v.c0 * std::conj(v.c1), v.c1 * std::conj(v.c0),
                v.c1 * std::conj(v.c1)};
    }

    cplx operator()(int r, int c) const { return m_[static_cast<std::size_t>(2 * r + c)]; }

    QubitOperator adjoint() const {
        return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
    }

    friend QubitOperator operator+(const QubitOperator& a, const QubitOperator& b) {
        return {a.m_[0] + b.m_[0], a.m_[1] + b.m_[1], a.m_[2] + b.m_[2], a.m_[3] + b.m_[3]};
    }
    friend QubitOperator operator-(const QubitOperator& a, const QubitOperator& b) {
        return {a.m_[0] - b.m_[0], a.m_[1] - b.m_[1], a.m_[2] - b.m_[2], a.m_[3] - b.m_[3]};
    }
    friend QubitOperator operator*(cplx s, const QubitOperator& a) {
        return {s * a.m_[0], s * a.m_[1], s * a.m_[2], s * a.m_[3]};
    }
    friend QubitOperator operator*(const QubitOperator& a, const QubitOperator& b) {
        return {a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0), a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1),
                a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0), a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1)};
    }

    bool is_hermitian(double tol = kAlgebraTol) const { return max_abs_diff(*this, adjoint()) <= tol; }

    /// Eigenvalues (ascending) of the Hermitian part.
    std::array<double, 2> hermitian_eigenvalues() const {
        const double a = m_[0].real();
        const double d = m_[3].real();
        const cplx b = 0.5 * (m_[1] + std::conj(m_[2]));
        const double mean = 0.5 * (a + d);
        const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
        return {mean - rad, mean + rad};
    }

    friend double max_abs_diff(const QubitOperator& a, const QubitOperator& b) {
        double m = 0.0;
        for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(a.m_[i] - b.m_[i]));
        return m;
    }

private:
    std::array<cplx, 4> m_{};
};

/// Matrix-vector product; the result is not renormalized.
inline QubitKet apply(const QubitOperator& op, const QubitKet& v) {
    return {op(0, 0) * v.c0 + op(0, 1) * v.c1, op(1, 0) * v.c0 + op(1, 1) * v.c1};
}

// ---------------------------------------------------------------------------
// Two qubits (Alice's ancilla A, Bob's qubit B)
// ---------------------------------------------------------------------------

/// Amplitudes indexed 2*a + b over z-basis states |a>_A |b>_B.
struct TwoQubitKet {
    std::array<cplx, 4> amp{};

    double squared_norm() const {
        double s = 0.0;
        for (const auto& a : amp) s += std::norm(a);
        return s;
    }

    TwoQubitKet normalized() const {
        const double n = std::sqrt(squared_norm());
        if (n == 0.0) throw std::domain_error("TwoQubitKet::normalized: zero vector");
        TwoQubitKet out;
        for (std::size_t i = 0; i < 4; ++i) out.amp[i] = amp[i] / n;
        return out;
    }

    friend TwoQubitKet operator+(const TwoQubitKet& x, const TwoQubitKet& y) {
        TwoQubitKet out;
        for (std::size_t i = 0; i < 4; ++i) out.amp[i] = x.amp[i] + y.amp[i];
        return out;
    }
    friend TwoQubitKet operator*(cplx s, const TwoQubitKet& x) {
        TwoQubitKet out;
        for (std::size_t i = 0; i < 4; ++i) out.amp[i] = s * x.amp[i];
        return out;
    }
};

inline TwoQubitKet kron(const QubitKet& a, const QubitKet& b) {
    return {{a.c0 * b.c0, a.c0 * b.c1, a.c1 * b.c0, a.c1 * b.c1}};
}

inline cplx inner(const TwoQubitKet& x, const TwoQubitKet& y) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) s += std::conj(x.amp[i]) * y.amp[i];
    return s;
}

/// (1 ⊗ op)|v>
inline TwoQubitKet apply_on_second(const QubitOperator& op, const TwoQubitKet& v) {
    TwoQubitKet out;
    for (int a = 0; a < 2; ++a) {
        const QubitKet row{v.amp[static_cast<std::size_t>(2 * a)], v.amp[static_cast<std::size_t>(2 * a + 1)]};
        const QubitKet r = apply(op, row);
        out.amp[static_cast<std::size_t>(2 * a)] = r.c0;
        out.amp[static_cast<std::size_t>(2 * a + 1)] = r.c1;
    }
    return out;
}

/// (|0_y 0_y> + |1_y 1_y>)/sqrt(2)
inline TwoQubitKet y_basis_mes() {
    return (1.0 / std::sqrt(2.0)) * (kron(y_ket(0), y_ket(0)) + kron(y_ket(1), y_ket(1)));
}

namespace detail {
template <class Ket>
void require_normalized(const Ket& k, const char* who) {
    if (std::abs(k.squared_norm() - 1.0) > kNormalizedTol) {
        throw std::invalid_argument(std::string(who) + ": input is not normalized");
    }
}
}  // namespace detail

/// |<x|y>|^2 for normalized kets.
inline double fidelity(const QubitKet& x, const QubitKet& y) {
    detail::require_normalized(x, "fidelity");
    detail::require_normalized(y, "fidelity");
    return std::min(1.0, std::norm(inner(x, y)));
}

inline double fidelity(const TwoQubitKet& x, const TwoQubitKet& y) {
    detail::require_normalized(x, "fidelity");
    detail::require_normalized(y, "fidelity");
    return std::min(1.0, std::norm(inner(x, y)));
}

/// Fidelity with the Y-basis MES maximized over a relative phase on |1_y>_B,
///   max_theta |<MES_theta|v>|^2 = (|<0_y0_y|v>| + |<1_y1_y|v>|)^2 / 2.
/// A local phase does not change Y-basis outcomes or the entanglement.
inline double y_mes_fidelity_up_to_local_phase(const TwoQubitKet& v) {
    detail::require_normalized(v, "y_mes_fidelity_up_to_local_phase");
    const double a = std::abs(inner(kron(y_ket(0), y_ket(0)), v));
    const double b = std::abs(inner(kron(y_ket(1), y_ket(1)), v));
    return std::min(1.0, 0.5 * (a + b) * (a + b));
}

/// Schmidt coefficients (descending) of a normalized two-qubit ket.
inline std::array<double, 2> schmidt_coefficients(const TwoQubitKet& v) {
    // Singular values of the 2x2 coefficient matrix via M M^dagger.
    const QubitOperator m(v.amp[0], v.amp[1], v.amp[2], v.amp[3]);
    const auto ev = (m * m.adjoint()).hermitian_eigenvalues();
    return {std::sqrt(std::max(0.0, ev[1])), std::sqrt(std::max(0.0, ev[0]))};
}

// ---------------------------------------------------------------------------
// Two-mode single-photon sector
// ---------------------------------------------------------------------------

/// Unnormalized component of |sp>|rp> with total photon number one, written on
/// the qubit basis: c0 from the reference-mode photon, c1 from the signal-mode photon.
inline QubitKet single_photon_component(const FockKet& sp, const FockKet& rp) {
    if (sp.n_max() < 1 || rp.n_max() < 1) {
        throw std::invalid_argument("single_photon_component: both modes need n_max >= 1");
    }
    return {sp[0] * rp[1], sp[1] * rp[0]};
}

struct SinglePhotonProjection {
    QubitKet qubit;  // normalized
    double weight;   // probability of the single-photon sector
};

/// Projects a two-mode product state onto the single-photon qubit.
/// Returns nullopt when the single-photon sector carries (numerically) no weight.
inline std::optional<SinglePhotonProjection> single_photon_qubit(const FockKet& sp, const FockKet& rp) {
    const QubitKet raw = single_photon_component(sp, rp);
    const double w = raw.squared_norm();
    if (w < 1e-300) return std::nullopt;
    return SinglePhotonProjection{raw.normalized(), w};
}

}  // namespace phasekey::qstate
