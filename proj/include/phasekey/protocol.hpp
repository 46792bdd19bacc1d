// protocol.hpp
// Physical configuration, Alice's pulse pairs, Bob's measurement, the lossy
// channel with dark counts, and the closed-form observables that feed the
// phase-error bound.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "phasekey/qstate.hpp"

namespace phasekey {

/// Transmission of fibre plus detector at zero distance.
inline constexpr double kTransmissionAtZeroKm = 0.045;
/// Fibre attenuation (dB/km).
inline constexpr double kFiberLossDbPerKm = 0.21;
/// Weight of the dark-count branch of the channel mixture.
inline constexpr double kDefaultDarkCount = 1.7e-6;

struct ProtocolParams {
    double mu = 1.0;      // mean photon number of each pulse
    double delta = 0.0;   // phase half-angle (rad)
    double eta = 1.0;     // single-photon transmission incl. detector efficiency
    double p_dark = 0.0;  // dark-count mixture weight

    /// Modulator precision Delta = 2 delta.
    double modulator_precision() const { return 2.0 * delta; }

    // mu = 0 and the closed ends of the delta range are admitted so that the
    // degenerate "no light" and "no modulation" cases can be evaluated.
    void validate() const {
        if (!std::isfinite(mu) || !std::isfinite(delta) || !std::isfinite(eta) || !std::isfinite(p_dark)) {
            throw std::invalid_argument("ProtocolParams: non-finite field");
        }
        if (mu < 0.0) throw std::invalid_argument("ProtocolParams: mu must be >= 0");
        if (delta < 0.0 || delta > std::numbers::pi / 2) {
            throw std::invalid_argument("ProtocolParams: delta must lie in [0, pi/2]");
        }
        if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("ProtocolParams: eta must lie in (0, 1]");
        if (!(p_dark >= 0.0 && p_dark < 1.0)) throw std::invalid_argument("ProtocolParams: p_dark must lie in [0, 1)");
    }
};

/// Rates entering the phase-error bound, all per emitted pulse pair.
struct Observables {
    double lambda_s = 0.0;    // Bob holds a single-photon qubit
    double lambda_fil = 0.0;  // filter succeeded (conclusive)
    double lambda_bit = 0.0;  // conclusive with a bit error
    double lambda_1x = 0.0;   // Alice's Gedanken X measurement gives 1

    void validate() const {
        const double slack = 1e-15;
        if (!(lambda_bit >= 0.0 && lambda_bit <= lambda_fil + slack && lambda_fil <= lambda_s + slack &&
              lambda_s <= 1.0 + slack)) {
            throw std::invalid_argument("Observables: need 0 <= bit <= fil <= s <= 1");
        }
        if (!(lambda_1x >= 0.0 && lambda_1x <= 1.0)) {
            throw std::invalid_argument("Observables: lambda_1x must lie in [0, 1]");
        }
    }
};

/// eta(l) = 0.045 * 10^(-0.21 l / 10)
inline double channel_eta(double l_km) {
    if (!(l_km >= 0.0) || !std::isfinite(l_km)) throw std::invalid_argument("channel_eta: distance must be >= 0");
    return kTransmissionAtZeroKm * std::pow(10.0, -kFiberLossDbPerKm * l_km / 10.0);
}

// ---------------------------------------------------------------------------
// Bob's measurement
// ---------------------------------------------------------------------------

struct MeasurementKit {
    qstate::QubitOperator f0;        // conclusive, bit 0
    qstate::QubitOperator f1;        // conclusive, bit 1
    qstate::QubitOperator f_inconc;  // inconclusive
    qstate::QubitOperator f_s;       // filter Kraus operator
};

/// POVM {F0, F1, F_inconc} on the single-photon qubit and the filter F_s with
/// F_j = P(F_s^dagger |j_y>) and F_inconc = 1 - F_s^dagger F_s.
inline MeasurementKit measurement_kit(double delta) {
    using qstate::QubitOperator;
    if (!(delta > 0.0 && delta < std::numbers::pi)) {
        throw std::invalid_argument("measurement_kit: delta must lie in (0, pi)");
    }
    MeasurementKit kit;
    kit.f0 = 0.5 * QubitOperator::projector(qstate::phi_bar_ket(1, delta));
    kit.f1 = 0.5 * QubitOperator::projector(qstate::phi_bar_ket(0, delta));
    kit.f_inconc = QubitOperator::identity() - kit.f0 - kit.f1;
    kit.f_s = std::sin(delta / 2.0) * QubitOperator::projector(qstate::x_ket(0)) +
              std::cos(delta / 2.0) * QubitOperator::projector(qstate::x_ket(1));
    return kit;
}

// ---------------------------------------------------------------------------
// Detector statistics
// ---------------------------------------------------------------------------

/// Mean photon numbers at D_S and D_M for one pulse pair reaching Bob with
/// transmission eta. Matched bits leave 2 eta mu sin^2(delta) in the signal port.
struct DetectorMeans {
    double signal = 0.0;
    double monitor = 0.0;
};

inline DetectorMeans detector_means(double mu, double delta, double eta, bool bits_match) {
    const double total = 2.0 * eta * mu;
    if (!bits_match) return {0.0, total};
    const double s = std::sin(delta);
    const double c = std::cos(delta);
    return {total * s * s, total * c * c};
}

struct ClickProbabilities {
    double conclusive_matched = 0.0;  // D_S clicks given j_A = j_B
    double monitor = 0.0;             // D_M clicks given j_A = j_B
};

inline ClickProbabilities noise_free_click_probs(const ProtocolParams& params) {
    params.validate();
    const auto m = detector_means(params.mu, params.delta, params.eta, true);
    return {-std::expm1(-m.signal), -std::expm1(-m.monitor)};
}

/// Probability that D_M clicks at all, averaged over j_A, j_B and the dark-count branch.
/// In a dark event the single photon is seen by D_M with probability 1/2.
inline double expected_monitor_click_rate(const ProtocolParams& params) {
    params.validate();
    const auto matched = detector_means(params.mu, params.delta, params.eta, true);
    const auto unmatched = detector_means(params.mu, params.delta, params.eta, false);
    const double light = 0.5 * (-std::expm1(-matched.monitor) - std::expm1(-unmatched.monitor));
    return (1.0 - params.p_dark) * light + 0.5 * params.p_dark;
}

/// Probability of an inconclusive event: D_M sees exactly one photon and D_S none.
inline double expected_inconclusive_rate(const ProtocolParams& params) {
    params.validate();
    const auto matched = detector_means(params.mu, params.delta, params.eta, true);
    const auto unmatched = detector_means(params.mu, params.delta, params.eta, false);
    const double light = 0.5 * (matched.monitor * std::exp(-matched.monitor - matched.signal) +
                                unmatched.monitor * std::exp(-unmatched.monitor));
    return (1.0 - params.p_dark) * light + 0.5 * params.p_dark;
}

/// Probability that D_M does not register exactly one photon.
inline double monitor_miss_probability(const ProtocolParams& params) {
    params.validate();
    const auto matched = detector_means(params.mu, params.delta, params.eta, true);
    const auto unmatched = detector_means(params.mu, params.delta, params.eta, false);
    const double single = 0.5 * (matched.monitor * std::exp(-matched.monitor) +
                                 unmatched.monitor * std::exp(-unmatched.monitor));
    return (1.0 - params.p_dark) * (1.0 - single) + 0.5 * params.p_dark;
}

// ---------------------------------------------------------------------------
// Source and observables
// ---------------------------------------------------------------------------

struct PulsePair {
    std::complex<double> signal;
    std::complex<double> reference;
};

/// Coherent amplitudes Alice emits for j_A = 0 and j_A = 1.
inline std::array<PulsePair, 2> source_states(const ProtocolParams& params) {
    params.validate();
    const double amp = std::sqrt(params.mu);
    return {PulsePair{std::polar(amp, params.delta), amp}, PulsePair{std::polar(amp, -params.delta), amp}};
}

/// Alice's Y-basis qubit entangled with the single-photon part of the pulse
/// pair, after Bob's filter succeeds, without noise. Normalized.
inline qstate::TwoQubitKet filtered_joint_state(double mu, double delta) {
    const ProtocolParams params{mu, delta, 1.0, 0.0};
    const auto pulses = source_states(params);
    const auto kit = measurement_kit(delta);
    qstate::TwoQubitKet joint;
    for (int j = 0; j < 2; ++j) {
        const auto sp = qstate::make_coherent(pulses[j].signal);
        const auto rp = qstate::make_coherent(pulses[j].reference);
        const auto single = qstate::single_photon_qubit(sp, rp);
        if (!single) throw std::domain_error("filtered_joint_state: no single-photon component");
        joint = joint + qstate::kron(qstate::y_ket(j), qstate::apply(kit.f_s, single->qubit));
    }
    if (!(joint.squared_norm() > 0.0)) throw std::domain_error("filtered_joint_state: filter never succeeds");
    return joint.normalized();
}

/// Probability that Alice's Gedanken X measurement on her half of
///   |Phi> = (|0_y>|e^{i delta} sqrt(mu)> + |1_y>|e^{-i delta} sqrt(mu)>) |sqrt(mu)> / sqrt(2)
/// returns 1.
///
/// Tracing out the pulses leaves O/2 on the |0_y><1_y| element of rho_A, with
///   O = <e^{-i delta} sqrt(mu) | e^{i delta} sqrt(mu)> = exp(-2 mu sin^2 delta) exp(i mu sin 2delta),
/// and <1_x|rho_A|1_x> = (1 + Im O)/2.
inline double lambda_1x_closed_form(double mu, double delta) {
    if (!(mu >= 0.0)) throw std::invalid_argument("lambda_1x_closed_form: mu must be >= 0");
    const double s = std::sin(delta);
    return 0.5 * (1.0 + std::exp(-2.0 * mu * s * s) * std::sin(mu * std::sin(2.0 * delta)));
}

/// Closed-form observables for the channel that maps each pulse pair to
///   (1-p) |e^{±i delta} sqrt(eta mu), sqrt(eta mu)> + p |1_z>.
/// Only the product eta*mu enters the exponentials, so large mu stays finite.
inline Observables observables(const ProtocolParams& params) {
    params.validate();
    const double x = params.eta * params.mu;
    const double damp = std::exp(-2.0 * x);
    const double s = std::sin(params.delta);
    const double p = params.p_dark;
    Observables o;
    o.lambda_s = (1.0 - p) * 2.0 * x * damp + p;
    o.lambda_fil = (1.0 - p) * x * s * s * damp + 0.5 * p;
    o.lambda_bit = 0.25 * p;
    o.lambda_1x = lambda_1x_closed_form(params.mu, params.delta);
    return o;
}

}  // namespace phasekey
