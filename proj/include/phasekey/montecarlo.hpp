// montecarlo.hpp
// Pulse-by-pulse simulation of the photon-number-resolving variant of the
// protocol, with an honest channel, a beam-splitting tap, or an
// unambiguous-discrimination attacker that resends vacuum on failure.
//
// Each trial draws its random numbers from its own SplitMix64 stream keyed by
// (seed, trial index), so aggregates do not depend on how trials are split
// across threads.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "phasekey/parallel.hpp"
#include "phasekey/protocol.hpp"

namespace phasekey::montecarlo {

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    /// Independent stream for one trial.
    static SplitMix64 for_trial(std::uint64_t seed, std::uint64_t trial) {
        return SplitMix64(splitmix64_mix(seed ^ splitmix64_mix(trial + 0x9e3779b97f4a7c15ULL)));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64_mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bit() { return ((*this)() >> 63) != 0; }

private:
    std::uint64_t state_;
};

/// Poisson variate. Inversion for small means; std::poisson_distribution otherwise.
inline int sample_poisson(double mean, SplitMix64& rng) {
    if (mean <= 0.0) return 0;
    if (mean < 30.0) {
        const double u = rng.uniform();
        double p = std::exp(-mean);
        double cdf = p;
        int k = 0;
        while (u >= cdf && k < 1000) {
            ++k;
            p *= mean / k;
            cdf += p;
        }
        return k;
    }
    std::poisson_distribution<int> dist(mean);
    return dist(rng);
}

// ---------------------------------------------------------------------------
// Attacks
// ---------------------------------------------------------------------------

enum class AttackKind { honest, beam_split, usd_vacuum };

struct AttackModel {
    AttackKind kind = AttackKind::honest;
    double tap_fraction = 0.0;  // beam_split: share of light diverted to Eve
    double usd_success = 0.0;   // usd_vacuum: probability that Eve's discrimination succeeds

    void validate() const {
        if (!(tap_fraction >= 0.0 && tap_fraction <= 1.0)) throw std::invalid_argument("AttackModel: tap_fraction outside [0, 1]");
        if (!(usd_success >= 0.0 && usd_success <= 1.0)) throw std::invalid_argument("AttackModel: usd_success outside [0, 1]");
    }
};

/// Per-trial law after Eve's action: with probability pass_probability the
/// pulse pair arrives with transmission eta, otherwise Bob receives vacuum.
struct SamplingLaw {
    double pass_probability = 1.0;
    double eta = 1.0;
};

inline SamplingLaw attack_transform(const AttackModel& attack, const ProtocolParams& params) {
    attack.validate();
    params.validate();
    switch (attack.kind) {
        case AttackKind::honest:
            return {1.0, params.eta};
        case AttackKind::beam_split:
            return {1.0, params.eta * (1.0 - attack.tap_fraction)};
        case AttackKind::usd_vacuum:
            // Success: Eve knows the state and resends it without loss.
            return {attack.usd_success, 1.0};
    }
    throw std::logic_error("attack_transform: unknown attack");
}

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

enum class Classification { conclusive, inconclusive, loss };

struct TrialOutcome {
    int j_a = 0;
    int j_b = 0;
    int n_s = 0;  // photons at D_S
    int n_m = 0;  // photons at D_M
    Classification classification = Classification::loss;
    bool dark = false;

    bool bit_error() const { return classification == Classification::conclusive && j_a != j_b; }
};

inline Classification classify(int n_s, int n_m) {
    if (n_s == 1 && n_m == 0) return Classification::conclusive;
    if (n_m == 1 && n_s == 0) return Classification::inconclusive;
    return Classification::loss;
}

/// One round: Alice's and Bob's bits, the channel (or Eve), and photon counting.
/// A dark event replaces the pulse pair by one photon that reaches D_S or D_M
/// with probability 1/2 each; the bits are independent, so half of the
/// conclusive dark events are errors.
inline TrialOutcome simulate_trial(const ProtocolParams& params, const SamplingLaw& law, std::uint64_t seed,
                                   std::uint64_t trial) {
    auto rng = SplitMix64::for_trial(seed, trial);
    TrialOutcome t;
    t.j_a = rng.bit() ? 1 : 0;
    t.j_b = rng.bit() ? 1 : 0;
    if (rng.uniform() < params.p_dark) {
        t.dark = true;
        if (rng.bit()) {
            t.n_s = 1;
        } else {
            t.n_m = 1;
        }
    } else if (rng.uniform() < law.pass_probability) {
        const auto m = detector_means(params.mu, params.delta, law.eta, t.j_a == t.j_b);
        t.n_s = sample_poisson(m.signal, rng);
        t.n_m = sample_poisson(m.monitor, rng);
    }
    t.classification = classify(t.n_s, t.n_m);
    return t;
}

struct SimStats {
    std::uint64_t n_trials = 0;
    std::uint64_t n_conclusive = 0;
    std::uint64_t n_inconclusive = 0;
    std::uint64_t n_loss = 0;
    std::uint64_t n_monitor_click = 0;   // D_M registered at least one photon
    std::uint64_t n_monitor_single = 0;  // D_M registered exactly one photon
    std::uint64_t n_single_photon = 0;   // exactly one photon in total (qubit arrival)
    std::uint64_t n_bit_error = 0;
    std::uint64_t seed = 0;

    SimStats& operator+=(const SimStats& o) {
        n_trials += o.n_trials;
        n_conclusive += o.n_conclusive;
        n_inconclusive += o.n_inconclusive;
        n_loss += o.n_loss;
        n_monitor_click += o.n_monitor_click;
        n_monitor_single += o.n_monitor_single;
        n_single_photon += o.n_single_photon;
        n_bit_error += o.n_bit_error;
        return *this;
    }

    friend bool operator==(const SimStats&, const SimStats&) = default;

    double fraction(std::uint64_t count) const {
        return n_trials == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(n_trials);
    }
};

inline void tally(SimStats& s, const TrialOutcome& t) {
    ++s.n_trials;
    switch (t.classification) {
        case Classification::conclusive: ++s.n_conclusive; break;
        case Classification::inconclusive: ++s.n_inconclusive; break;
        case Classification::loss: ++s.n_loss; break;
    }
    if (t.n_m >= 1) ++s.n_monitor_click;
    if (t.n_m == 1) ++s.n_monitor_single;
    if (t.n_s + t.n_m == 1) ++s.n_single_photon;
    if (t.bit_error()) ++s.n_bit_error;
}

inline SimStats run_trials(const ProtocolParams& params, const AttackModel& attack, std::uint64_t n,
                           std::uint64_t seed, unsigned threads = default_thread_count()) {
    if (n < 1) throw std::invalid_argument("run_trials: need at least one trial");
    const SamplingLaw law = attack_transform(attack, params);
    const std::uint64_t chunks = std::min<std::uint64_t>(n, 64);
    std::vector<SimStats> partial(chunks);
    parallel_for(
        chunks,
        [&](std::size_t c) {
            const std::uint64_t begin = n * c / chunks;
            const std::uint64_t end = n * (c + 1) / chunks;
            SimStats& s = partial[c];
            for (std::uint64_t i = begin; i < end; ++i) tally(s, simulate_trial(params, law, seed, i));
        },
        threads);
    SimStats total;
    for (const auto& s : partial) total += s;
    total.seed = seed;
    return total;
}

// ---------------------------------------------------------------------------
// Abort test and parameter estimation
// ---------------------------------------------------------------------------

enum class AbortDecision { proceed, abort };

/// Aborts when the monitor-click ratio falls more than tolerance_sigmas
/// binomial standard errors below the expected rate.
inline AbortDecision abort_decision(const SimStats& stats, double expected_monitor_rate, double tolerance_sigmas = 5.0) {
    if (stats.n_trials == 0) throw std::invalid_argument("abort_decision: no trials");
    if (expected_monitor_rate <= 0.0) return AbortDecision::proceed;
    const double n = static_cast<double>(stats.n_trials);
    const double sigma = std::sqrt(expected_monitor_rate * (1.0 - expected_monitor_rate) / n);
    const double observed = stats.fraction(stats.n_monitor_click);
    return observed < expected_monitor_rate - tolerance_sigmas * sigma ? AbortDecision::abort : AbortDecision::proceed;
}

struct BitErrorEstimate {
    double rate = 0.0;           // errors / tested
    double wilson_center = 0.0;  // centre of the 95% Wilson interval
    double half_width = 0.0;     // half-width of the 95% Wilson interval
    std::uint64_t n_tested = 0;
    std::uint64_t n_errors = 0;

    bool covers(double p) const { return std::abs(p - wilson_center) <= half_width; }
};

/// Samples round(test_fraction * n_conclusive) conclusive events without
/// replacement (at least one) and reports the observed error rate with a 95%
/// Wilson interval. nullopt when there are no conclusive events.
inline std::optional<BitErrorEstimate> estimate_bit_error(const SimStats& stats, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction <= 1.0)) {
        throw std::invalid_argument("estimate_bit_error: test_fraction must lie in (0, 1]");
    }
    if (stats.n_conclusive == 0) return std::nullopt;
    const std::uint64_t total = stats.n_conclusive;
    const auto k = std::clamp<std::uint64_t>(
        static_cast<std::uint64_t>(std::llround(test_fraction * static_cast<double>(total))), 1, total);

    // Sequential draw: each pick is an error with probability errors_left / items_left.
    SplitMix64 rng(splitmix64_mix(seed ^ 0x5bd1e995ULL));
    std::uint64_t errors_left = stats.n_bit_error;
    std::uint64_t items_left = total;
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < k; ++i) {
        const double u = rng.uniform() * static_cast<double>(items_left);
        if (u < static_cast<double>(errors_left)) {
            ++hits;
            --errors_left;
        }
        --items_left;
    }

    constexpr double z = 1.959963984540054;
    const double n = static_cast<double>(k);
    const double p = static_cast<double>(hits) / n;
    const double denom = 1.0 + z * z / n;
    BitErrorEstimate e;
    e.rate = p;
    e.wilson_center = (p + z * z / (2.0 * n)) / denom;
    e.half_width = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    e.n_tested = k;
    e.n_errors = hits;
    return e;
}

}  // namespace phasekey::montecarlo
