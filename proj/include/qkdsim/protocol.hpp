#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qkdsim/attacks.hpp"
#include "qkdsim/density_matrix.hpp"
#include "qkdsim/photon_source.hpp"
#include "qkdsim/rng.hpp"

namespace qkdsim {

/// StandardBB84 distills key from every basis-matched round; SimplifiedBB84
/// distills key only from Z while X rounds monitor the error rate.
enum class ProtocolVariant { StandardBB84, SimplifiedBB84 };

/// Environmental error rates, applied as independent classical bit flips on
/// detected outcomes, per measurement basis. The same rates corrupt the
/// eavesdropper's recorded outcomes: the environment does not take sides.
struct NoiseConfig {
    double q_env_z = 0.0;
    double q_env_x = 0.0;

    double for_basis(Basis b) const { return b == Basis::Z ? q_env_z : q_env_x; }

    void validate() const {
        if (!(q_env_z >= 0.0 && q_env_z <= 0.5) || !(q_env_x >= 0.0 && q_env_x <= 0.5)) {
            throw std::invalid_argument("environmental error rates must lie in [0, 0.5]");
        }
    }
};

/// One protocol round. bob_bit is empty exactly when no detection occurred;
/// eve_bit is always present (a guess when she did not measure).
struct PulseRecord {
    int alice_bit;
    Basis alice_basis;
    int photon_n;
    int eve_bit;
    bool eve_measured;
    Basis bob_basis;
    std::optional<int> bob_bit;
};

/// Session figures of merit. Error rates are Hamming distances over the
/// sifted strings; gain is the fraction of Eve's bits agreeing with Alice
/// over the key-bearing rounds. ci_halfwidth is the 3-sigma binomial
/// half-width of the monitored error rate.
struct SessionStats {
    std::size_t sifted_len = 0;
    double qber_z = 0.0;
    double qber_x = 0.0;
    double qber_combined = 0.0;
    double gain = 0.0;
    bool aborted = false;
    double ci_halfwidth = 0.0;
    std::size_t z_count = 0;
    std::size_t x_count = 0;
};

inline constexpr double kDefaultAbortThreshold = 0.11;

struct PreparedPulse {
    int bit;
    Basis basis;
    BasisState state;
};

/// Alice's preparation step: uniform bit, basis Z with probability
/// `basis_bias`, encoded in the matching protocol state.
inline PreparedPulse alice_prepare(ProtocolVariant /*variant*/, double basis_bias,
                                   RandomStream& rng) {
    if (!(basis_bias > 0.0 && basis_bias < 1.0)) {
        throw std::invalid_argument("basis bias must lie in (0, 1)");
    }
    const int bit = rng.coin();
    const Basis basis = rng.uniform() < basis_bias ? Basis::Z : Basis::X;
    return {bit, basis, state_for(basis, bit)};
}

struct BobOutcome {
    Basis basis;
    int bit;
};

/// Bob's detection: a passive 50:50 splitter selects the basis, then the
/// Born rule decides the click.
inline BobOutcome bob_measure(const DensityMatrix& rho, RandomStream& rng) {
    const Basis basis = rng.coin() == 0 ? Basis::Z : Basis::X;
    return {basis, sample_measurement_bit(rho, basis, rng)};
}

/// Sifts detected, basis-matched rounds and scores the session.
///
/// StandardBB84 keys on every matched round: the combined error rate and the
/// gain run over the full sifted string, and the abort compares the combined
/// rate against the threshold. SimplifiedBB84 keys on Z only: the gain and
/// sifted length cover Z-matched rounds, X-matched rounds give the monitored
/// rate, and the abort fires on the X rate alone.
inline SessionStats sift_and_score(const std::vector<PulseRecord>& records,
                                   ProtocolVariant variant,
                                   double abort_threshold = kDefaultAbortThreshold) {
    std::size_t z_len = 0, z_err = 0, z_eve_ok = 0;
    std::size_t x_len = 0, x_err = 0, x_eve_ok = 0;
    for (const auto& r : records) {
        if (!r.bob_bit.has_value() || r.alice_basis != r.bob_basis) continue;
        const bool err = *r.bob_bit != r.alice_bit;
        const bool eve_ok = r.eve_bit == r.alice_bit;
        if (r.alice_basis == Basis::Z) {
            ++z_len;
            z_err += err;
            z_eve_ok += eve_ok;
        } else {
            ++x_len;
            x_err += err;
            x_eve_ok += eve_ok;
        }
    }

    SessionStats stats;
    stats.z_count = z_len;
    stats.x_count = x_len;
    stats.qber_z = z_len > 0 ? static_cast<double>(z_err) / static_cast<double>(z_len) : 0.0;
    stats.qber_x = x_len > 0 ? static_cast<double>(x_err) / static_cast<double>(x_len) : 0.0;
    const std::size_t total = z_len + x_len;
    stats.qber_combined =
        total > 0 ? static_cast<double>(z_err + x_err) / static_cast<double>(total) : 0.0;

    const auto halfwidth = [](double q, std::size_t n) {
        return n > 0 ? 3.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(n)) : 0.0;
    };

    if (variant == ProtocolVariant::StandardBB84) {
        if (total == 0) throw EmptySiftedKey("no basis-matched detections to sift");
        stats.sifted_len = total;
        stats.gain = static_cast<double>(z_eve_ok + x_eve_ok) / static_cast<double>(total);
        stats.aborted = stats.qber_combined > abort_threshold;
        stats.ci_halfwidth = halfwidth(stats.qber_combined, total);
    } else {
        if (z_len == 0) throw EmptySiftedKey("no Z-matched detections to distill key from");
        stats.sifted_len = z_len;
        stats.gain = static_cast<double>(z_eve_ok) / static_cast<double>(z_len);
        stats.aborted = stats.qber_x > abort_threshold;
        stats.ci_halfwidth = halfwidth(stats.qber_x, x_len);
    }
    return stats;
}

namespace detail {

inline void run_one_pulse(ProtocolVariant variant, const SourceConfig& source,
                          const NoiseConfig& noise, const AttackStrategy& attack,
                          const AttackContext& ctx, RandomStream& rng,
                          std::vector<PulseRecord>& records) {
    const int n = sample_photon_number(source.mu, rng);
    if (n == 0) return; // vacuum pulse, null detection

    const PreparedPulse pulse = alice_prepare(variant, 0.5, rng);
    const DensityMatrix rho = dm_from_state(pulse.state);
    AttackOutcome eve = apply_attack(attack, rho, pulse.basis, n, ctx, rng);
    if (eve.eve_measured) {
        const double q_eve = noise.for_basis(eve.eve_basis);
        if (q_eve > 0.0 && rng.bernoulli(q_eve)) eve.eve_bit ^= 1;
    }
    if (eve.bob_photons < 1) return; // nothing left for the receiver

    BobOutcome bob = bob_measure(eve.rho_out, rng);
    const double q_bob = noise.for_basis(bob.basis);
    if (q_bob > 0.0 && rng.bernoulli(q_bob)) bob.bit ^= 1;

    records.push_back(PulseRecord{pulse.bit, pulse.basis, n, eve.eve_bit, eve.eve_measured,
                                  bob.basis, bob.bit});
}

} // namespace detail

/// Runs a session of `n_pulses` emitted pulses. Vacuum pulses are dropped at
/// the detection stage; everything downstream of the explicit stream is
/// deterministic in (config, seed).
inline SessionStats run_session(ProtocolVariant variant, const SourceConfig& source,
                                const NoiseConfig& noise, const AttackStrategy& attack,
                                std::size_t n_pulses, RandomStream& rng,
                                double abort_threshold = kDefaultAbortThreshold) {
    if (n_pulses == 0) throw std::invalid_argument("session needs at least one pulse");
    source.validate();
    noise.validate();
    attack.validate();
    std::vector<PulseRecord> records;
    const double p_detect = -std::expm1(-source.mu);
    records.reserve(static_cast<std::size_t>(
        std::min(1.0, p_detect * 1.2) * static_cast<double>(n_pulses) + 64.0));
    for (std::size_t i = 0; i < n_pulses; ++i) {
        detail::run_one_pulse(variant, source, noise, attack, {i, n_pulses}, rng, records);
    }
    return sift_and_score(records, variant, abort_threshold);
}

/// Runs until `detected_target` pulses survive the detection stage. The
/// duty-cycle realization needs a fixed pulse count and is rejected here.
inline SessionStats run_session_detected(ProtocolVariant variant, const SourceConfig& source,
                                         const NoiseConfig& noise, const AttackStrategy& attack,
                                         std::size_t detected_target, RandomStream& rng,
                                         double abort_threshold = kDefaultAbortThreshold) {
    if (detected_target == 0) throw std::invalid_argument("detected target must be positive");
    source.validate();
    noise.validate();
    attack.validate();
    if (attack.kind == AttackKind::Partial &&
        attack.realization == PartialRealization::DutyCycle) {
        throw std::invalid_argument(
            "duty-cycle realization requires a fixed pulse count; use run_session");
    }
    std::vector<PulseRecord> records;
    records.reserve(detected_target);
    const double p_detect = -std::expm1(-source.mu);
    const auto emit_cap = static_cast<std::size_t>(
        50.0 * static_cast<double>(detected_target) / std::max(p_detect, 1e-9) + 1e6);
    std::size_t emitted = 0;
    while (records.size() < detected_target) {
        if (emitted++ > emit_cap) {
            throw SimulationError("detection target unreachable within the emission cap");
        }
        detail::run_one_pulse(variant, source, noise, attack, {emitted, 0}, rng, records);
    }
    return sift_and_score(records, variant, abort_threshold);
}

} // namespace qkdsim
