#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "qkdsim/channels.hpp"
#include "qkdsim/density_matrix.hpp"
#include "qkdsim/photon_source.hpp"
#include "qkdsim/pointer.hpp"
#include "qkdsim/rng.hpp"

namespace qkdsim {

enum class AttackKind { NoAttack, GuessOnly, Partial, Weak, InterceptResend, PnsPartial };

/// Which basis Eve measures (or couples her probe) in, per pulse.
enum class BasisPolicy { RandomBasis, FixedZ };

/// How the per-pulse measurement probability of the partial attack is
/// realized. Bernoulli draws an independent coin per pulse; DutyCycle
/// measures the first floor(eps * N) of N pulses, the time-multiplexed
/// equivalent with measurement-window fraction equal to eps.
enum class PartialRealization { Bernoulli, DutyCycle };

/// Calibration-stage tampering with the receiver's interferometer bias.
/// The offset above the working point lowers interference visibility and
/// adds phase-basis errors while calibration runs.
struct NoiseInjection {
    double voltage_offset_mv = 0.0;
    double working_voltage_v = 0.92;
    double v_pi_v = 1.0;
    double step_mv = 20.0;
    int max_steps = 10;

    void validate() const {
        if (!(voltage_offset_mv >= 0.0) || !std::isfinite(voltage_offset_mv)) {
            throw std::invalid_argument("injection offset must be >= 0");
        }
        if (!(v_pi_v > 0.0)) throw std::invalid_argument("injection v_pi must be positive");
        if (!(step_mv > 0.0)) throw std::invalid_argument("injection step must be positive");
        const double steps = voltage_offset_mv / step_mv;
        const double nearest = std::round(steps);
        if (std::abs(steps - nearest) > 1e-9) {
            throw std::invalid_argument("injection offset must be a multiple of the step");
        }
        if (nearest > static_cast<double>(max_steps)) {
            throw std::invalid_argument("injection offset exceeds the step schedule");
        }
    }
};

/// Phase-basis error probability added while the injection is active:
/// the voltage offset maps linearly to an interferometer phase through the
/// half-wave voltage, and the visibility loss gives
/// Q_E = (1 - cos(pi * offset / v_pi)) / 2.
inline double injected_x_qber(const NoiseInjection& inj) {
    inj.validate();
    const double phase = std::numbers::pi * inj.voltage_offset_mv / (1000.0 * inj.v_pi_v);
    return 0.5 * (1.0 - std::cos(phase));
}

/// Eve's per-session strategy: what she does to each pulse, in which basis,
/// and (optionally) the calibration-stage noise injection schedule.
struct AttackStrategy {
    AttackKind kind = AttackKind::NoAttack;
    double eps = 0.0;
    BasisPolicy policy = BasisPolicy::RandomBasis;
    PointerShape pointer = PointerShape::gaussian(1.0);
    Observable observable{};
    PartialRealization realization = PartialRealization::Bernoulli;
    std::optional<NoiseInjection> injection;

    static AttackStrategy none() { return {}; }

    static AttackStrategy guess_only() {
        AttackStrategy s;
        s.kind = AttackKind::GuessOnly;
        return s;
    }

    static AttackStrategy partial(double eps, BasisPolicy policy = BasisPolicy::RandomBasis) {
        AttackStrategy s;
        s.kind = AttackKind::Partial;
        s.eps = eps;
        s.policy = policy;
        return s;
    }

    static AttackStrategy weak(const PointerShape& shape, double eps,
                               BasisPolicy policy = BasisPolicy::RandomBasis) {
        AttackStrategy s;
        s.kind = AttackKind::Weak;
        s.eps = eps;
        s.policy = policy;
        s.pointer = shape;
        return s;
    }

    static AttackStrategy intercept(BasisPolicy policy = BasisPolicy::RandomBasis) {
        AttackStrategy s;
        s.kind = AttackKind::InterceptResend;
        s.eps = 1.0;
        s.policy = policy;
        return s;
    }

    static AttackStrategy pns_partial(double eps, BasisPolicy policy = BasisPolicy::RandomBasis) {
        AttackStrategy s;
        s.kind = AttackKind::PnsPartial;
        s.eps = eps;
        s.policy = policy;
        return s;
    }

    void validate() const {
        switch (kind) {
            case AttackKind::Partial:
            case AttackKind::PnsPartial:
                ChannelStrength{eps}; // throws outside [0, 1]
                break;
            case AttackKind::Weak:
                if (!(eps >= 0.0) || !std::isfinite(eps)) {
                    throw std::invalid_argument("weak attack eps must be finite and >= 0");
                }
                observable.validate();
                break;
            default:
                break;
        }
        if (injection) injection->validate();
    }
};

/// Round-position context; only the duty-cycle realization reads it.
struct AttackContext {
    std::size_t round_index = 0;
    std::size_t total_rounds = 0; // 0 when unknown (duty cycle then rejected)
};

struct AttackOutcome {
    int eve_bit = 0;
    bool eve_measured = false;
    Basis eve_basis = Basis::Z;
    int bob_photons = 0;
    DensityMatrix rho_out;
};

namespace detail {

inline Basis draw_policy_basis(BasisPolicy policy, RandomStream& rng) {
    if (policy == BasisPolicy::FixedZ) return Basis::Z;
    return rng.coin() == 0 ? Basis::Z : Basis::X;
}

inline bool duty_cycle_hit(double eps, const AttackContext& ctx) {
    if (ctx.total_rounds == 0) {
        throw std::invalid_argument("duty-cycle realization needs the total round count");
    }
    const auto window =
        static_cast<std::size_t>(std::floor(eps * static_cast<double>(ctx.total_rounds)));
    return ctx.round_index < window;
}

/// Probe-based step. The probe couples to the time observable expressed in
/// Eve's chosen basis; in the conjugate basis the pointer mean never moves
/// and her decoded bit degenerates to a fair guess on its own.
inline AttackOutcome weak_step(const AttackStrategy& s, const DensityMatrix& rho_in,
                               int photon_n, RandomStream& rng) {
    AttackOutcome out{0, s.eps > 0.0, Basis::Z, photon_n, rho_in};
    out.eve_basis = draw_policy_basis(s.policy, rng);

    const bool conjugated = out.eve_basis == Basis::X;
    const DensityMatrix coupled = conjugated ? hadamard_conjugate(rho_in) : rho_in;

    // Pointer reading: collapse the coupling-basis branch, then draw x from
    // the correspondingly shifted profile.
    const double p_early = born_probability(coupled, Basis::Z, 0);
    const int branch = rng.uniform() < p_early ? 0 : 1;
    const double lambda = s.observable.lambda(branch);
    out.eve_bit = sample_outcome(s.pointer, s.eps, lambda, rng).bit;

    const DensityMatrix dephased = weak_channel_exact(coupled, s.pointer, s.eps, s.observable);
    out.rho_out = conjugated ? hadamard_conjugate(dephased) : dephased;
    return out;
}

} // namespace detail

/// Applies one pulse worth of the strategy. `photon_n` is the pulse photon
/// number after the source; vacuum pulses never reach this call.
inline AttackOutcome apply_attack(const AttackStrategy& strategy, const DensityMatrix& rho_in,
                                  Basis alice_basis, int photon_n, const AttackContext& ctx,
                                  RandomStream& rng) {
    AttackOutcome out{0, false, Basis::Z, photon_n, rho_in};
    switch (strategy.kind) {
        case AttackKind::NoAttack:
        case AttackKind::GuessOnly:
            out.eve_bit = rng.coin();
            return out;

        case AttackKind::Partial: {
            const bool hit = strategy.realization == PartialRealization::DutyCycle
                                 ? detail::duty_cycle_hit(strategy.eps, ctx)
                                 : rng.bernoulli(strategy.eps);
            if (!hit) {
                out.eve_bit = rng.coin();
                return out;
            }
            out.eve_basis = detail::draw_policy_basis(strategy.policy, rng);
            const auto ir = intercept_resend(rho_in, out.eve_basis, rng);
            out.eve_bit = ir.eve_bit;
            out.eve_measured = true;
            out.rho_out = ir.state_out;
            return out;
        }

        case AttackKind::Weak:
            return detail::weak_step(strategy, rho_in, photon_n, rng);

        case AttackKind::InterceptResend: {
            out.eve_basis = detail::draw_policy_basis(strategy.policy, rng);
            const auto ir = intercept_resend(rho_in, out.eve_basis, rng);
            out.eve_bit = ir.eve_bit;
            out.eve_measured = true;
            out.rho_out = ir.state_out;
            return out;
        }

        case AttackKind::PnsPartial: {
            const auto split = pns_split(photon_n);
            if (split.eve_keeps >= 1) {
                // Stored photon, read out in Alice's basis after
                // reconciliation; Bob's copies pass undisturbed.
                out.eve_basis = alice_basis;
                out.eve_bit = sample_measurement_bit(rho_in, alice_basis, rng);
                out.eve_measured = true;
                out.bob_photons = split.bob_gets;
                return out;
            }
            AttackStrategy single = strategy;
            single.kind = AttackKind::Partial;
            return apply_attack(single, rho_in, alice_basis, photon_n, ctx, rng);
        }
    }
    return out;
}

} // namespace qkdsim
