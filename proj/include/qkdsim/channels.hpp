#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "qkdsim/density_matrix.hpp"
#include "qkdsim/pointer.hpp"

namespace qkdsim {

/// Unified interaction strength for the probabilistic channels; the partial
/// and monitoring channels share one parameter in [0, 1].
struct ChannelStrength {
    double eps;

    explicit ChannelStrength(double value) : eps(value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw std::invalid_argument("channel strength must lie in [0, 1]");
        }
    }
};

/// Monitoring channel (1 - delta) rho + delta sum_i A_i rho A_i^dag with
/// A_i = P_i / sqrt(2) over the four protocol projectors. Realized through
/// the generic Kraus route, which also verifies completeness.
inline DensityMatrix monitoring_channel(const DensityMatrix& rho, double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw std::invalid_argument("monitoring delta must lie in [0, 1]");
    }
    std::array<Mat2, 5> ops;
    ops[0] = std::sqrt(1.0 - delta) * Mat2::identity();
    const double w = std::sqrt(0.5 * delta);
    const auto& projs = bb84_projectors();
    for (std::size_t i = 0; i < 4; ++i) ops[i + 1] = w * projs[i].matrix;
    return apply_kraus(rho, ops);
}

/// Partial-measurement channel (1 - gamma) rho + (gamma/2) sum_i P_i rho P_i,
/// evaluated directly as the affine map. Coincides with monitoring_channel
/// at delta = gamma; the two code paths stay independent so tests can check
/// the equivalence.
inline DensityMatrix partial_channel(const DensityMatrix& rho, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("partial gamma must lie in [0, 1]");
    }
    Mat2 projected;
    for (const auto& p : bb84_projectors()) {
        projected = projected + p.matrix * rho.matrix() * p.matrix;
    }
    const Mat2 out = (1.0 - gamma) * rho.matrix() + (0.5 * gamma) * projected;
    return DensityMatrix::from_matrix(out);
}

/// Exact probe-based weak-measurement channel: the Z diagonal is untouched
/// and the off-diagonals are scaled by the pointer overlap chi_01. eps is a
/// pointer displacement, not restricted to [0, 1]; the physical knob is
/// eps relative to the pointer width.
inline DensityMatrix weak_channel_exact(const DensityMatrix& rho, const PointerShape& shape,
                                        double eps, const Observable& obs = {}) {
    const double chi = overlap_chi(shape, eps, obs, 0, 1);
    Mat2 out = rho.matrix();
    out(0, 1) = chi * out(0, 1);
    out(1, 0) = chi * out(1, 0);
    return DensityMatrix::from_matrix(out);
}

struct InterceptResult {
    int eve_bit;
    DensityMatrix state_out;
};

/// Full intercept-and-resend step: projective measurement in `eve_basis`,
/// resending the observed eigenstate.
inline InterceptResult intercept_resend(const DensityMatrix& state_in, Basis eve_basis,
                                        RandomStream& rng) {
    const int bit = sample_measurement_bit(state_in, eve_basis, rng);
    return {bit, dm_from_state(state_for(eve_basis, bit))};
}

} // namespace qkdsim
