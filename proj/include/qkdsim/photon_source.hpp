#pragma once

#include <cmath>
#include <stdexcept>

#include "qkdsim/rng.hpp"

namespace qkdsim {

/// Weak-coherent-state source parameters.
struct SourceConfig {
    /// Mean photon number per pulse.
    double mu = 0.1;

    void validate() const {
        if (!(mu > 0.0) || !std::isfinite(mu)) {
            throw std::invalid_argument("source mu must be positive and finite");
        }
    }
};

/// Photon-number distribution of an attenuated laser pulse:
/// P(n) = e^{-mu} mu^n / n!, evaluated in log space.
inline double poisson_pmf(int n, double mu) {
    if (n < 0) return 0.0;
    if (!(mu > 0.0)) throw std::invalid_argument("poisson_pmf requires mu > 0");
    return std::exp(-mu + n * std::log(mu) - std::lgamma(static_cast<double>(n) + 1.0));
}

/// Poisson sample via the product-of-uniforms method. One uniform decides a
/// vacuum pulse, which dominates at the mu << 1 operating point.
inline int sample_photon_number(double mu, RandomStream& rng) {
    if (!(mu > 0.0)) throw std::invalid_argument("sample_photon_number requires mu > 0");
    const double threshold = std::exp(-mu);
    int n = -1;
    double product = 1.0;
    do {
        product *= rng.uniform();
        ++n;
    } while (product > threshold);
    return n;
}

struct PnsSplit {
    int eve_keeps;
    int bob_gets;
};

/// Photon-number-splitting rule: multi-photon pulses lose exactly one photon
/// to the eavesdropper; vacuum and single-photon pulses pass through whole.
inline PnsSplit pns_split(int n) {
    if (n < 0) throw std::invalid_argument("photon number must be non-negative");
    if (n >= 2) return {1, n - 1};
    return {0, n};
}

} // namespace qkdsim
