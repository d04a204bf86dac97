#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qkdsim/quadrature.hpp"
#include "qkdsim/rng.hpp"

namespace qkdsim {

enum class PointerKind { Gaussian, Rect, Triangle };

/// Continuous probe wavefunction used by the probe-based attack. The rect
/// and triangle templates are rescaled to unit L2 norm at construction, so
/// |amplitude|^2 is a probability density for every shape; the coupling then
/// stays unitary and overlaps are independent of the template's raw scale.
class PointerShape {
public:
    static PointerShape gaussian(double delta) {
        return PointerShape(PointerKind::Gaussian, delta, 0.0);
    }
    static PointerShape rect(double width, double center = 0.0) {
        return PointerShape(PointerKind::Rect, width, center);
    }
    static PointerShape triangle(double width, double center = 0.0) {
        return PointerShape(PointerKind::Triangle, width, center);
    }

    PointerKind kind() const { return kind_; }
    /// Delta for Gaussian, L for rect/triangle.
    double width() const { return width_; }
    double center() const { return center_; }

    /// L2-normalized amplitude at x.
    double amplitude(double x) const {
        const double u = x - center_;
        switch (kind_) {
            case PointerKind::Gaussian: {
                const double d2 = width_ * width_;
                return std::pow(2.0 * std::numbers::pi * d2, -0.25) *
                       std::exp(-u * u / (4.0 * d2));
            }
            case PointerKind::Rect:
                return std::abs(u) < 0.5 * width_ ? 1.0 / std::sqrt(width_) : 0.0;
            case PointerKind::Triangle: {
                if (std::abs(u) >= width_) return 0.0;
                const double scale = std::sqrt(1.5 / (width_ * width_ * width_));
                return scale * (width_ - std::abs(u));
            }
        }
        return 0.0;
    }

    /// Half-width of the effective support used for numeric overlaps.
    /// The Gaussian is truncated where the product integrand is far below
    /// the quadrature tolerance.
    double support_halfwidth() const {
        switch (kind_) {
            case PointerKind::Gaussian: return 10.0 * width_;
            case PointerKind::Rect: return 0.5 * width_;
            case PointerKind::Triangle: return width_;
        }
        return 0.0;
    }

    /// Derivative kinks / jumps of the amplitude shifted by `shift`; the
    /// quadrature splits its domain here so every piece is smooth.
    void append_breakpoints(double shift, std::vector<double>& out) const {
        const double c = center_ + shift;
        switch (kind_) {
            case PointerKind::Gaussian:
                break;
            case PointerKind::Rect:
                out.push_back(c - 0.5 * width_);
                out.push_back(c + 0.5 * width_);
                break;
            case PointerKind::Triangle:
                out.push_back(c - width_);
                out.push_back(c);
                out.push_back(c + width_);
                break;
        }
    }

    /// Draw x from the density |amplitude(x - shift)|^2.
    double sample(double shift, RandomStream& rng) const {
        const double c = center_ + shift;
        switch (kind_) {
            case PointerKind::Gaussian:
                return rng.normal(c, width_);
            case PointerKind::Rect:
                return c + width_ * (rng.uniform() - 0.5);
            case PointerKind::Triangle: {
                // Inverse CDF of the squared-triangle density
                // 3 (L - |u|)^2 / (2 L^3) on [-L, L].
                const double u = rng.uniform();
                if (u < 0.5) return c + width_ * (std::cbrt(2.0 * u) - 1.0);
                return c + width_ * (1.0 - std::cbrt(2.0 * (1.0 - u)));
            }
        }
        return c;
    }

private:
    PointerShape(PointerKind kind, double width, double center)
        : kind_(kind), width_(width), center_(center) {
        if (!(width > 0.0) || !std::isfinite(width) || !std::isfinite(center)) {
            throw std::invalid_argument("pointer width must be positive and finite");
        }
    }

    PointerKind kind_;
    double width_;
    double center_;
};

/// Eigenvalues of the coupled observable, attached to (Early, Late).
/// The decode convention of sample_outcome assumes lambda_early > lambda_late.
struct Observable {
    double lambda_early = 1.0;
    double lambda_late = -1.0;

    double lambda(int index) const { return index == 0 ? lambda_early : lambda_late; }

    void validate() const {
        if (lambda_early == lambda_late) {
            throw std::invalid_argument("observable eigenvalues must differ");
        }
    }
};

inline double amplitude(const PointerShape& shape, double x) { return shape.amplitude(x); }

/// Numeric route for the response-function overlap
/// <phi(x - eps*lambda_i) | phi(x - eps*lambda_j)>.
/// Adaptive Simpson over the union of shifted supports, padded by |eps*lambda|
/// on each side and split at the shape's kinks.
inline double overlap_chi_quadrature(const PointerShape& shape, double eps, const Observable& obs,
                                     int i, int j, const QuadratureOptions& opts = {}) {
    obs.validate();
    const double si = eps * obs.lambda(i);
    const double sj = eps * obs.lambda(j);
    const double pad = std::abs(eps) * std::max(std::abs(obs.lambda_early),
                                                std::abs(obs.lambda_late));
    const double half = shape.support_halfwidth();
    const double lo = shape.center() + std::min(si, sj) - half - pad;
    const double hi = shape.center() + std::max(si, sj) + half + pad;

    std::vector<double> cuts;
    shape.append_breakpoints(si, cuts);
    shape.append_breakpoints(sj, cuts);

    const auto integrand = [&](double x) {
        return shape.amplitude(x - si) * shape.amplitude(x - sj);
    };
    const double value = integrate_with_breakpoints(integrand, lo, hi, std::move(cuts), opts);
    return std::clamp(value, -1.0, 1.0);
}

/// Response-function overlap chi_ij. Closed form for the Gaussian and rect
/// shapes; the triangle goes through adaptive quadrature. chi_ii = 1 and
/// |chi_ij| <= 1 for all shapes.
inline double overlap_chi(const PointerShape& shape, double eps, const Observable& obs, int i,
                          int j) {
    obs.validate();
    if (eps < 0.0 || !std::isfinite(eps)) {
        throw std::invalid_argument("overlap strength eps must be finite and >= 0");
    }
    if (i == j) return 1.0;
    const double d = std::abs(eps * (obs.lambda(i) - obs.lambda(j)));
    switch (shape.kind()) {
        case PointerKind::Gaussian: {
            const double delta = shape.width();
            return std::exp(-d * d / (8.0 * delta * delta));
        }
        case PointerKind::Rect:
            return std::max(0.0, 1.0 - d / shape.width());
        case PointerKind::Triangle:
            return overlap_chi_quadrature(shape, eps, obs, i, j);
    }
    return 1.0;
}

struct PointerSample {
    double x;
    int bit;
};

/// Draw the probe reading for a system eigenvalue `lambda` at coupling
/// `eps`: x ~ |phi(x - eps*lambda)|^2, decoded against the pointer's rest
/// position (x at the threshold decodes to bit 0).
inline PointerSample sample_outcome(const PointerShape& shape, double eps, double lambda,
                                    RandomStream& rng) {
    const double x = shape.sample(eps * lambda, rng);
    const int bit = x >= shape.center() ? 0 : 1;
    return {x, bit};
}

} // namespace qkdsim
