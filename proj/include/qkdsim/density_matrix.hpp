#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>

#include "qkdsim/errors.hpp"
#include "qkdsim/rng.hpp"

namespace qkdsim {

using Complex = std::complex<double>;

/// Structural tolerance for density-matrix invariants (Hermiticity, unit
/// trace, positivity).
inline constexpr double kStructuralTol = 1e-12;
/// Tolerance for Kraus completeness checks.
inline constexpr double kKrausTol = 1e-10;

/// Dense 2x2 complex matrix with value semantics. The whole library works in
/// a fixed qubit dimension, so nothing heavier is needed.
struct Mat2 {
    std::array<Complex, 4> e{};

    Complex& operator()(int r, int c) { return e[static_cast<std::size_t>(2 * r + c)]; }
    const Complex& operator()(int r, int c) const { return e[static_cast<std::size_t>(2 * r + c)]; }

    static Mat2 zero() { return Mat2{}; }
    static Mat2 identity() { return Mat2{{Complex{1}, Complex{0}, Complex{0}, Complex{1}}}; }

    Mat2 adjoint() const {
        return Mat2{{std::conj(e[0]), std::conj(e[2]), std::conj(e[1]), std::conj(e[3])}};
    }

    Complex trace() const { return e[0] + e[3]; }

    friend Mat2 operator+(const Mat2& a, const Mat2& b) {
        Mat2 out;
        for (std::size_t i = 0; i < 4; ++i) out.e[i] = a.e[i] + b.e[i];
        return out;
    }

    friend Mat2 operator-(const Mat2& a, const Mat2& b) {
        Mat2 out;
        for (std::size_t i = 0; i < 4; ++i) out.e[i] = a.e[i] - b.e[i];
        return out;
    }

    friend Mat2 operator*(const Mat2& a, const Mat2& b) {
        Mat2 out;
        out.e[0] = a.e[0] * b.e[0] + a.e[1] * b.e[2];
        out.e[1] = a.e[0] * b.e[1] + a.e[1] * b.e[3];
        out.e[2] = a.e[2] * b.e[0] + a.e[3] * b.e[2];
        out.e[3] = a.e[2] * b.e[1] + a.e[3] * b.e[3];
        return out;
    }

    friend Mat2 operator*(const Complex& s, const Mat2& a) {
        Mat2 out;
        for (std::size_t i = 0; i < 4; ++i) out.e[i] = s * a.e[i];
        return out;
    }

    friend Mat2 operator*(double s, const Mat2& a) { return Complex{s, 0.0} * a; }

    bool all_finite() const {
        for (const auto& z : e) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
        return true;
    }

    /// Largest elementwise |a - b|.
    static double max_abs_diff(const Mat2& a, const Mat2& b) {
        double m = 0.0;
        for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(a.e[i] - b.e[i]));
        return m;
    }
};

/// Eigenvalues of a Hermitian 2x2 matrix, ascending. Closed form; the input
/// is assumed Hermitian (only the real diagonal and one off-diagonal enter).
inline std::array<double, 2> hermitian_eigenvalues(const Mat2& h) {
    const double a = h(0, 0).real();
    const double d = h(1, 1).real();
    const double mean = 0.5 * (a + d);
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(h(0, 1)));
    return {mean - rad, mean + rad};
}

/// Hadamard matrix; exchanges the time and phase representations.
inline const Mat2& hadamard() {
    static const Mat2 h = [] {
        const double s = 1.0 / std::sqrt(2.0);
        return Mat2{{Complex{s}, Complex{s}, Complex{s}, Complex{-s}}};
    }();
    return h;
}

/// A qubit state: 2x2 complex, Hermitian, unit trace, positive semidefinite.
/// Construction goes through from_matrix(), which enforces the invariants,
/// so a DensityMatrix value is always valid.
class DensityMatrix {
public:
    static DensityMatrix from_matrix(const Mat2& m) {
        if (!m.all_finite()) {
            throw InvalidDensityMatrix("density matrix contains non-finite entries");
        }
        const Mat2 herm_gap = m - m.adjoint();
        double herm = 0.0;
        for (const auto& z : herm_gap.e) herm = std::max(herm, std::abs(z));
        if (herm > kStructuralTol) {
            throw InvalidDensityMatrix("density matrix is not Hermitian (gap " +
                                       std::to_string(herm) + ")");
        }
        const Complex tr = m.trace();
        if (std::abs(tr - Complex{1.0}) > kStructuralTol) {
            throw InvalidDensityMatrix("density matrix trace deviates from 1 by " +
                                       std::to_string(std::abs(tr - Complex{1.0})));
        }
        const auto eig = hermitian_eigenvalues(m);
        if (eig[0] < -kStructuralTol) {
            throw InvalidDensityMatrix("density matrix has negative eigenvalue " +
                                       std::to_string(eig[0]));
        }
        return DensityMatrix(m);
    }

    const Mat2& matrix() const { return m_; }
    Complex element(int r, int c) const { return m_(r, c); }

    /// Real part of a diagonal entry (exact diagonal for valid states).
    double diag(int i) const { return m_(i, i).real(); }

    std::array<double, 2> eigenvalues() const { return hermitian_eigenvalues(m_); }

    friend bool operator==(const DensityMatrix& a, const DensityMatrix& b) {
        return a.m_.e == b.m_.e;
    }

private:
    explicit DensityMatrix(const Mat2& m) : m_(m) {}
    Mat2 m_;
};

/// The four time-bin kets. Early/Late span the time (Z) basis; Plus/Minus
/// are their balanced superpositions and span the phase (X) basis.
enum class BasisState { Early, Late, Plus, Minus };

/// Measurement/encoding basis. Z is time of arrival, X is phase.
enum class Basis { Z, X };

inline Basis basis_of(BasisState s) {
    return (s == BasisState::Early || s == BasisState::Late) ? Basis::Z : Basis::X;
}

/// Bit convention: 0 maps to Early/Plus, 1 maps to Late/Minus.
inline int bit_of(BasisState s) {
    return (s == BasisState::Early || s == BasisState::Plus) ? 0 : 1;
}

inline BasisState state_for(Basis b, int bit) {
    if (b == Basis::Z) return bit == 0 ? BasisState::Early : BasisState::Late;
    return bit == 0 ? BasisState::Plus : BasisState::Minus;
}

inline std::array<Complex, 2> ket(BasisState s) {
    const double r = 1.0 / std::sqrt(2.0);
    switch (s) {
        case BasisState::Early: return {Complex{1.0}, Complex{0.0}};
        case BasisState::Late: return {Complex{0.0}, Complex{1.0}};
        case BasisState::Plus: return {Complex{r}, Complex{r}};
        case BasisState::Minus: return {Complex{r}, Complex{-r}};
    }
    return {Complex{1.0}, Complex{0.0}};
}

/// |s><s| for one of the four protocol states.
inline DensityMatrix dm_from_state(BasisState s) {
    const auto v = ket(s);
    Mat2 m;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            m(r, c) = v[static_cast<std::size_t>(r)] * std::conj(v[static_cast<std::size_t>(c)]);
        }
    }
    return DensityMatrix::from_matrix(m);
}

/// Rank-1 projector labelled by its basis and bit value.
struct Projector {
    Mat2 matrix;
    Basis basis;
    int bit;
};

inline Mat2 projector_matrix(Basis b, int bit) {
    const auto v = ket(state_for(b, bit));
    Mat2 m;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            m(r, c) = v[static_cast<std::size_t>(r)] * std::conj(v[static_cast<std::size_t>(c)]);
        }
    }
    return m;
}

/// The four protocol projectors {P_early, P_late, P_plus, P_minus}.
/// They sum to 2I, so A_i = P_i / sqrt(2) is a complete Kraus set.
inline const std::array<Projector, 4>& bb84_projectors() {
    static const std::array<Projector, 4> ps = {
        Projector{projector_matrix(Basis::Z, 0), Basis::Z, 0},
        Projector{projector_matrix(Basis::Z, 1), Basis::Z, 1},
        Projector{projector_matrix(Basis::X, 0), Basis::X, 0},
        Projector{projector_matrix(Basis::X, 1), Basis::X, 1},
    };
    return ps;
}

/// Born probability of outcome `bit` when measuring `rho` in `basis`.
/// Clamped to [0, 1] against last-bit drift.
inline double born_probability(const DensityMatrix& rho, Basis basis, int bit) {
    double p;
    if (basis == Basis::Z) {
        p = bit == 0 ? rho.diag(0) : rho.diag(1);
    } else {
        const double coherence = rho.element(0, 1).real();
        p = 0.5 + (bit == 0 ? coherence : -coherence);
    }
    return std::min(1.0, std::max(0.0, p));
}

/// Kraus application sum_i A_i rho A_i^dag. The set must be trace
/// preserving within kKrausTol or KrausNotTracePreserving is thrown.
inline DensityMatrix apply_kraus(const DensityMatrix& rho, std::span<const Mat2> ops) {
    Mat2 completeness;
    for (const auto& a : ops) completeness = completeness + a.adjoint() * a;
    const double gap = Mat2::max_abs_diff(completeness, Mat2::identity());
    if (gap > kKrausTol) {
        throw KrausNotTracePreserving("Kraus completeness deviates from identity by " +
                                      std::to_string(gap));
    }
    Mat2 out;
    for (const auto& a : ops) out = out + a * rho.matrix() * a.adjoint();
    return DensityMatrix::from_matrix(out);
}

struct MeasurementResult {
    int bit;
    DensityMatrix state;
};

/// Sample an outcome bit only (no collapsed state). Hot path for receivers
/// that discard the photon after detection.
inline int sample_measurement_bit(const DensityMatrix& rho, Basis basis, RandomStream& rng) {
    const double p0 = born_probability(rho, basis, 0);
    return rng.uniform() < p0 ? 0 : 1;
}

/// Projective measurement: samples a bit by the Born rule and collapses the
/// state to P_b rho P_b / tr(P_b rho).
inline MeasurementResult projective_measure(const DensityMatrix& rho, Basis basis,
                                            RandomStream& rng) {
    const int bit = sample_measurement_bit(rho, basis, rng);
    const double p = born_probability(rho, basis, bit);
    if (p < 1e-14) {
        throw DegenerateOutcome("sampled outcome has probability " + std::to_string(p));
    }
    const Mat2 proj = projector_matrix(basis, bit);
    const Mat2 collapsed = (1.0 / p) * (proj * rho.matrix() * proj);
    return {bit, DensityMatrix::from_matrix(collapsed)};
}

/// Trace distance (1/2) sum |eig(a - b)|; lies in [0, 1] for states.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    const auto eig = hermitian_eigenvalues(a.matrix() - b.matrix());
    return 0.5 * (std::abs(eig[0]) + std::abs(eig[1]));
}

/// H rho H: maps between the Z and X representations of a state.
inline DensityMatrix hadamard_conjugate(const DensityMatrix& rho) {
    return DensityMatrix::from_matrix(hadamard() * rho.matrix() * hadamard());
}

} // namespace qkdsim
