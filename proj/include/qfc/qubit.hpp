#pragma once

// Fixed-size 2x2 complex algebra for a single qubit, state preparation and
// the Bloch-vector view. Basis is {|0>, |1>}, with |±> = (|0> ± |1>)/sqrt2.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "qfc/errors.hpp"

namespace qfc {

using Complex = std::complex<double>;

namespace tol {
inline constexpr double kHermitian = 1e-13;
inline constexpr double kTrace = 1e-13;
inline constexpr double kPositivity = 1e-12;
inline constexpr double kPurity = 1e-12;
inline constexpr double kOverlap = 1e-13;
inline constexpr double kRoundTrip = 1e-14;
}  // namespace tol

/// 2x2 complex matrix, row-major.
class Operator2 {
public:
    constexpr Operator2() = default;
    constexpr Operator2(Complex a00, Complex a01, Complex a10, Complex a11) : m_{a00, a01, a10, a11} {}

    static constexpr Operator2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Operator2 diagonal(Complex d0, Complex d1) { return {d0, 0.0, 0.0, d1}; }

    constexpr Complex operator()(int row, int col) const { return m_[2 * row + col]; }
    constexpr Complex& operator()(int row, int col) { return m_[2 * row + col]; }

    constexpr Operator2 dagger() const {
        return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
    }
    constexpr Complex trace() const { return m_[0] + m_[3]; }
    constexpr Complex det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

    friend constexpr Operator2 operator*(const Operator2& a, const Operator2& b) {
        return {a.m_[0] * b.m_[0] + a.m_[1] * b.m_[2], a.m_[0] * b.m_[1] + a.m_[1] * b.m_[3],
                a.m_[2] * b.m_[0] + a.m_[3] * b.m_[2], a.m_[2] * b.m_[1] + a.m_[3] * b.m_[3]};
    }
    friend constexpr Operator2 operator+(const Operator2& a, const Operator2& b) {
        return {a.m_[0] + b.m_[0], a.m_[1] + b.m_[1], a.m_[2] + b.m_[2], a.m_[3] + b.m_[3]};
    }
    friend constexpr Operator2 operator-(const Operator2& a, const Operator2& b) {
        return {a.m_[0] - b.m_[0], a.m_[1] - b.m_[1], a.m_[2] - b.m_[2], a.m_[3] - b.m_[3]};
    }
    friend constexpr Operator2 operator*(Complex s, const Operator2& a) {
        return {s * a.m_[0], s * a.m_[1], s * a.m_[2], s * a.m_[3]};
    }
    friend constexpr bool operator==(const Operator2&, const Operator2&) = default;

    /// Largest entrywise modulus of (a - b).
    friend double max_abs_diff(const Operator2& a, const Operator2& b) {
        double d = 0.0;
        for (int k = 0; k < 4; ++k) d = std::max(d, std::abs(a.m_[k] - b.m_[k]));
        return d;
    }

private:
    std::array<Complex, 4> m_{};
};

/// Sandwich product A rho A^dagger.
inline Operator2 conjugate(const Operator2& a, const Operator2& rho) { return a * rho * a.dagger(); }

enum class Axis { X, Y, Z };

constexpr Operator2 pauli(Axis which) {
    using namespace std::complex_literals;
    switch (which) {
        case Axis::X: return {0.0, 1.0, 1.0, 0.0};
        case Axis::Y: return {0.0, -1i, 1i, 0.0};
        case Axis::Z: break;
    }
    return {1.0, 0.0, 0.0, -1.0};
}

/// Eigenvalues of a Hermitian 2x2 matrix, ascending, via the quadratic formula.
inline std::array<double, 2> hermitian_eigenvalues(const Operator2& h) {
    const double half_trace = 0.5 * (h(0, 0).real() + h(1, 1).real());
    const double half_gap = 0.5 * (h(0, 0).real() - h(1, 1).real());
    const double radius = std::hypot(half_gap, std::abs(h(0, 1)));
    return {half_trace - radius, half_trace + radius};
}

/// (x, y, z) = Tr(rho sigma_{x,y,z}); weight = Tr(rho). Weight differs from
/// one for the unnormalized measurement branches.
struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double weight = 1.0;

    double length() const { return std::sqrt(x * x + y * y + z * z); }
    /// Bloch vector of rho / Tr(rho).
    BlochVector normalized() const { return {x / weight, y / weight, z / weight, 1.0}; }

    friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

/// Density matrix, possibly an unnormalized measurement branch.
class QubitState {
public:
    QubitState() : matrix_(0.5 * Operator2::identity()) {}
    explicit QubitState(const Operator2& matrix, bool normalized = true)
        : matrix_(matrix), normalized_(normalized) {}

    static QubitState pure(Complex amp0, Complex amp1) {
        return QubitState(Operator2(amp0 * std::conj(amp0), amp0 * std::conj(amp1),
                                    amp1 * std::conj(amp0), amp1 * std::conj(amp1)));
    }

    const Operator2& matrix() const { return matrix_; }
    bool is_normalized() const { return normalized_; }
    double trace() const { return matrix_.trace().real(); }
    double purity() const { return (matrix_ * matrix_).trace().real(); }

    double hermiticity_error() const { return max_abs_diff(matrix_, matrix_.dagger()); }

    /// Hermitian, real trace (unit when normalized) and PSD within module tolerances.
    bool is_valid() const {
        if (hermiticity_error() > tol::kHermitian) return false;
        if (std::abs(matrix_.trace().imag()) > tol::kTrace) return false;
        if (normalized_ && std::abs(trace() - 1.0) > tol::kTrace) return false;
        return hermitian_eigenvalues(matrix_)[0] >= -tol::kPositivity;
    }

    /// <psi|rho|psi> for a ket given by its two amplitudes.
    double expectation(Complex amp0, Complex amp1) const {
        const Complex v = std::conj(amp0) * (matrix_(0, 0) * amp0 + matrix_(0, 1) * amp1) +
                          std::conj(amp1) * (matrix_(1, 0) * amp0 + matrix_(1, 1) * amp1);
        return v.real();
    }

private:
    Operator2 matrix_;
    bool normalized_ = true;
};

inline BlochVector to_bloch(const QubitState& state) {
    const Operator2& m = state.matrix();
    // Tr(rho sx) = 2 Re rho01, Tr(rho sy) = -2 Im rho01 for Hermitian rho.
    return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real(), (m(0, 0) + m(1, 1)).real()};
}

inline QubitState from_bloch(const BlochVector& v) {
    using namespace std::complex_literals;
    const Operator2 m(0.5 * (v.weight + v.z), 0.5 * (v.x - 1i * v.y), 0.5 * (v.x + 1i * v.y),
                      0.5 * (v.weight - v.z));
    return QubitState(m, std::abs(v.weight - 1.0) <= tol::kTrace);
}

/// Pure ket in the logical basis, global phase fixed so the |+> amplitude is real and >= 0.
struct Ket {
    Complex amp0;
    Complex amp1;
};

/// The two states cos(theta/2)|+> ± e^{i phi} sin(theta/2)|->, with overlap cos(theta).
struct StatePair {
    Ket ket_plus;
    Ket ket_minus;
    QubitState plus;
    QubitState minus;
    double theta = 0.0;
    double phi = 0.0;

    const Ket& ket(int sign) const { return sign > 0 ? ket_plus : ket_minus; }
    const QubitState& state(int sign) const { return sign > 0 ? plus : minus; }
};

namespace detail {

inline void require_theta(double theta) { require_range(theta, 0.0, std::numbers::pi / 2, "theta"); }

inline void require_phi(double phi) {
    if (!(phi >= 0.0 && phi < 2.0 * std::numbers::pi)) {
        throw RangeError("phi = " + std::to_string(phi) + " outside [0, 2pi)");
    }
}

inline Ket make_ket(double theta, double phi, int sign) {
    const double r = 1.0 / std::numbers::sqrt2;
    const Complex plus_amp = std::cos(0.5 * theta);
    const Complex minus_amp = static_cast<double>(sign) * std::polar(std::sin(0.5 * theta), phi);
    // |+> = (1, 1)/sqrt2, |-> = (1, -1)/sqrt2
    return {r * (plus_amp + minus_amp), r * (plus_amp - minus_amp)};
}

}  // namespace detail

inline StatePair prepare_pair(double theta, double phi) {
    detail::require_theta(theta);
    detail::require_phi(phi);
    const Ket kp = detail::make_ket(theta, phi, +1);
    const Ket km = detail::make_ket(theta, phi, -1);
    return {kp, km, QubitState::pure(kp.amp0, kp.amp1), QubitState::pure(km.amp0, km.amp1), theta, phi};
}

inline Complex inner_product(const Ket& a, const Ket& b) {
    return std::conj(a.amp0) * b.amp0 + std::conj(a.amp1) * b.amp1;
}

}  // namespace qfc
