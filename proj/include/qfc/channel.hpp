#pragma once

// Dephasing noise, the beta-phased weak measurement pair, y-axis corrections
// and the resulting control map C(rho') = sum_s Y_s M'_s rho' M'_s^+ Y_s^+.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qfc/errors.hpp"
#include "qfc/qubit.hpp"

namespace qfc {

inline constexpr double kHalfPi = std::numbers::pi / 2;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps any angle to [0, 2pi).
inline double wrap_two_pi(double angle) {
    double w = std::fmod(angle, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w >= kTwoPi ? 0.0 : w;
}

/// Full parameter tuple of the protection scheme.
struct ControlParams {
    double theta = 0.0;  // state separation, overlap cos(theta)
    double phi = 0.0;    // rotation of the pair about x
    double p = 0.0;      // phase-flip probability
    double chi = kHalfPi;  // measurement strength, 0 = projective
    double eta = 0.0;    // correction angle
    double beta = 0.0;   // measurement phase

    /// Throws RangeError on the first violated interval.
    void validate() const {
        detail::require_theta(theta);
        detail::require_phi(phi);
        detail::require_range(p, 0.0, 0.5, "p");
        detail::require_range(chi, 0.0, kHalfPi, "chi");
        if (!(eta > -std::numbers::pi && eta <= std::numbers::pi)) {
            throw RangeError("eta = " + std::to_string(eta) + " outside (-pi, pi]");
        }
        if (!(beta >= 0.0 && beta < kTwoPi)) {
            throw RangeError("beta = " + std::to_string(beta) + " outside [0, 2pi)");
        }
    }
};

struct MeasurementPair {
    Operator2 m_plus;
    Operator2 m_minus;

    const Operator2& branch(int sign) const { return sign > 0 ? m_plus : m_minus; }
    /// M'_s^+ M'_s
    Operator2 povm(int sign) const { return branch(sign).dagger() * branch(sign); }
};

/// rho' = (1 - p) rho + p Z rho Z. Evaluated entrywise: the populations are
/// copied and the coherences scaled by (1 - 2p), so z is preserved exactly.
inline QubitState dephase(const QubitState& state, double p) {
    detail::require_range(p, 0.0, 0.5, "p");
    const Operator2& rho = state.matrix();
    const double damp = 1.0 - 2.0 * p;
    return QubitState(Operator2(rho(0, 0), damp * rho(0, 1), damp * rho(1, 0), rho(1, 1)), state.is_normalized());
}

inline MeasurementPair weak_measurements(double chi, double beta) {
    detail::require_range(chi, 0.0, kHalfPi, "chi");
    const double c = std::cos(0.5 * chi);
    const Complex s = std::polar(std::sin(0.5 * chi), beta);
    return {Operator2::diagonal(c, s), Operator2::diagonal(s, c)};
}

/// Y_{sign*eta}: rotation by sign*eta about the Bloch y-axis (right-handed),
/// i.e. cos(eta/2) 1 - i sign sin(eta/2) Y. This orientation is the one for
/// which the closed-form fidelity and the corrected-state snapshot hold.
inline Operator2 correction(double eta, int sign) {
    using namespace std::complex_literals;
    const double s = sign > 0 ? 1.0 : -1.0;
    return Complex(std::cos(0.5 * eta)) * Operator2::identity() + (-1i * s * std::sin(0.5 * eta)) * pauli(Axis::Y);
}

inline QubitState control_map(const QubitState& noisy, double chi, double beta, double eta) {
    const MeasurementPair m = weak_measurements(chi, beta);
    const Operator2 rho = noisy.matrix();
    const Operator2 out = conjugate(correction(eta, +1) * m.m_plus, rho) +
                          conjugate(correction(eta, -1) * m.m_minus, rho);
    return QubitState(out, noisy.is_normalized());
}

/// Bloch vectors along the pipeline for one input state. The two middle
/// stages follow the '+' measurement outcome and keep their raw weight.
struct PipelineTrace {
    BlochVector initial;
    BlochVector post_noise;
    BlochVector post_measurement_plus;
    BlochVector post_correction_plus;
    BlochVector final_normalized;
};

/// Trace for |psi_{sign}>; defaults to |psi_+>.
inline PipelineTrace pipeline_trace(const ControlParams& params, int sign = +1) {
    params.validate();
    const StatePair pair = prepare_pair(params.theta, params.phi);
    const QubitState& rho = pair.state(sign);
    const QubitState noisy = dephase(rho, params.p);
    const MeasurementPair m = weak_measurements(params.chi, params.beta);
    const QubitState measured(conjugate(m.m_plus, noisy.matrix()), false);
    const QubitState corrected(conjugate(correction(params.eta, +1), measured.matrix()), false);
    const QubitState final_state = control_map(noisy, params.chi, params.beta, params.eta);
    return {to_bloch(rho), to_bloch(noisy), to_bloch(measured), to_bloch(corrected),
            to_bloch(final_state).normalized()};
}

/// U = exp(-i phi X / 2): the right-handed rotation by phi about x, which
/// carries the phi = 0 pair onto the phi pair.
inline Operator2 frame_rotation(double phi) {
    using namespace std::complex_literals;
    return Complex(std::cos(0.5 * phi)) * Operator2::identity() + (-1i * std::sin(0.5 * phi)) * pauli(Axis::X);
}

/// Evaluates C(rho') directly and in the frame of the phi = 0 pair,
/// U (sum_s Y~ M~ rho~' M~^+ Y~^+) U^+ with A~ = U^+ A U, for both input states.
/// Returns the largest entrywise deviation, including that of rho = U rho~ U^+.
inline double rotated_frame_check(const ControlParams& params) {
    params.validate();
    const StatePair pair = prepare_pair(params.theta, params.phi);
    const StatePair flat = prepare_pair(params.theta, 0.0);
    const Operator2 u = frame_rotation(params.phi);
    const Operator2 ud = u.dagger();
    auto tilde = [&](const Operator2& a) { return ud * a * u; };

    const MeasurementPair m = weak_measurements(params.chi, params.beta);
    const Operator2 z_t = tilde(pauli(Axis::Z));
    const Operator2 kraus_plus_t = tilde(correction(params.eta, +1)) * tilde(m.m_plus);
    const Operator2 kraus_minus_t = tilde(correction(params.eta, -1)) * tilde(m.m_minus);

    double deviation = 0.0;
    for (int sign : {+1, -1}) {
        const Operator2& rho_t = flat.state(sign).matrix();
        deviation = std::max(deviation, max_abs_diff(pair.state(sign).matrix(), conjugate(u, rho_t)));

        const Operator2 direct =
            control_map(dephase(pair.state(sign), params.p), params.chi, params.beta, params.eta).matrix();
        // dephasing written as (part commuting with Z) + (1 - 2p)(part anticommuting with Z),
        // which reproduces dephase() bit for bit when Z~ = Z
        const Operator2 flipped = z_t * rho_t * z_t;
        const Operator2 noisy_t = Complex(0.5) * (rho_t + flipped) +
                                  Complex(0.5 * (1.0 - 2.0 * params.p)) * (rho_t - flipped);
        const Operator2 framed = conjugate(u, conjugate(kraus_plus_t, noisy_t) + conjugate(kraus_minus_t, noisy_t));
        deviation = std::max(deviation, max_abs_diff(direct, framed));
    }
    return deviation;
}

}  // namespace qfc
