#pragma once

// Average fidelity of the controlled channel: the first-principles matrix
// evaluation and the closed forms derived from it, together with the
// analytic optimum over the correction angle, the stationary measurement
// phase, and the do-nothing / Helstrom baselines.

#include <algorithm>
#include <cmath>

#include "qfc/channel.hpp"
#include "qfc/qubit.hpp"

namespace qfc {

struct FidelityBreakdown {
    double f_plus = 0.0;
    double f_minus = 0.0;
    double f_avg = 0.0;
};

struct BaselineFidelities {
    double f_dn = 0.0;  // zero-strength measurement, no correction
    double f_h = 0.0;   // projective measurement, optimal correction
    double f_best_baseline = 0.0;
};

/// Result of an arctangent-type stationarity formula; degenerate when both
/// arguments vanish and the angle is undetermined (reported as 0).
struct StationaryAngle {
    double angle = 0.0;
    bool degenerate = false;
};

inline constexpr double kDegenerateScale = 1e-15;

/// prepare -> dephase -> control map -> overlap with the noiseless input,
/// by 2x2 matrix algebra only.
inline FidelityBreakdown fidelity_simulated(const ControlParams& params) {
    params.validate();
    const StatePair pair = prepare_pair(params.theta, params.phi);
    double f[2];
    for (int sign : {+1, -1}) {
        const QubitState out = control_map(dephase(pair.state(sign), params.p), params.chi, params.beta, params.eta);
        const Ket& k = pair.ket(sign);
        f[sign > 0 ? 0 : 1] = out.expectation(k.amp0, k.amp1);
    }
    return {f[0], f[1], 0.5 * (f[0] + f[1])};
}

/// Closed-form average fidelity as a function of all six parameters.
inline double fidelity_closed(const ControlParams& params) {
    params.validate();
    const double st = std::sin(params.theta), ct = std::cos(params.theta);
    const double sp = std::sin(params.phi), cp = std::cos(params.phi);
    const double sc = std::sin(params.chi), cc = std::cos(params.chi);
    const double se = std::sin(params.eta), ce = std::cos(params.eta);
    const double sb = std::sin(params.beta), cb = std::cos(params.beta);
    const double damp = 1.0 - 2.0 * params.p;
    return 0.5 * (1.0 + ct * cc * se + ce * cp * cp * st * st +
                  0.5 * damp * sc *
                      (2.0 * cb * (ce * ct * ct + st * st * sp * sp) - sb * se * st * st * std::sin(2.0 * params.phi)));
}

namespace detail {

// Fbar = C0 + (A sin(eta) + B cos(eta)) / 2
struct EtaHarmonics {
    double a;
    double b;
};

inline EtaHarmonics eta_harmonics(double theta, double p, double chi, double phi, double beta) {
    const double st = std::sin(theta), ct = std::cos(theta);
    const double cp = std::cos(phi);
    const double sc = std::sin(chi);
    const double damp = 1.0 - 2.0 * p;
    return {ct * std::cos(chi) - 0.5 * damp * std::sin(beta) * st * st * std::sin(2.0 * phi) * sc,
            cp * cp * st * st + damp * ct * ct * sc * std::cos(beta)};
}

}  // namespace detail

/// Correction angle maximizing the average fidelity, eta = atan2(A, B) so
/// that the +sqrt(A^2 + B^2) branch is always the one realized.
inline StationaryAngle eta_opt(double theta, double p, double chi, double phi, double beta) {
    const auto [a, b] = detail::eta_harmonics(theta, p, chi, phi, beta);
    if (std::hypot(a, b) < kDegenerateScale) return {0.0, true};
    return {std::atan2(a, b), false};
}

/// Average fidelity with eta already at its optimum.
inline double fidelity_eta_opt(double theta, double p, double chi, double phi, double beta) {
    const double st = std::sin(theta), ct = std::cos(theta);
    const double sp = std::sin(phi), cp = std::cos(phi);
    const double sc = std::sin(chi);
    const double damp = 1.0 - 2.0 * p;
    const double a = ct * std::cos(chi) - 0.5 * damp * std::sin(beta) * st * st * std::sin(2.0 * phi) * sc;
    const double b = cp * cp * st * st + damp * ct * ct * sc * std::cos(beta);
    return 0.5 + 0.5 * damp * std::cos(beta) * st * st * sp * sp * sc + 0.5 * std::sqrt(a * a + b * b);
}

/// fidelity_eta_opt restricted to phi = 0 (states in the xz-plane).
inline double fidelity_phi0(double theta, double p, double chi, double beta) {
    const double st = std::sin(theta), ct = std::cos(theta), cc = std::cos(chi);
    const double inner = st * st + (1.0 - 2.0 * p) * ct * ct * std::sin(chi) * std::cos(beta);
    return 0.5 + 0.5 * std::sqrt(ct * ct * cc * cc + inner * inner);
}

/// Measurement phase maximizing the closed-form fidelity at fixed eta,
/// assuming (1 - 2p) sin(chi) > 0. Of the two roots of the stationarity
/// condition this is the maximum, returned in [0, 2pi).
inline StationaryAngle beta_critical(double theta, double phi, double eta) {
    const double st2 = std::sin(theta) * std::sin(theta);
    const double ct2 = std::cos(theta) * std::cos(theta);
    const double sp = std::sin(phi);
    // beta-dependent part: 2 D cos(beta) - N sin(beta)
    const double n = std::sin(eta) * st2 * std::sin(2.0 * phi);
    const double d = std::cos(eta) * ct2 + st2 * sp * sp;
    if (std::hypot(n, d) < kDegenerateScale) return {0.0, true};
    return {wrap_two_pi(std::atan2(-n, 2.0 * d)), false};
}

inline BaselineFidelities baselines(double theta, double phi, double p) {
    detail::require_theta(theta);
    detail::require_range(p, 0.0, 0.5, "p");
    const double st = std::sin(theta), cp = std::cos(phi);
    const double f_dn = 1.0 - p + p * st * st * cp * cp;
    const double f_h = fidelity_eta_opt(theta, p, 0.0, phi, 0.0);
    return {f_dn, f_h, std::max(f_dn, f_h)};
}

/// Same function as fidelity_eta_opt, with every (theta, phi, p) factor
/// hoisted so the (chi, beta) search only supplies sines and cosines.
class ReducedFidelity {
public:
    ReducedFidelity(double theta, double phi, double p) {
        const double st2 = std::sin(theta) * std::sin(theta);
        const double ct = std::cos(theta);
        const double sp = std::sin(phi), cp = std::cos(phi);
        const double damp = 1.0 - 2.0 * p;
        cos_theta_ = ct;
        lin_ = 0.5 * damp * st2 * sp * sp;
        a_ = 0.5 * damp * st2 * std::sin(2.0 * phi);
        b0_ = cp * cp * st2;
        b_ = damp * ct * ct;
    }

    double operator()(double sin_chi, double cos_chi, double sin_beta, double cos_beta) const {
        const double a = cos_theta_ * cos_chi - a_ * sin_beta * sin_chi;
        const double b = b0_ + b_ * sin_chi * cos_beta;
        return 0.5 + lin_ * cos_beta * sin_chi + 0.5 * std::sqrt(a * a + b * b);
    }

    /// Upper bound on the value over all beta at fixed chi.
    double row_bound(double sin_chi, double cos_chi) const {
        const double a = std::abs(cos_theta_ * cos_chi) + std::abs(a_ * sin_chi);
        const double b = std::abs(b0_) + std::abs(b_ * sin_chi);
        return 0.5 + std::abs(lin_ * sin_chi) + 0.5 * std::sqrt(a * a + b * b);
    }

    double operator()(double chi, double beta) const {
        return (*this)(std::sin(chi), std::cos(chi), std::sin(beta), std::cos(beta));
    }

private:
    double cos_theta_, lin_, a_, b0_, b_;
};

}  // namespace qfc
