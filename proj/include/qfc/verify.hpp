#pragma once

// Invariant suite behind `qfc verify`: every closed form is checked against
// an independent route (matrix simulation, finite differences, dense grids).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qfc/channel.hpp"
#include "qfc/fidelity.hpp"
#include "qfc/optimizer.hpp"
#include "qfc/qubit.hpp"
#include "qfc/sampling.hpp"

namespace qfc {

/// Pauli coefficients (c0, cx, cy, cz) of rho = c0 1 + cx sx + cy sy + cz sz.
struct PauliCoefficients {
    double c0 = 0.0, cx = 0.0, cy = 0.0, cz = 0.0;

    static PauliCoefficients of(const BlochVector& v) { return {0.5 * v.weight, 0.5 * v.x, 0.5 * v.y, 0.5 * v.z}; }
    PauliCoefficients scaled(double k) const { return {k * c0, k * cx, k * cy, k * cz}; }

    friend double max_abs_diff(const PauliCoefficients& a, const PauliCoefficients& b) {
        return std::max({std::abs(a.c0 - b.c0), std::abs(a.cx - b.cx), std::abs(a.cy - b.cy), std::abs(a.cz - b.cz)});
    }
};

/// Hand-derived expansions of rho'_+, the post-measurement state and the
/// corrected state for the phi = pi/4 pair. The last two are written for
/// 2 M'_+ rho' M'_+^+ (the '+' branch rescaled by its prior 1/2), so their
/// identity coefficient is the trace of M'_+ rho' M'_+^+, not half of it.
struct QuarterPiSnapshot {
    PauliCoefficients post_noise;
    PauliCoefficients post_measurement;
    PauliCoefficients post_correction;
};

inline QuarterPiSnapshot quarter_pi_snapshot(double theta, double p, double chi, double eta, double beta) {
    const double r = std::numbers::sqrt2 / 2.0;
    const double st = std::sin(theta), ct = std::cos(theta);
    const double sc = std::sin(chi), cc = std::cos(chi);
    const double sb = std::sin(beta), cb = std::cos(beta);
    const double se = std::sin(eta), ce = std::cos(eta);
    const double damp = 1.0 - 2.0 * p;

    QuarterPiSnapshot s;
    s.post_noise = {0.5, (0.5 - p) * ct, r * (p - 0.5) * st, 0.5 * r * st};

    const double weight = 0.5 * (1.0 + r * cc * st);
    const double mixed_x = cb * ct + r * sb * st;
    const double mixed_y = ct * sb - r * cb * st;
    const double z_part = cc + r * st;
    s.post_measurement = {weight, 0.5 * damp * mixed_x * sc, 0.5 * damp * mixed_y * sc, 0.5 * z_part};
    s.post_correction = {weight, 0.5 * (se * z_part + damp * ce * sc * mixed_x), 0.5 * damp * mixed_y * sc,
                         0.5 * (ce * z_part + (-1.0 + 2.0 * p) * se * sc * mixed_x)};
    return s;
}

struct CheckResult {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct VerifyOptions {
    std::function<double(const ControlParams&)> closed_form = fidelity_closed;
    std::size_t oracle_samples = 10000;
    std::size_t samples = 1000;
};

namespace detail {

inline CheckResult finish(std::string name, double dev, double tol) {
    return {std::move(name), dev, tol, dev < tol};
}

inline double central_difference(const std::function<double(double)>& f, double x, double h = 1e-5) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace detail

/// Maximum of eta -> f(eta) over `points` evenly spaced eta in (-pi, pi],
/// sharpened by golden-section search between the neighbours of the best
/// grid point.
inline double dense_eta_maximum(const std::function<double(double)>& f, int points = 720) {
    const double step = 2.0 * std::numbers::pi / points;
    double best = -1.0, arg = 0.0;
    for (int k = 0; k < points; ++k) {
        const double eta = std::numbers::pi - k * step;
        const double v = f(eta);
        if (v > best) {
            best = v;
            arg = eta;
        }
    }
    const GoldenResult g = golden_maximize(f, arg - step, arg + step, 1e-12, 200);
    return std::max(best, g.value);
}

inline std::vector<CheckResult> run_verification(const VerifyOptions& opt = {}) {
    const WeylSequence seq;
    std::vector<CheckResult> out;

    double dev = 0.0;
    for (std::size_t n = 0; n < opt.oracle_samples; ++n) {
        const ControlParams c = params_from_unit(seq.at(n));
        dev = std::max(dev, std::abs(opt.closed_form(c) - fidelity_simulated(c).f_avg));
    }
    out.push_back(detail::finish("oracle_equivalence", dev, 1e-12));

    double eta_grid = 0.0, eta_slope = 0.0, beta_slope = 0.0, frame = 0.0, phi0 = 0.0, dn = 0.0;
    for (std::size_t n = 0; n < opt.samples; ++n) {
        ControlParams c = params_from_unit(seq.at(n + opt.oracle_samples));
        auto closed_at_eta = [&](double eta) {
            ControlParams e = c;
            e.eta = eta;
            // closed_form validates ranges; evaluate the periodic extension
            if (e.eta <= -std::numbers::pi) e.eta += 2.0 * std::numbers::pi;
            if (e.eta > std::numbers::pi) e.eta -= 2.0 * std::numbers::pi;
            return opt.closed_form(e);
        };
        const double f8 = fidelity_eta_opt(c.theta, c.p, c.chi, c.phi, c.beta);
        eta_grid = std::max(eta_grid, std::abs(f8 - dense_eta_maximum(closed_at_eta)));

        const StationaryAngle eta = eta_opt(c.theta, c.p, c.chi, c.phi, c.beta);
        eta_slope = std::max(eta_slope, std::abs(detail::central_difference(closed_at_eta, eta.angle)));

        const StationaryAngle beta = beta_critical(c.theta, c.phi, c.eta);
        auto closed_at_beta = [&](double b) {
            ControlParams e = c;
            e.beta = wrap_two_pi(b);
            return opt.closed_form(e);
        };
        beta_slope = std::max(beta_slope, std::abs(detail::central_difference(closed_at_beta, beta.angle)));

        frame = std::max(frame, rotated_frame_check(c));
        phi0 = std::max(phi0, std::abs(fidelity_phi0(c.theta, c.p, c.chi, c.beta) -
                                       fidelity_eta_opt(c.theta, c.p, c.chi, 0.0, c.beta)));
        ControlParams d = c;
        d.chi = kHalfPi;
        d.eta = 0.0;
        d.beta = 0.0;
        dn = std::max(dn, std::abs(baselines(c.theta, c.phi, c.p).f_dn - opt.closed_form(d)));
    }
    out.push_back(detail::finish("eta_opt_vs_dense_grid", eta_grid, 1e-9));
    out.push_back(detail::finish("eta_opt_stationarity", eta_slope, 1e-8));
    out.push_back(detail::finish("beta_critical_stationarity", beta_slope, 1e-8));
    out.push_back(detail::finish("rotated_frame_identity", frame, 1e-12));
    out.push_back(detail::finish("phi0_reduction", phi0, 1e-12));
    out.push_back(detail::finish("do_nothing_consistency", dn, 1e-13));

    double povm = 0.0, povm_form = 0.0, trace = 0.0, snapshot = 0.0;
    for (std::size_t n = 0; n < opt.samples; ++n) {
        const ControlParams c = params_from_unit(seq.at(n + 3 * opt.oracle_samples));
        const MeasurementPair m = weak_measurements(c.chi, c.beta);
        povm = std::max(povm, max_abs_diff(m.povm(+1) + m.povm(-1), Operator2::identity()));
        for (int s : {+1, -1}) {
            const Operator2 expected =
                Complex(0.5) * (Operator2::identity() + Complex(s * std::cos(c.chi)) * pauli(Axis::Z));
            povm_form = std::max(povm_form, max_abs_diff(m.povm(s), expected));
        }
        const StatePair pair = prepare_pair(c.theta, c.phi);
        for (int s : {+1, -1}) {
            const QubitState out_state = control_map(dephase(pair.state(s), c.p), c.chi, c.beta, c.eta);
            trace = std::max(trace, std::abs(out_state.trace() - 1.0));
        }
        ControlParams q = c;
        q.phi = std::numbers::pi / 4;
        const PipelineTrace tr = pipeline_trace(q);
        const QuarterPiSnapshot expect = quarter_pi_snapshot(q.theta, q.p, q.chi, q.eta, q.beta);
        snapshot = std::max({snapshot, max_abs_diff(PauliCoefficients::of(tr.post_noise), expect.post_noise),
                             max_abs_diff(PauliCoefficients::of(tr.post_measurement_plus).scaled(2.0),
                                          expect.post_measurement),
                             max_abs_diff(PauliCoefficients::of(tr.post_correction_plus).scaled(2.0),
                                          expect.post_correction)});
    }
    out.push_back(detail::finish("povm_completeness", povm, 1e-14));
    out.push_back(detail::finish("povm_form", povm_form, 1e-14));
    out.push_back(detail::finish("trace_preservation", trace, 1e-13));
    out.push_back(detail::finish("quarter_pi_snapshot", snapshot, 1e-13));
    return out;
}

inline bool all_passed(const std::vector<CheckResult>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

}  // namespace qfc
