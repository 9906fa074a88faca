#pragma once

// Global maximization of the eta-optimized average fidelity over the
// measurement strength chi and phase beta, and the (theta, phi, p) sweeps
// built on it. Search: exhaustive (chi, beta) grid, then coordinate-wise
// golden-section contraction around the best cell.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qfc/channel.hpp"
#include "qfc/errors.hpp"
#include "qfc/fidelity.hpp"
#include "qfc/parallel.hpp"

namespace qfc {

struct OptimizationConfig {
    int chi_grid = 129;    // points over [0, pi/2], endpoints included
    int beta_grid = 256;   // points over [0, 2pi)
    double refine_tol = 1e-10;
    int max_refine_iters = 200;

    void validate() const {
        if (chi_grid < 8) throw ConfigError("chi_grid must be >= 8, got " + std::to_string(chi_grid));
        if (beta_grid < 8) throw ConfigError("beta_grid must be >= 8, got " + std::to_string(beta_grid));
        if (!(refine_tol > 0.0)) throw ConfigError("refine_tol must be > 0");
        if (max_refine_iters < 1) throw ConfigError("max_refine_iters must be >= 1");
    }
};

struct OptResult {
    double chi_opt = 0.0;
    double eta_opt = 0.0;
    double beta_opt = 0.0;  // in [0, 2pi)
    double f_opt = 0.0;
    // Optimum of the beta = 0 scheme.
    double chi_opt_beta0 = 0.0;
    double eta_opt_beta0 = 0.0;
    double f_opt_beta0 = 0.0;
    double delta_f = 0.0;  // f_opt - f_opt_beta0
    double f_dn = 0.0;
    double f_h = 0.0;
    double f_imp = 0.0;  // f_opt - max(f_dn, f_h)
    bool degenerate = false;
};

enum class SurfaceQuantity { DeltaF, BetaOpt, FImp };
enum class CurveQuantity { MaxDeltaF, MaxFImp };

struct SweepRecord {
    double theta = 0.0;
    double phi = 0.0;
    double p = 0.0;
    OptResult result;

    double value(SurfaceQuantity q) const {
        switch (q) {
            case SurfaceQuantity::DeltaF: return result.delta_f;
            case SurfaceQuantity::BetaOpt: return result.beta_opt;
            case SurfaceQuantity::FImp: break;
        }
        return result.f_imp;
    }
};

struct CurvePoint {
    double p = 0.0;
    double value = 0.0;
    double theta_argmax = 0.0;
    double phi_argmax = 0.0;
};

/// Closed interval sampled at `count` evenly spaced points, endpoints included.
struct GridAxis {
    double lo = 0.0;
    double hi = kHalfPi;
    int count = 64;

    double at(int i) const { return count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (count - 1); }
    double step() const { return count > 1 ? (hi - lo) / (count - 1) : 0.0; }
};

struct GoldenResult {
    double x;
    double value;
};

/// Golden-section search for a maximum of f on [lo, hi]; stops once the
/// bracket is narrower than x_tol.
template <class F>
GoldenResult golden_maximize(F&& f, double lo, double hi, double x_tol = 1e-10, int max_iters = 100) {
    constexpr double kInvPhi = 0.6180339887498949;
    double c = hi - kInvPhi * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iters && (hi - lo) > x_tol; ++i) {
        if (fc >= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - kInvPhi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + kInvPhi * (hi - lo);
            fd = f(d);
        }
    }
    return fc >= fd ? GoldenResult{c, fc} : GoldenResult{d, fd};
}

/// Coordinate-wise golden-section ascent of f(u, v) starting from a grid
/// point. Each pass searches u on [u - du, u + du] clipped to u_bounds, then
/// v likewise (v is unclipped when v_periodic). Moves are accepted only if
/// they improve f; passes stop when the gain drops below tol.
template <class F>
void coordinate_refine(F&& f, double& u, double& v, double& value, double du, double dv,
                       std::pair<double, double> u_bounds, std::pair<double, double> v_bounds, bool v_periodic,
                       double tol, int max_iters) {
    for (int iter = 0; iter < max_iters; ++iter) {
        const double start = value;
        if (du > 0.0) {
            const double lo = std::max(u_bounds.first, u - du), hi = std::min(u_bounds.second, u + du);
            const GoldenResult g = golden_maximize([&](double x) { return f(x, v); }, lo, hi);
            if (g.value > value) {
                u = g.x;
                value = g.value;
            }
        }
        if (dv > 0.0) {
            const double lo = v_periodic ? v - dv : std::max(v_bounds.first, v - dv);
            const double hi = v_periodic ? v + dv : std::min(v_bounds.second, v + dv);
            const GoldenResult g = golden_maximize([&](double x) { return f(u, x); }, lo, hi);
            if (g.value > value) {
                v = g.x;
                value = g.value;
            }
        }
        if (value - start < tol) break;
    }
}

/// Maximizer over (chi, beta) for a fixed configuration. Holds the
/// sine/cosine tables of the coarse grid, so one instance should be reused
/// across many (theta, phi, p) points.
class PointOptimizer {
public:
    explicit PointOptimizer(OptimizationConfig config = {}) : config_(config) {
        config_.validate();
        const GridAxis chi_axis{0.0, kHalfPi, config_.chi_grid};
        for (int i = 0; i < config_.chi_grid; ++i) {
            const double chi = chi_axis.at(i);
            chi_.push_back(chi);
            sin_chi_.push_back(std::sin(chi));
            cos_chi_.push_back(std::cos(chi));
        }
        for (int j = 0; j < config_.beta_grid; ++j) {
            const double beta = kTwoPi * j / config_.beta_grid;
            beta_.push_back(beta);
            sin_beta_.push_back(std::sin(beta));
            cos_beta_.push_back(std::cos(beta));
        }
    }

    const OptimizationConfig& config() const { return config_; }

    OptResult optimize(double theta, double phi, double p) const {
        detail::require_theta(theta);
        detail::require_phi(phi);
        detail::require_range(p, 0.0, 0.5, "p");
        const ReducedFidelity fid(theta, phi, p);
        const double tol = config_.refine_tol;
        const double dchi = kHalfPi / (config_.chi_grid - 1);
        const double dbeta = kTwoPi / config_.beta_grid;
        const auto n_beta = static_cast<std::size_t>(config_.beta_grid);

        // Coarse grid. Ties within tol go to the smallest chi, then smallest
        // beta. Rows are visited in decreasing order of their upper bound and
        // skipped once the bound cannot reach the running maximum, which
        // leaves the selected cell unchanged.
        double grid_max = -1.0;
        std::vector<std::pair<double, std::size_t>> order(chi_.size());
        for (std::size_t i = 0; i < chi_.size(); ++i) {
            grid_max = std::max(grid_max, fid(sin_chi_[i], cos_chi_[i], 0.0, 1.0));
            order[i] = {fid.row_bound(sin_chi_[i], cos_chi_[i]), i};
        }
        std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        std::vector<double> row(n_beta);
        std::vector<double> best_in_row(chi_.size(), -1.0);
        std::vector<std::size_t> arg_in_row(chi_.size(), 0);
        for (const auto& [bound, i] : order) {
            if (bound < grid_max - tol) break;
            const double sc = sin_chi_[i], cc = cos_chi_[i];
            for (std::size_t j = 0; j < n_beta; ++j) row[j] = fid(sc, cc, sin_beta_[j], cos_beta_[j]);
            std::size_t arg = 0;
            for (std::size_t j = 1; j < n_beta; ++j) {
                if (row[j] > row[arg]) arg = j;
            }
            best_in_row[i] = row[arg];
            grid_max = std::max(grid_max, row[arg]);
            std::size_t first = 0;
            while (row[first] < row[arg] - tol) ++first;
            arg_in_row[i] = first;
        }
        std::size_t ci = 0;
        while (best_in_row[ci] < grid_max - tol) ++ci;
        const std::size_t bj = arg_in_row[ci];
        double chi = chi_[ci];
        double beta = beta_[bj];
        double f_full = fid(sin_chi_[ci], cos_chi_[ci], sin_beta_[bj], cos_beta_[bj]);
        coordinate_refine([&](double c, double b) { return fid(c, b); }, chi, beta, f_full, dchi, dbeta,
                          {0.0, kHalfPi}, {}, true, tol, config_.max_refine_iters);
        beta = wrap_two_pi(beta);

        // beta frozen at 0: the earlier scheme.
        std::size_t c0 = 0;
        double f0_max = -1.0;
        for (std::size_t i = 0; i < chi_.size(); ++i) {
            const double f = fid(sin_chi_[i], cos_chi_[i], 0.0, 1.0);
            if (f > f0_max + tol) {
                f0_max = f;
                c0 = i;
            }
        }
        double chi0 = chi_[c0];
        double unused_beta = 0.0;
        double f_beta0 = fid(sin_chi_[c0], cos_chi_[c0], 0.0, 1.0);
        coordinate_refine([&](double c, double) { return fid(c, 0.0); }, chi0, unused_beta, f_beta0, dchi, 0.0,
                          {0.0, kHalfPi}, {}, false, tol, config_.max_refine_iters);

        OptResult r;
        r.chi_opt_beta0 = chi0;
        r.f_opt_beta0 = f_beta0;
        r.eta_opt_beta0 = eta_opt(theta, p, chi0, phi, 0.0).angle;
        // beta = 0 is feasible for the full problem; prefer it on ties so delta_f >= 0.
        if (f_beta0 >= f_full - tol) {
            r.chi_opt = chi0;
            r.beta_opt = 0.0;
            r.f_opt = f_beta0;
        } else {
            r.chi_opt = chi;
            r.beta_opt = beta;
            r.f_opt = f_full;
        }
        const StationaryAngle eta = eta_opt(theta, p, r.chi_opt, phi, r.beta_opt);
        r.eta_opt = eta.angle;
        r.degenerate = eta.degenerate;
        r.delta_f = r.f_opt - r.f_opt_beta0;
        const BaselineFidelities base = baselines(theta, phi, p);
        r.f_dn = base.f_dn;
        r.f_h = base.f_h;
        r.f_imp = r.f_opt - base.f_best_baseline;
        return r;
    }

private:
    OptimizationConfig config_;
    std::vector<double> chi_, sin_chi_, cos_chi_;
    std::vector<double> beta_, sin_beta_, cos_beta_;
};

inline OptResult optimize_point(double theta, double phi, double p, const OptimizationConfig& config = {}) {
    return PointOptimizer(config).optimize(theta, phi, p);
}

/// One surface of the (theta, phi) plane at fixed p, row-major (theta outer).
inline std::vector<SweepRecord> sweep_surface(double p, const GridAxis& theta_axis, const GridAxis& phi_axis,
                                              const OptimizationConfig& config = {}, unsigned jobs = 1) {
    if (theta_axis.count < 2 || phi_axis.count < 2) throw ConfigError("surface grid counts must be >= 2");
    detail::require_range(p, 0.0, 0.5, "p");
    detail::require_theta(theta_axis.lo);
    detail::require_theta(theta_axis.hi);
    detail::require_phi(phi_axis.lo);
    detail::require_phi(phi_axis.hi);
    const PointOptimizer opt(config);
    const auto n_phi = static_cast<std::size_t>(phi_axis.count);
    std::vector<SweepRecord> out(static_cast<std::size_t>(theta_axis.count) * n_phi);
    parallel_for(out.size(), jobs, [&](std::size_t k) {
        const double theta = theta_axis.at(static_cast<int>(k / n_phi));
        const double phi = phi_axis.at(static_cast<int>(k % n_phi));
        out[k] = {theta, phi, p, opt.optimize(theta, phi, p)};
    });
    return out;
}

namespace detail {

inline double curve_value(const OptResult& r, CurveQuantity q) {
    return q == CurveQuantity::MaxDeltaF ? r.delta_f : r.f_imp;
}

}  // namespace detail

/// Largest value of the quantity over a (theta, phi) grid at one p, refined
/// locally around the best cell.
inline CurvePoint maximize_over_states(const PointOptimizer& opt, double p, CurveQuantity q,
                                       const GridAxis& theta_axis, const GridAxis& phi_axis) {
    const int nt = theta_axis.count, np = phi_axis.count;
    int bi = 0, bj = 0;
    double best = -2.0;
    for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < np; ++j) {
            const double v = detail::curve_value(opt.optimize(theta_axis.at(i), phi_axis.at(j), p), q);
            if (v > best + opt.config().refine_tol) {
                best = v;
                bi = i;
                bj = j;
            }
        }
    }
    double theta = theta_axis.at(bi), phi = phi_axis.at(bj);
    auto value_at = [&](double t, double f) { return detail::curve_value(opt.optimize(t, f, p), q); };
    coordinate_refine(value_at, theta, phi, best, theta_axis.step(), phi_axis.step(), {theta_axis.lo, theta_axis.hi},
                      {phi_axis.lo, phi_axis.hi}, false, opt.config().refine_tol, opt.config().max_refine_iters);
    return {p, best, theta, phi};
}

/// For each of p_steps evenly spaced p in [p_axis.lo, p_axis.hi], the maximum
/// of the quantity over the (theta, phi) grid.
inline std::vector<CurvePoint> curve_over_p(const GridAxis& p_axis, CurveQuantity q, const GridAxis& theta_axis,
                                            const GridAxis& phi_axis, const OptimizationConfig& config = {},
                                            unsigned jobs = 1) {
    if (p_axis.count < 2 || theta_axis.count < 2 || phi_axis.count < 2) {
        throw ConfigError("curve grid counts must be >= 2");
    }
    detail::require_range(p_axis.lo, 0.0, 0.5, "p");
    detail::require_range(p_axis.hi, 0.0, 0.5, "p");
    const PointOptimizer opt(config);
    std::vector<CurvePoint> out(static_cast<std::size_t>(p_axis.count));
    parallel_for(out.size(), jobs, [&](std::size_t k) {
        out[k] = maximize_over_states(opt, p_axis.at(static_cast<int>(k)), q, theta_axis, phi_axis);
    });
    return out;
}

}  // namespace qfc
