#pragma once

// Command-line front end. Kept in a header so the integration tests can
// drive run() in-process as well as through the built binary.

#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qfc/channel.hpp"
#include "qfc/errors.hpp"
#include "qfc/fidelity.hpp"
#include "qfc/optimizer.hpp"
#include "qfc/report.hpp"
#include "qfc/verify.hpp"

namespace qfc::cli {

enum ExitCode : int { kOk = 0, kInvariantFailure = 1, kUsage = 2, kRange = 3 };

// Parameters of the figure captions.
inline constexpr double kFig7Theta = 1.0155, kFig7Phi = 0.8976, kFig7P = 0.18;
inline constexpr double kFig7Chi = 0.8583, kFig7Eta = 0.7913, kFig7Beta = 5.8905;

struct RunConfig {
    std::optional<double> theta, phi, p, chi, eta, beta;
    std::vector<double> p_list{0.10, 0.20, 0.30, 0.40};
    int figure = 0;
    int grid_theta = 64;
    int grid_phi = 64;
    int p_steps = 101;
    double theta_min = 0.0, theta_max = kHalfPi;
    double phi_min = 0.0, phi_max = kHalfPi;
    double p_min = 0.0, p_max = 0.5;
    std::string quantity;
    OptimizationConfig opt;
    std::string out;
    std::string format = "csv";
    bool degrees = false;
    unsigned jobs = 1;
};

namespace detail {

inline std::string num(double v) { return format_number(v); }

inline std::string fixed12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12f", v);
    return buf;
}

inline double need(const std::optional<double>& v, const char* name) {
    if (!v) throw CLI::RequiredError(std::string("--") + name);
    return *v;
}

inline void common_metadata(Table& t, const std::string& command, const RunConfig& rc) {
    t.metadata.emplace_back("command", command);
    t.metadata.emplace_back("chi_grid", std::to_string(rc.opt.chi_grid));
    t.metadata.emplace_back("beta_grid", std::to_string(rc.opt.beta_grid));
    t.metadata.emplace_back("refine_tol", num(rc.opt.refine_tol));
    t.metadata.emplace_back("max_refine_iters", std::to_string(rc.opt.max_refine_iters));
}

inline void params_metadata(Table& t, const ControlParams& c) {
    t.metadata.emplace_back("theta", num(c.theta));
    t.metadata.emplace_back("phi", num(c.phi));
    t.metadata.emplace_back("p", num(c.p));
    t.metadata.emplace_back("chi", num(c.chi));
    t.metadata.emplace_back("eta", num(c.eta));
    t.metadata.emplace_back("beta", num(c.beta));
}

inline std::vector<std::string> opt_columns() {
    return {"chi_opt", "eta_opt",  "beta_opt", "f_opt", "chi_opt_beta0", "eta_opt_beta0", "f_opt_beta0",
            "delta_f", "f_dn",     "f_h",      "f_imp", "degenerate"};
}

inline void append_opt(std::vector<Cell>& row, const OptResult& r) {
    for (double v : {r.chi_opt, r.eta_opt, r.beta_opt, r.f_opt, r.chi_opt_beta0, r.eta_opt_beta0, r.f_opt_beta0,
                     r.delta_f, r.f_dn, r.f_h, r.f_imp}) {
        row.emplace_back(v);
    }
    row.emplace_back(std::string(r.degenerate ? "1" : "0"));
}

inline ControlParams full_params(const RunConfig& rc) {
    ControlParams c;
    c.theta = need(rc.theta, "theta");
    c.phi = need(rc.phi, "phi");
    c.p = need(rc.p, "p");
    c.chi = need(rc.chi, "chi");
    c.eta = need(rc.eta, "eta");
    c.beta = need(rc.beta, "beta");
    c.validate();
    return c;
}

inline SurfaceQuantity parse_surface_quantity(const std::string& q) {
    if (q.empty() || q == "delta_f") return SurfaceQuantity::DeltaF;
    if (q == "beta_opt") return SurfaceQuantity::BetaOpt;
    if (q == "f_imp") return SurfaceQuantity::FImp;
    throw CLI::ValidationError("--quantity", "expected delta_f, beta_opt or f_imp");
}

inline CurveQuantity parse_curve_quantity(const std::string& q) {
    if (q.empty() || q == "max_delta_f") return CurveQuantity::MaxDeltaF;
    if (q == "max_f_imp") return CurveQuantity::MaxFImp;
    throw CLI::ValidationError("--quantity", "expected max_delta_f or max_f_imp");
}

inline const char* surface_name(SurfaceQuantity q) {
    switch (q) {
        case SurfaceQuantity::DeltaF: return "delta_f";
        case SurfaceQuantity::BetaOpt: return "beta_opt";
        case SurfaceQuantity::FImp: break;
    }
    return "f_imp";
}

inline void validate_surface_inputs(const RunConfig& rc) {
    for (double p : rc.p_list) qfc::detail::require_range(p, 0.0, 0.5, "p");
    qfc::detail::require_theta(rc.theta_min);
    qfc::detail::require_theta(rc.theta_max);
    qfc::detail::require_phi(rc.phi_min);
    qfc::detail::require_phi(rc.phi_max);
    if (rc.grid_theta < 2 || rc.grid_phi < 2) throw ConfigError("grid counts must be >= 2");
    rc.opt.validate();
}

}  // namespace detail

inline Table cmd_fidelity(const RunConfig& rc) {
    const ControlParams c = detail::full_params(rc);
    const double closed = fidelity_closed(c);
    const FidelityBreakdown sim = fidelity_simulated(c);
    Table t;
    t.metadata.emplace_back("command", "fidelity");
    detail::params_metadata(t, c);
    t.columns = {"f_closed", "f_simulated", "difference", "f_plus", "f_minus"};
    t.rows.push_back({detail::fixed12(closed), detail::fixed12(sim.f_avg), closed - sim.f_avg,
                      detail::fixed12(sim.f_plus), detail::fixed12(sim.f_minus)});
    return t;
}

inline Table cmd_optimize(const RunConfig& rc) {
    const double theta = detail::need(rc.theta, "theta"), phi = detail::need(rc.phi, "phi");
    const double p = detail::need(rc.p, "p");
    qfc::detail::require_theta(theta);
    qfc::detail::require_phi(phi);
    qfc::detail::require_range(p, 0.0, 0.5, "p");
    const OptResult r = optimize_point(theta, phi, p, rc.opt);
    Table t;
    detail::common_metadata(t, "optimize", rc);
    t.columns = {"theta", "phi", "p"};
    for (auto& c : detail::opt_columns()) t.columns.push_back(c);
    std::vector<Cell> row{theta, phi, p};
    detail::append_opt(row, r);
    t.rows.push_back(std::move(row));
    return t;
}

/// Surfaces for every p in rc.p_list, rows ordered theta-major, then phi, then p.
inline Table surface_table(const RunConfig& rc, SurfaceQuantity q, const std::string& command) {
    detail::validate_surface_inputs(rc);
    const GridAxis theta_axis{rc.theta_min, rc.theta_max, rc.grid_theta};
    const GridAxis phi_axis{rc.phi_min, rc.phi_max, rc.grid_phi};
    std::vector<std::vector<SweepRecord>> surfaces;
    for (double p : rc.p_list) surfaces.push_back(sweep_surface(p, theta_axis, phi_axis, rc.opt, rc.jobs));

    Table t;
    detail::common_metadata(t, command, rc);
    if (rc.figure != 0) t.metadata.emplace_back("figure", std::to_string(rc.figure));
    t.metadata.emplace_back("quantity", detail::surface_name(q));
    t.metadata.emplace_back("grid_theta", std::to_string(rc.grid_theta));
    t.metadata.emplace_back("grid_phi", std::to_string(rc.grid_phi));
    t.metadata.emplace_back("theta_range", detail::num(rc.theta_min) + ":" + detail::num(rc.theta_max));
    t.metadata.emplace_back("phi_range", detail::num(rc.phi_min) + ":" + detail::num(rc.phi_max));
    std::string ps;
    for (double p : rc.p_list) ps += (ps.empty() ? "" : ";") + detail::num(p);
    t.metadata.emplace_back("p_values", ps);
    t.columns = {"theta", "phi", "p", "value"};
    for (auto& c : detail::opt_columns()) t.columns.push_back(c);
    const std::size_t cells = surfaces.empty() ? 0 : surfaces.front().size();
    for (std::size_t k = 0; k < cells; ++k) {
        for (const auto& s : surfaces) {
            const SweepRecord& rec = s[k];
            std::vector<Cell> row{rec.theta, rec.phi, rec.p, rec.value(q)};
            detail::append_opt(row, rec.result);
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

inline Table curve_table(const RunConfig& rc, CurveQuantity q, const std::string& command) {
    qfc::detail::require_range(rc.p_min, 0.0, 0.5, "p");
    qfc::detail::require_range(rc.p_max, 0.0, 0.5, "p");
    RunConfig check = rc;
    check.p_list.clear();
    detail::validate_surface_inputs(check);
    if (rc.p_steps < 2) throw ConfigError("--p-steps must be >= 2");
    const GridAxis p_axis{rc.p_min, rc.p_max, rc.p_steps};
    const GridAxis theta_axis{rc.theta_min, rc.theta_max, rc.grid_theta};
    const GridAxis phi_axis{rc.phi_min, rc.phi_max, rc.grid_phi};
    const std::vector<CurvePoint> curve = curve_over_p(p_axis, q, theta_axis, phi_axis, rc.opt, rc.jobs);

    Table t;
    detail::common_metadata(t, command, rc);
    if (rc.figure != 0) t.metadata.emplace_back("figure", std::to_string(rc.figure));
    t.metadata.emplace_back("quantity", q == CurveQuantity::MaxDeltaF ? "max_delta_f" : "max_f_imp");
    t.metadata.emplace_back("grid_theta", std::to_string(rc.grid_theta));
    t.metadata.emplace_back("grid_phi", std::to_string(rc.grid_phi));
    t.metadata.emplace_back("p_range", detail::num(rc.p_min) + ":" + detail::num(rc.p_max));
    t.metadata.emplace_back("p_steps", std::to_string(rc.p_steps));
    t.columns = {"p", "value", "theta_argmax", "phi_argmax"};
    for (const CurvePoint& c : curve) t.rows.push_back({c.p, c.value, c.theta_argmax, c.phi_argmax});
    return t;
}

inline void append_trace(Table& t, const std::string& state, const PipelineTrace& tr) {
    const std::pair<const char*, const BlochVector*> stages[] = {{"initial", &tr.initial},
                                                                {"post_noise", &tr.post_noise},
                                                                {"post_measurement_plus", &tr.post_measurement_plus},
                                                                {"post_correction_plus", &tr.post_correction_plus},
                                                                {"final", &tr.final_normalized}};
    for (const auto& [name, v] : stages) t.rows.push_back({state, std::string(name), v->x, v->y, v->z, v->weight});
}

inline Table cmd_snapshot(const RunConfig& rc) {
    const ControlParams c = detail::full_params(rc);
    Table t;
    t.metadata.emplace_back("command", "snapshot");
    detail::params_metadata(t, c);
    t.columns = {"state", "stage", "x", "y", "z", "weight"};
    append_trace(t, "psi_plus", pipeline_trace(c, +1));
    append_trace(t, "psi_minus", pipeline_trace(c, -1));
    return t;
}

/// Bloch vectors at the Fig. 7 parameters, plus the final states of the
/// optimized beta = 0 scheme for the same input pair.
inline Table figure7_table(const RunConfig& rc) {
    ControlParams c;
    c.theta = rc.theta.value_or(kFig7Theta);
    c.phi = rc.phi.value_or(kFig7Phi);
    c.p = rc.p.value_or(kFig7P);
    c.chi = rc.chi.value_or(kFig7Chi);
    c.eta = rc.eta.value_or(kFig7Eta);
    c.beta = rc.beta.value_or(kFig7Beta);
    c.validate();
    rc.opt.validate();
    const OptResult earlier = optimize_point(c.theta, c.phi, c.p, rc.opt);

    Table t;
    detail::common_metadata(t, "figure", rc);
    t.metadata.emplace_back("figure", "7");
    detail::params_metadata(t, c);
    t.metadata.emplace_back("beta0_chi", detail::num(earlier.chi_opt_beta0));
    t.metadata.emplace_back("beta0_eta", detail::num(earlier.eta_opt_beta0));
    t.columns = {"state", "stage", "x", "y", "z", "weight"};
    ControlParams b0 = c;
    b0.chi = earlier.chi_opt_beta0;
    b0.eta = earlier.eta_opt_beta0;
    b0.beta = 0.0;
    for (int sign : {+1, -1}) {
        const std::string state = sign > 0 ? "psi_plus" : "psi_minus";
        append_trace(t, state, pipeline_trace(c, sign));
        const BlochVector v = pipeline_trace(b0, sign).final_normalized;
        t.rows.push_back({state, std::string("final_beta0"), v.x, v.y, v.z, v.weight});
    }
    return t;
}

inline Table cmd_figure(RunConfig rc) {
    switch (rc.figure) {
        case 2: return surface_table(rc, SurfaceQuantity::DeltaF, "figure");
        case 3: return surface_table(rc, SurfaceQuantity::BetaOpt, "figure");
        case 4: return curve_table(rc, CurveQuantity::MaxDeltaF, "figure");
        case 5: return surface_table(rc, SurfaceQuantity::FImp, "figure");
        case 6: return curve_table(rc, CurveQuantity::MaxFImp, "figure");
        case 7: return figure7_table(rc);
        default: break;
    }
    throw CLI::ValidationError("--figure", "expected one of 2, 3, 4, 5, 6, 7");
}

inline Table verify_table(const std::vector<CheckResult>& checks) {
    Table t;
    t.metadata.emplace_back("command", "verify");
    t.columns = {"check", "max_deviation", "tolerance", "status"};
    for (const auto& c : checks) {
        t.rows.push_back({c.name, c.max_deviation, c.tolerance, std::string(c.passed ? "pass" : "FAIL")});
    }
    return t;
}

inline void emit(const RunConfig& rc, const Table& t) {
    write_atomic(rc.out, rc.format == "json" ? to_json(t) : to_csv(t));
}

inline void to_radians(RunConfig& rc) {
    constexpr double k = std::numbers::pi / 180.0;
    for (auto* v : {&rc.theta, &rc.phi, &rc.chi, &rc.eta, &rc.beta}) {
        if (*v) **v *= k;
    }
    rc.theta_min *= k;
    rc.theta_max *= k;
    rc.phi_min *= k;
    rc.phi_max *= k;
}

/// Parses argv and runs one command. Returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& err = std::cerr) {
    RunConfig rc;
    CLI::App app{"Weak-measurement feedback control of a dephased qubit: fidelity, optimization and sweeps"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with option defaults (flags take precedence)");
    app.add_option("--out", rc.out, "Output file (default: stdout)");
    app.add_option("--format", rc.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--degrees", rc.degrees, "Angles on the command line are in degrees");
    app.add_option("--jobs", rc.jobs, "Worker threads for sweeps")->check(CLI::Range(1u, 1024u));

    auto add_params = [&](CLI::App* sub, bool with_control) {
        sub->add_option("--theta", rc.theta, "State separation angle, [0, pi/2]");
        sub->add_option("--phi", rc.phi, "Rotation of the pair about x, [0, 2pi)");
        sub->add_option("--p", rc.p, "Phase-flip probability, [0, 0.5]");
        if (with_control) {
            sub->add_option("--chi", rc.chi, "Measurement strength, [0, pi/2]");
            sub->add_option("--eta", rc.eta, "Correction angle, (-pi, pi]");
            sub->add_option("--beta", rc.beta, "Measurement phase, [0, 2pi)");
        }
    };
    auto add_opt_config = [&](CLI::App* sub) {
        sub->add_option("--chi-grid", rc.opt.chi_grid, "Coarse chi grid points");
        sub->add_option("--beta-grid", rc.opt.beta_grid, "Coarse beta grid points");
        sub->add_option("--refine-tol", rc.opt.refine_tol, "Refinement stop tolerance in fidelity");
        sub->add_option("--max-refine-iters", rc.opt.max_refine_iters, "Refinement pass limit");
    };
    auto add_grid = [&](CLI::App* sub) {
        sub->add_option("--grid-theta", rc.grid_theta, "Theta grid points");
        sub->add_option("--grid-phi", rc.grid_phi, "Phi grid points");
        sub->add_option("--theta-min", rc.theta_min);
        sub->add_option("--theta-max", rc.theta_max);
        sub->add_option("--phi-min", rc.phi_min);
        sub->add_option("--phi-max", rc.phi_max);
    };

    auto* fidelity = app.add_subcommand("fidelity", "Closed-form and simulated average fidelity at one point");
    add_params(fidelity, true);
    auto* optimize = app.add_subcommand("optimize", "Optimal (chi, eta, beta) for one input pair");
    add_params(optimize, false);
    add_opt_config(optimize);
    auto* sweep = app.add_subcommand("sweep", "Optimum over a (theta, phi) grid for one or more p");
    sweep->add_option("--p", rc.p_list, "Noise level(s)")->expected(1, -1);
    sweep->add_option("--quantity", rc.quantity, "delta_f | beta_opt | f_imp");
    add_grid(sweep);
    add_opt_config(sweep);
    auto* curve = app.add_subcommand("curve", "Maximum over states of a gain, as a function of p");
    curve->add_option("--quantity", rc.quantity, "max_delta_f | max_f_imp");
    curve->add_option("--p-steps", rc.p_steps, "Number of p values");
    curve->add_option("--p-min", rc.p_min);
    curve->add_option("--p-max", rc.p_max);
    add_grid(curve);
    add_opt_config(curve);
    auto* snapshot = app.add_subcommand("snapshot", "Bloch vectors along the control pipeline");
    add_params(snapshot, true);
    auto* verify = app.add_subcommand("verify", "Run the invariant suite");
    auto* figure = app.add_subcommand("figure", "Data behind one figure (2-7)");
    figure->add_option("--figure", rc.figure, "Figure id")->required();
    add_params(figure, true);
    figure->add_option("--p-list", rc.p_list, "Noise levels for surface figures")->expected(1, -1);
    figure->add_option("--p-steps", rc.p_steps, "Number of p values for curve figures");
    add_grid(figure);
    add_opt_config(figure);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return kUsage;
    }

    try {
        if (rc.degrees) to_radians(rc);
        if (*fidelity) {
            emit(rc, cmd_fidelity(rc));
        } else if (*optimize) {
            emit(rc, cmd_optimize(rc));
        } else if (*sweep) {
            emit(rc, surface_table(rc, detail::parse_surface_quantity(rc.quantity), "sweep"));
        } else if (*curve) {
            emit(rc, curve_table(rc, detail::parse_curve_quantity(rc.quantity), "curve"));
        } else if (*snapshot) {
            emit(rc, cmd_snapshot(rc));
        } else if (*figure) {
            emit(rc, cmd_figure(rc));
        } else if (*verify) {
            const std::vector<CheckResult> checks = run_verification();
            emit(rc, verify_table(checks));
            return all_passed(checks) ? kOk : kInvariantFailure;
        }
    } catch (const RangeError& e) {
        err << "range error: " << e.what() << "\n";
        return kRange;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kUsage;
    } catch (const CLI::Error& e) {
        err << e.get_name() << ": " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kOk;
}

}  // namespace qfc::cli
