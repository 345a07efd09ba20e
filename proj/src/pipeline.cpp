#include "ks/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "ks/pde.hpp"
#include "ks/phase_plane.hpp"
#include "ks/spectrum.hpp"
#include "ks/trap.hpp"

namespace ks {

using nlohmann::json;

namespace {

json to_json(const SpeedWindow& w) {
    return {{"s_lower", w.s_lower}, {"s_upper", w.s_upper},
            {"s1", w.s1},           {"s2", w.s2},
            {"J_mean", w.J_mean},   {"Q_mean", w.Q_mean},
            {"branch", w.branch == Branch::Above ? "above" : "below"},
            {"empty", w.empty()}};
}

json to_json(const TrapConstants& c) {
    return {{"v_star_low", c.v_star_low},
            {"v_star_high", c.v_star_high},
            {"w_low", c.w_low},
            {"w_high", c.w_high},
            {"J_at_low", c.J_at_low},
            {"Q_at_high", c.Q_at_high},
            {"isocline_w_beta", c.isocline_w_beta},
            {"isocline_w_zero", c.isocline_w_zero}};
}

json to_json(const FluxReport& r) {
    json curves = json::array();
    for (const auto& c : r.curves) {
        curves.push_back({{"name", c.name},
                          {"samples", c.samples},
                          {"max_flux", c.max_flux},
                          {"arg_t", c.arg_t},
                          {"arg_v", c.arg_point[0]},
                          {"arg_w", c.arg_point[1]},
                          {"lipschitz", c.lipschitz},
                          {"inflated_max", c.inflated_max},
                          {"pass", c.pass}});
    }
    return {{"curves", curves},
            {"all_pass", r.all_pass},
            {"worst_flux", r.worst_flux},
            {"worst_inflated", r.worst_inflated}};
}

json to_json(const EquilibriumInfo& e) {
    const char* cls = e.cls == EquilibriumClass::Saddle       ? "saddle"
                      : e.cls == EquilibriumClass::StableNode ? "stable-node"
                      : e.cls == EquilibriumClass::StableFocus
                          ? "stable-focus"
                          : "non-hyperbolic";
    return {{"v", e.v},
            {"lambda1", {e.lambda1.real(), e.lambda1.imag()}},
            {"lambda2", {e.lambda2.real(), e.lambda2.imag()}},
            {"class", cls}};
}

struct StageClock {
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start)
            .count();
    }
};

}  // namespace

json report_without_timings(const json& report) {
    json out = report;
    out.erase("timings");
    return out;
}

PipelineResult run_pipeline(const RunConfig& cfg, bool write_files) {
    json report;
    report["toolkit_version"] = "1.0.0";
    report["config_echo"] = dump_config(cfg);
    json& results = report["results"] = json::object();
    json& timings = report["timings"] = json::object();

    const std::filesystem::path out_dir(cfg.out_dir);
    if (write_files) std::filesystem::create_directories(out_dir);

    bool any_failed = false;
    auto stage_failed = [&](const std::string& name, const Error& e) {
        results[name]["status"] = "failed";
        results[name]["error"] = e.code();
        results[name]["detail"] = e.what();
        any_failed = true;
    };
    auto stage_skipped = [&](const std::string& name, const std::string& why) {
        results[name]["status"] = "skipped";
        results[name]["reason"] = why;
    };
    auto stage_ok = [&](const std::string& name) {
        results[name]["status"] = "ok";
    };

    // --- model -------------------------------------------------------------
    ModelSpec model;
    bool model_ok = false;
    if (cfg.stage_enabled("model")) {
        StageClock clock;
        try {
            model = build_model(cfg.family, cfg.model_params);
            results["model"]["family"] = cfg.family;
            results["model"]["beta"] = model.beta;
            results["model"]["chi"] = model.chi;
            results["model"]["g_at_zero"] = model.g_at_zero;
            results["model"]["g_infinity"] =
                std::isinf(model.g_infinity) ? json("inf")
                                             : json(model.g_infinity);
            stage_ok("model");
            model_ok = true;
        } catch (const Error& e) {
            stage_failed("model", e);
        }
        timings["model"] = clock.seconds();
    }

    // --- states ------------------------------------------------------------
    Equilibria states{};
    bool states_ok = false;
    if (cfg.stage_enabled("states")) {
        StageClock clock;
        if (!model_ok) {
            stage_skipped("states", "model unavailable");
        } else {
            try {
                states = resolve_states(model, cfg.u_minus);
                results["states"]["v_minus"] = states.v_minus;
                results["states"]["v_plus"] = states.v_plus;
                stage_ok("states");
                states_ok = true;
            } catch (const Error& e) {
                stage_failed("states", e);
            }
        }
        timings["states"] = clock.seconds();
    }

    // --- window ------------------------------------------------------------
    SpeedWindow window;
    bool window_ok = false;
    if (cfg.stage_enabled("window")) {
        StageClock clock;
        if (!states_ok) {
            stage_skipped("window", "states unavailable");
        } else {
            try {
                window = speed_bounds(
                    model, cfg.u_minus,
                    cfg.branch == "above" ? Branch::Above : Branch::Below);
                results["window"] = to_json(window);
                results["window"]["status"] = "ok";
                window_ok = true;
            } catch (const Error& e) {
                stage_failed("window", e);
            }
        }
        timings["window"] = clock.seconds();
    }

    // --- speed resolution ----------------------------------------------------
    double s = 0.0;
    bool s_ok = false;
    if (cfg.speed == "auto") {
        if (window_ok && !window.empty()) {
            s = window.midpoint();
            s_ok = true;
        }
    } else {
        s = std::stod(cfg.speed);
        s_ok = true;
    }
    if (s_ok) results["resolved_speed"] = s;

    auto wave_at = [&](double eps) {
        return make_wave_params(model, cfg.u_minus, s, eps);
    };

    // --- equilibria ----------------------------------------------------------
    bool equilibria_ok = false;
    if (cfg.stage_enabled("equilibria")) {
        StageClock clock;
        if (!states_ok || !s_ok) {
            stage_skipped("equilibria", "states or speed unavailable");
        } else {
            try {
                const WaveParams p = wave_at(0.0);
                const auto eq = classify_equilibria(model, p);
                results["equilibria"]["attractor"] = to_json(eq[0]);
                results["equilibria"]["saddle"] = to_json(eq[1]);
                results["equilibria"]["transversal_at_u_minus"] =
                    transversal_eigenvalue(model, p, p.u_minus);
                stage_ok("equilibria");
                equilibria_ok = true;
            } catch (const Error& e) {
                stage_failed("equilibria", e);
            }
        }
        timings["equilibria"] = clock.seconds();
    }

    // --- trap ----------------------------------------------------------------
    TrapRegion trap;
    bool trap_ok = false;
    if (cfg.stage_enabled("trap")) {
        StageClock clock;
        if (!equilibria_ok || !window_ok) {
            stage_skipped("trap", "equilibria or window unavailable");
        } else {
            try {
                const WaveParams p = wave_at(0.0);
                const TrapConstants c =
                    pick_trap_constants(model, p, cfg.margin);
                trap = build_trap(model, p, c);
                const FluxReport flux =
                    certify_flux(model, p, trap, cfg.samples_per_curve);
                const SaddleRate rate = saddle_rate_bound(model, p, c);
                results["trap"]["constants"] = to_json(c);
                results["trap"]["flux"] = to_json(flux);
                results["trap"]["saddle_rate"] = {{"lambda2", rate.lambda2},
                                                  {"bound", rate.bound},
                                                  {"ok", rate.ok}};
                results["trap"]["corner_exclusion"] =
                    corner_exclusion_check(model, p, trap);
                results["trap"]["attractor_interior"] =
                    trap.winding_number({p.v_plus, 0.0}) != 0;
                stage_ok("trap");
                trap_ok = flux.all_pass && rate.ok;
                if (!trap_ok) {
                    results["trap"]["status"] = "failed";
                    results["trap"]["error"] = "certification-failed";
                    any_failed = true;
                }
                if (write_files)
                    write_flux_csv(model, p, trap, 512,
                                   (out_dir / "trap_flux.csv").string());
            } catch (const Error& e) {
                stage_failed("trap", e);
            }
        }
        timings["trap"] = clock.seconds();
    }

    // --- shoot -----------------------------------------------------------------
    Orbit singular;
    bool shoot_ok = false;
    if (cfg.stage_enabled("shoot")) {
        StageClock clock;
        if (!trap_ok) {
            stage_skipped("shoot", "trap unavailable or uncertified");
        } else {
            try {
                const WaveParams p = wave_at(0.0);
                IntegratorConfig icfg;
                icfg.rel_tol = cfg.rel_tol;
                icfg.abs_tol = cfg.abs_tol;
                icfg.event_tol = cfg.event_tol;
                icfg.max_length = cfg.max_length;
                singular = shoot_heteroclinic(model, p, trap, cfg.offset, icfg);
                results["shoot"]["terminal_residual"] =
                    singular.terminal_residual;
                results["shoot"]["samples"] =
                    static_cast<int>(singular.xi.size());
                results["shoot"]["xi_span"] =
                    singular.xi.back() - singular.xi.front();
                results["shoot"]["stayed_in_trap"] = singular.stayed_in_trap;
                stage_ok("shoot");
                shoot_ok = true;
                if (write_files)
                    write_orbit_csv(singular,
                                    (out_dir / "orbit_singular.csv").string());
            } catch (const Error& e) {
                stage_failed("shoot", e);
            }
        }
        timings["shoot"] = clock.seconds();
    }

    // --- continuation -----------------------------------------------------------
    if (cfg.stage_enabled("continue")) {
        StageClock clock;
        if (!shoot_ok) {
            stage_skipped("continue", "singular orbit unavailable");
        } else {
            try {
                const WaveParams p = wave_at(0.0);
                IntegratorConfig icfg;
                icfg.rel_tol = cfg.rel_tol;
                icfg.abs_tol = cfg.abs_tol;
                icfg.event_tol = cfg.event_tol;
                icfg.max_length = cfg.max_length;
                const auto rungs = continue_in_epsilon(
                    model, p, cfg.ladder, trap, cfg.offset, icfg, singular);
                json jr = json::array();
                std::vector<double> log_eps, log_dist;
                bool all_ok = true;
                for (const auto& r : rungs) {
                    json one = {{"epsilon", r.epsilon}, {"ok", r.ok}};
                    if (r.ok) {
                        one["distance"] = r.distance_to_singular;
                        one["residual"] = r.orbit.terminal_residual;
                        if (write_files) {
                            std::ostringstream name;
                            name << "orbit_eps" << r.epsilon << ".csv";
                            write_orbit_csv(r.orbit,
                                            (out_dir / name.str()).string());
                        }
                        WaveParams pe = p;
                        pe.epsilon = r.epsilon;
                        if (r.epsilon > 0.0) {
                            one["defect"] =
                                slow_manifold_defect(model, pe, r.orbit, 0.1);
                            log_eps.push_back(std::log(r.epsilon));
                            log_dist.push_back(
                                std::log(std::max(r.distance_to_singular,
                                                  1e-300)));
                        }
                    } else {
                        one["error"] = r.error;
                        all_ok = false;
                    }
                    jr.push_back(one);
                }
                results["continue"]["rungs"] = jr;
                if (log_eps.size() >= 2) {
                    const auto [a, b] = fit_line(log_eps, log_dist);
                    (void)a;
                    results["continue"]["loglog_slope"] = b;
                }
                if (all_ok) {
                    stage_ok("continue");
                } else {
                    results["continue"]["status"] = "failed";
                    results["continue"]["error"] = "rung-failure";
                    any_failed = true;
                }
            } catch (const Error& e) {
                stage_failed("continue", e);
            }
        }
        timings["continue"] = clock.seconds();
    }

    // --- spectrum -----------------------------------------------------------------
    if (cfg.stage_enabled("spectrum")) {
        StageClock clock;
        if (!states_ok || !s_ok) {
            stage_skipped("spectrum", "states or speed unavailable");
        } else {
            try {
                const WaveParams p = wave_at(cfg.epsilon);
                json sides = json::object();
                for (Side side : {Side::Plus, Side::Minus}) {
                    const char* tag = side == Side::Plus ? "plus" : "minus";
                    json rho_results = json::array();
                    for (double rho : cfg.rho_grid) {
                        const auto mats =
                            asymptotic_matrices(model, p, side, rho);
                        const auto gr =
                            max_growth(mats, cfg.tau_max, cfg.tau_points);
                        rho_results.push_back(
                            {{"rho", rho},
                             {"tau_star", gr.tau_star},
                             {"re_lambda_star", gr.lambda_star.real()},
                             {"im_lambda_star", gr.lambda_star.imag()},
                             {"positive", gr.positive}});
                        if (write_files) {
                            std::ostringstream name;
                            name << "dispersion_" << tag << "_rho" << rho
                                 << ".csv";
                            write_dispersion_csv(mats, cfg.tau_max, 401,
                                                 (out_dir / name.str())
                                                     .string());
                        }
                    }
                    sides[tag] = rho_results;
                }
                results["spectrum"]["sides"] = sides;
                results["spectrum"]["weight_polynomial"] = [&] {
                    const auto rep = weight_polynomial_check(
                        model, wave_at(cfg.epsilon), cfg.rho_grid);
                    return json{{"disc", rep.disc},
                                {"disc_negative", rep.disc_negative},
                                {"p_at_zero", rep.p_at_zero},
                                {"min_p", rep.min_p},
                                {"small_eps_ok", rep.small_eps_ok}};
                }();
                stage_ok("spectrum");
            } catch (const Error& e) {
                stage_failed("spectrum", e);
            }
        }
        timings["spectrum"] = clock.seconds();
    }

    // --- resolvent ----------------------------------------------------------------
    if (cfg.stage_enabled("resolvent")) {
        StageClock clock;
        if (!states_ok || !s_ok) {
            stage_skipped("resolvent", "states or speed unavailable");
        } else {
            try {
                const WaveParams pe = wave_at(cfg.epsilon);
                IntegratorConfig icfg;
                icfg.event_tol = cfg.event_tol;
                icfg.max_length = cfg.max_length;
                const Orbit pulse = shoot_slow(model, pe, cfg.offset, icfg);
                const ProfileK k = profile_k_from_orbit(model, pe, pulse);

                ResolventGrid grid;
                grid.h = cfg.resolvent_spacing;
                grid.n = static_cast<int>(
                             std::round(2.0 * cfg.resolvent_halfwidth / grid.h)) +
                         1;
                grid.x0 = -cfg.resolvent_halfwidth;

                std::uint64_t seed = cfg.seed ? cfg.seed : 1;
                auto next = [&seed]() {
                    seed ^= seed << 13;
                    seed ^= seed >> 7;
                    seed ^= seed << 17;
                    return seed;
                };
                json checks = json::array();
                double worst_residual = 0.0, worst_ratio_frac = 0.0;
                bool all_ok = true;
                for (int i = 0; i < cfg.resolvent_samples; ++i) {
                    const double u1 =
                        static_cast<double>(next() >> 11) * 0x1.0p-53;
                    const double u2 =
                        static_cast<double>(next() >> 11) * 0x1.0p-53;
                    const double re = std::pow(10.0, 3.0 * u1);  // [1, 1e3]
                    const double theta = 0.49 * M_PI * u2;
                    const Cplx lambda(re, re * std::tan(theta) *
                                              ((next() & 1) ? 1.0 : -1.0));
                    const auto f1 = smooth_sample(next(), grid);
                    const auto f2 = smooth_sample(next(), grid);
                    const auto chk = resolvent_bound_check(pe, lambda, f1, f2,
                                                           grid, k);
                    checks.push_back({{"re_lambda", lambda.real()},
                                      {"im_lambda", lambda.imag()},
                                      {"residual_rel", chk.residual_rel},
                                      {"ratio", chk.ratio},
                                      {"c1", chk.c1},
                                      {"residual_ok", chk.residual_ok},
                                      {"ratio_ok", chk.ratio_ok}});
                    worst_residual = std::max(worst_residual, chk.residual_rel);
                    worst_ratio_frac =
                        std::max(worst_ratio_frac, chk.ratio / chk.c1);
                    all_ok = all_ok && chk.residual_ok && chk.ratio_ok;
                }
                results["resolvent"]["checks"] = checks;
                results["resolvent"]["worst_residual"] = worst_residual;
                results["resolvent"]["worst_ratio_fraction"] = worst_ratio_frac;
                results["resolvent"]["k_sup"] = k.norm_inf;
                if (all_ok) {
                    stage_ok("resolvent");
                } else {
                    results["resolvent"]["status"] = "failed";
                    results["resolvent"]["error"] = "bound-violated";
                    any_failed = true;
                }
            } catch (const Error& e) {
                stage_failed("resolvent", e);
            }
        }
        timings["resolvent"] = clock.seconds();
    }

    // --- pde -----------------------------------------------------------------------
    if (cfg.stage_enabled("pde")) {
        StageClock clock;
        if (!states_ok || !s_ok) {
            stage_skipped("pde", "states or speed unavailable");
        } else {
            try {
                json jpde;

                // (a) translation speed at the milder epsilon
                if (cfg.pde_mode != "growth") {
                    const WaveParams pe = wave_at(cfg.pde_epsilon_speed);
                    IntegratorConfig icfg;
                    icfg.event_tol = cfg.event_tol;
                    icfg.max_length = cfg.max_length;
                    const Orbit pulse = shoot_slow(model, pe, cfg.offset, icfg);
                    const double support = visible_support(pe, pulse);
                    Grid1D grid;
                    grid.x_min = 0.0;
                    grid.x_max = 4.2 * support;
                    grid.n = cfg.pde_nodes;
                    grid.boundary = cfg.pde_boundary == "periodic"
                                        ? Boundary::Periodic
                                        : Boundary::Neumann;
                    PDEState state = seed_pulse(model, pe, pulse, grid);

                    const double rate =
                        -model.g_prime(pe.v_plus) / pe.epsilon;
                    const double horizon =
                        cfg.pde_horizon > 0.0
                            ? cfg.pde_horizon
                            : std::min(0.7 * std::log(1e4) / rate, 10.0 / s);
                    const double dt =
                        std::min(0.2 * grid.dx() / (model.chi * 2.0 + 1.0),
                                 0.05 / rate);
                    const double mass0 = mass_u(grid, state);
                    // track the core inside a gate around its last position,
                    // keeping the growing tail modes out of the fit
                    double gate = peak_position(grid, state.u, pe.u_minus);
                    std::vector<std::pair<double, double>> frames;
                    frames.emplace_back(0.0, gate);
                    const int n_steps =
                        static_cast<int>(std::ceil(horizon / dt));
                    const int stride = std::max(1, n_steps / 24);
                    long total_steps = 0;
                    int dumped = 0;
                    for (int i = 0; i < n_steps; ++i) {
                        step(model, pe, grid, state, dt);
                        ++total_steps;
                        if ((i + 1) % stride == 0) {
                            gate = peak_position(grid, state.u, pe.u_minus,
                                                 gate - 0.75 * support,
                                                 gate + 0.75 * support);
                            frames.emplace_back(state.t, gate);
                        }
                        if (write_files && cfg.pde_frame_stride > 0 &&
                            (i + 1) % cfg.pde_frame_stride == 0) {
                            std::ostringstream name;
                            name << "pde_frame_" << ++dumped << ".csv";
                            write_frame_csv(grid, state,
                                            (out_dir / name.str()).string());
                        }
                    }
                    const double mass1 = mass_u(grid, state);
                    const SpeedFit fit = track_speed(frames);
                    // drift of the core from a rigid translate at speed s
                    const double expect_pos =
                        frames.front().second + s * state.t;
                    const double comoving_drift =
                        std::abs(frames.back().second - expect_pos);
                    jpde["speed"] = {
                        {"comoving_drift", comoving_drift},
                        {"comoving_drift_cells", comoving_drift / grid.dx()},
                        {"epsilon", pe.epsilon},
                        {"measured", fit.speed},
                        {"target", s},
                        {"rel_err", std::abs(fit.speed - s) / s},
                        {"frames", fit.frames},
                        {"horizon", horizon},
                        {"mass_drift_per_1e3_steps",
                         std::abs(mass1 - mass0) / std::max(1e-300, mass0) *
                             1e3 / std::max<long>(1, total_steps)},
                        {"nodes", grid.n}};
                    if (write_files)
                        write_frame_csv(grid, state,
                                        (out_dir / "pde_final_frame.csv")
                                            .string());
                }

                // (b) perturbation growth at the stiffer epsilon
                if (cfg.pde_mode != "speed") {
                    const WaveParams pe = wave_at(cfg.pde_epsilon_growth);
                    IntegratorConfig icfg;
                    icfg.event_tol = cfg.event_tol;
                    icfg.max_length = cfg.max_length;
                    const Orbit pulse = shoot_slow(model, pe, cfg.offset, icfg);
                    const double support = visible_support(pe, pulse);
                    Grid1D grid;
                    grid.x_min = 0.0;
                    grid.x_max = 4.2 * support;
                    grid.n = cfg.pde_nodes;
                    grid.boundary = cfg.pde_boundary == "periodic"
                                        ? Boundary::Periodic
                                        : Boundary::Neumann;
                    const PDEState state = seed_pulse(model, pe, pulse, grid);

                    const double rate =
                        -model.g_prime(pe.v_plus) / pe.epsilon;
                    const double horizon = 6.0 * std::log(20.0) / rate;
                    const double dt =
                        std::min(0.2 * grid.dx() / (model.chi * 2.0 + 1.0),
                                 0.05 / rate);
                    const GrowthFit fit =
                        growth_probe(model, pe, grid, state,
                                     cfg.perturb_amplitude, horizon, dt);
                    const auto mats =
                        asymptotic_matrices(model, pe, Side::Plus, 0.0);
                    const double predicted =
                        max_growth(mats, cfg.tau_max, cfg.tau_points)
                            .lambda_star.real();
                    jpde["growth"] = {
                        {"epsilon", pe.epsilon},
                        {"measured_rate", fit.rate},
                        {"dispersion_rate", predicted},
                        {"ratio", fit.rate / predicted},
                        {"window_t0", fit.window_t0},
                        {"window_t1", fit.window_t1}};
                }

                results["pde"] = jpde;
                results["pde"]["status"] = "ok";
            } catch (const Error& e) {
                stage_failed("pde", e);
            }
        }
        timings["pde"] = clock.seconds();
    }

    if (write_files) {
        std::ofstream f(out_dir / "report.json");
        f << report.dump(2) << '\n';
    }
    return {report, any_failed};
}

}  // namespace ks
