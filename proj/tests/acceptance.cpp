// Acceptance suite for the canonical configuration (tanh sensitivity,
// quadratic degradation, chi = 1, u_minus = 5/4). Each criterion prints one
// pass/fail line with its measured quantities and wall time; the process
// exits nonzero if any criterion fails.
//
// Expected values marked "exact" come from closed forms evaluated in this
// file (root pairs, polynomial antiderivatives of the edge budgets, the
// stationary-tail dispersion roots); everything else is checked against the
// stated tolerances.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ks/pde.hpp"
#include "ks/phase_plane.hpp"
#include "ks/spectrum.hpp"
#include "ks/trap.hpp"

using namespace ks;

namespace {

int g_failures = 0;

struct Criterion {
    std::string name;
    double budget_s;
    std::function<bool(std::string&)> body;
};

void run(const Criterion& c) {
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
        ok = c.body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
        ok = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (secs > c.budget_s) {
        ok = false;
        detail += " [over time budget]";
    }
    std::printf("[%s] %s (%.2f s / %.0f s)  %s\n", ok ? "PASS" : "FAIL",
                c.name.c_str(), secs, c.budget_s, detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

// shared canonical objects, built once
struct Canonical {
    ModelSpec m;
    SpeedWindow window;
    WaveParams p;       // window midpoint speed, eps = 0
    TrapConstants c;
    TrapRegion trap;
};

Canonical build_canonical() {
    Canonical c;
    c.m = build_model("tanh-quadratic", {});
    c.window = speed_bounds(c.m, 1.25, Branch::Above);
    c.p = make_wave_params(c.m, 1.25, c.window.midpoint(), 0.0);
    c.c = pick_trap_constants(c.m, c.p, 0.5);
    c.trap = build_trap(c.m, c.p, c.c);
    return c;
}

}  // namespace

int main() {
    std::printf("acceptance: canonical pulse configuration\n");
    const Canonical C = build_canonical();

    // ---------------------------------------------------------------- C1
    run({"C1 state resolution", 1.0, [&](std::string& d) {
             const Equilibria eq = resolve_states(C.m, 1.25);
             const double e1 = std::abs(eq.v_minus - 1.5);
             const double e2 = std::abs(eq.v_plus - 0.5);
             d = fmt("|v- - 3/2| = %.2e, |v+ - 1/2| = %.2e (tol 1e-10)", e1, e2);
             return e1 < 1e-10 && e2 < 1e-10;
         }});

    // ---------------------------------------------------------------- C2
    run({"C2 identity suite", 1.0, [&](std::string& d) {
             bool ok = slaved_u(C.m, C.p, 0.0) == 1.25;  // exact
             double worst = 0.0;
             for (int i = 1; i <= 200; ++i) {
                 const double v = C.p.v_minus * i / 200.0;
                 const double w = isocline_w(C.m, C.p, v);
                 worst = std::max(worst,
                                  std::abs(slaved_u(C.m, C.p, w) - C.m.g(v)));
             }
             ok = ok && worst < 1e-10;
             const double b1 =
                 std::abs(isocline_level(C.m, C.p, C.p.v_minus) - 1.0);
             const double b2 =
                 std::abs(isocline_level(C.m, C.p, C.p.v_plus) - 1.0);
             ok = ok && b1 < 1e-10 && b2 < 1e-10;
             d = fmt("grid identity %.2e, level pins %.2e/%.2e (tol 1e-10)",
                     worst, b1, b2);
             return ok;
         }});

    // ---------------------------------------------------------------- C3
    run({"C3 speed window", 5.0, [&](std::string& d) {
             // closed-form oracles for the canonical quadratic degradation:
             // lower budget V^3 - 2V^2 + (3/4)V on [0,1/2], mean 5/96;
             // upper budget 2(V-1)(3/2-V)^2 on [1,3/2], mean 1/48
             auto FJ = [](double v) {
                 return v * v * v * v / 4 - 2.0 * v * v * v / 3 +
                        0.375 * v * v;
             };
             auto FQ = [](double v) {
                 return v * v * v * v / 2 - 8.0 * v * v * v / 3 +
                        5.25 * v * v - 4.5 * v;
             };
             const double j_oracle = (FJ(0.5) - FJ(0.0)) / 0.5;   // = 5/96
             const double q_oracle = (FQ(1.5) - FQ(1.0)) / 0.5;   // = 1/48
             const double s1_oracle =
                 1.0 / (1.0 - 1.25) * (C.m.phi(-std::sqrt(j_oracle)) - 1.25);
             const double s2_oracle =
                 1.0 / (1.0 - 0.625) * (C.m.phi(std::sqrt(q_oracle)) - 0.625);

             const double ej = std::abs(C.window.J_mean - j_oracle) / j_oracle;
             const double eq = std::abs(C.window.Q_mean - q_oracle) / q_oracle;
             const double e1 = std::abs(C.window.s1 - s1_oracle) / s1_oracle;
             const double e2 = std::abs(C.window.s2 - s2_oracle) / s2_oracle;
             const bool ok = ej < 1e-9 && eq < 1e-9 && e1 < 1e-9 &&
                             e2 < 1e-9 && !C.window.empty() &&
                             C.window.s_lower == 1.0;
             d = fmt("J %.2e, Q %.2e, s1 %.2e, s2 %.2e rel (tol 1e-9); "
                     "window (1, %.6f)",
                     ej, eq, e1, e2, C.window.s_upper);
             return ok;
         }});

    // ---------------------------------------------------------------- C4
    run({"C4 trap certification", 30.0, [&](std::string& d) {
             double worst_flux = -HUGE_VAL, worst_inflated = -HUGE_VAL;
             bool ok = true;
             for (int k = 1; k <= 10; ++k) {
                 const double s = C.window.s_lower +
                                  (C.window.s_upper - C.window.s_lower) * k /
                                      11.0;
                 const WaveParams p = make_wave_params(C.m, 1.25, s, 0.0);
                 const TrapConstants tc = pick_trap_constants(C.m, p, 0.5);
                 const TrapRegion trap = build_trap(C.m, p, tc);
                 const FluxReport r = certify_flux(C.m, p, trap, 10000);
                 const SaddleRate rate = saddle_rate_bound(C.m, p, tc);
                 ok = ok && r.all_pass && rate.ok &&
                      corner_exclusion_check(C.m, p, trap);
                 worst_flux = std::max(worst_flux, r.worst_flux);
                 // the inflated bound keeps an O(L * gap) residue at the two
                 // corners where the flux vanishes identically; 1e-5 covers
                 // it at 1e4 Chebyshev samples
                 worst_inflated = std::max(worst_inflated, r.worst_inflated);
                 ok = ok && r.worst_inflated <= 1e-5;
             }
             d = fmt("10 speeds x 7 pieces: max flux %.2e (tol 1e-11), "
                     "inflated %.2e (tol 1e-5), contraction bound held",
                     worst_flux, worst_inflated);
             return ok;
         }});

    // ---------------------------------------------------------------- C5
    IntegratorConfig icfg;
    Orbit singular;
    run({"C5 heteroclinic shot", 10.0, [&](std::string& d) {
             singular = shoot_heteroclinic(C.m, C.p, C.trap, 1e-7, icfg);
             const Orbit half = shoot_heteroclinic(C.m, C.p, C.trap, 5e-8, icfg);
             const double hd = polyline_hausdorff(singular.vw(), half.vw());
             const bool ok = singular.captured && singular.stayed_in_trap &&
                             singular.terminal_residual < 1e-6 &&
                             half.captured && hd < 10.0 * 1e-7;
             d = fmt("residual %.2e (tol 1e-6), in-region, offset-halving "
                     "moved %.2e (tol 1e-6)",
                     singular.terminal_residual, hd);
             return ok;
         }});

    // ---------------------------------------------------------------- C6
    run({"C6 continuation ladder", 60.0, [&](std::string& d) {
             const std::vector<double> ladder = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
             const auto rungs = continue_in_epsilon(C.m, C.p, ladder, C.trap,
                                                    1e-7, icfg, singular);
             bool ok = true;
             std::vector<double> le, ld, ratios;
             double prev = HUGE_VAL;
             for (const auto& r : rungs) {
                 ok = ok && r.ok;
                 if (!r.ok) continue;
                 ok = ok && r.distance_to_singular < prev;
                 prev = r.distance_to_singular;
                 le.push_back(std::log(r.epsilon));
                 ld.push_back(std::log(r.distance_to_singular));
                 WaveParams pe = C.p;
                 pe.epsilon = r.epsilon;
                 ratios.push_back(
                     slow_manifold_defect(C.m, pe, r.orbit, 0.1) / r.epsilon);
             }
             double slope = 0.0;
             if (le.size() >= 2) slope = fit_line(le, ld).second;
             ok = ok && slope >= 0.7 && slope <= 1.3;
             double rmin = HUGE_VAL, rmax = 0.0;
             for (double r : ratios) {
                 rmin = std::min(rmin, r);
                 rmax = std::max(rmax, r);
             }
             // stable fitted constant: the per-rung defect/eps ratios sit in
             // a narrow band
             ok = ok && rmax / rmin < 3.0 && rmax > 0.0;
             d = fmt("distances decrease, loglog slope %.3f (in [0.7,1.3]), "
                     "defect/eps in [%.3f, %.3f]",
                     slope, rmin, rmax);
             return ok;
         }});

    // ---------------------------------------------------------------- C7
    run({"C7 tail spectrum", 10.0, [&](std::string& d) {
             bool ok = true;
             // stationary-tail anchor at eps = 1e-2: roots {0, 100} exactly
             WaveParams pe = C.p;
             pe.epsilon = 1e-2;
             const auto mats = asymptotic_matrices(C.m, pe, Side::Plus, 0.0);
             const auto pt = dispersion_roots(mats, 0.0);
             const double anchor =
                 std::abs(pt.lambda_plus - Cplx(-C.m.g_prime(pe.v_plus) /
                                                    pe.epsilon,
                                                0.0)) +
                 std::abs(pt.lambda_minus);
             ok = ok && anchor < 1e-10;

             int positives = 0, total = 0;
             double min_p = HUGE_VAL, max_disc = -HUGE_VAL;
             for (double eps : {1e-2, 1e-3}) {
                 WaveParams pp = C.p;
                 pp.epsilon = eps;
                 std::vector<double> rhos = {0.0};
                 for (int k = 0; k <= 12; ++k)
                     rhos.push_back(std::pow(10.0, -2.0 + 3.0 * k / 12.0));
                 for (double rho : rhos) {
                     const auto mw = asymptotic_matrices(C.m, pp, Side::Plus, rho);
                     ++total;
                     positives += max_growth(mw, 2.0, 401).positive ? 1 : 0;
                 }
                 std::vector<double> grid(rhos.begin() + 1, rhos.end());
                 const auto wp = weight_polynomial_check(C.m, pp, grid);
                 ok = ok && wp.disc_negative && wp.min_p > 0.0;
                 min_p = std::min(min_p, wp.min_p);
                 max_disc = std::max(max_disc, wp.disc);
             }
             ok = ok && positives == total;
             d = fmt("tau=0 anchor %.2e (tol 1e-10); growth positive %d/%d; "
                     "disc < 0 (max %.1f), min P %.2f",
                     anchor, positives, total, max_disc, min_p);
             return ok;
         }});

    // ---------------------------------------------------------------- C8
    run({"C8 resolvent oracle", 30.0, [&](std::string& d) {
             WaveParams pe = C.p;
             pe.epsilon = 1e-2;
             const Orbit pulse = shoot_slow(C.m, pe, 1e-7, icfg);
             const ProfileK k = profile_k_from_orbit(C.m, pe, pulse);
             ResolventGrid grid;
             grid.x0 = -30.0;
             grid.h = 1e-2;
             grid.n = 6001;

             std::uint64_t seed = 2024;
             auto next = [&]() {
                 seed ^= seed << 13;
                 seed ^= seed >> 7;
                 seed ^= seed << 17;
                 return seed;
             };
             auto uni = [&]() {
                 return static_cast<double>(next() >> 11) * 0x1.0p-53;
             };
             bool ok = true;
             double worst_res = 0.0, worst_frac = 0.0;
             for (int i = 0; i < 10; ++i) {
                 const double re = std::pow(10.0, 3.0 * uni());  // [1, 1e3]
                 const double th = 0.49 * M_PI * uni();
                 const Cplx lam(re, re * std::tan(th) *
                                        ((next() & 1) ? 1.0 : -1.0));
                 const auto f1 = smooth_sample(next(), grid);
                 const auto f2 = smooth_sample(next(), grid);
                 const auto chk =
                     resolvent_bound_check(pe, lam, f1, f2, grid, k);
                 ok = ok && chk.residual_ok && chk.ratio_ok;
                 worst_res = std::max(worst_res, chk.residual_rel);
                 worst_frac = std::max(worst_frac, chk.ratio / chk.c1);
             }
             d = fmt("10 draws, Re lambda in [1,1e3]: residual %.2e "
                     "(tol 1e-4), ratio/C1 %.3f (C1 = %.3f)",
                     worst_res, worst_frac,
                     2.0 * (1.0 + 3.0 * pe.epsilon * k.norm_inf));
             return ok;
         }});

    // ---------------------------------------------------------------- C9
    run({"C9 direct simulation", 300.0, [&](std::string& d) {
             bool ok = true;
             // (a) translation speed at eps = 0.1, 4096 nodes
             WaveParams ps = C.p;
             ps.epsilon = 0.1;
             const Orbit pulse_s = shoot_slow(C.m, ps, 1e-7, icfg);
             const double support = visible_support(ps, pulse_s);
             Grid1D grid{0.0, 4.2 * support, 4096, Boundary::Neumann};
             PDEState st = seed_pulse(C.m, ps, pulse_s, grid);
             const double rate_s = -C.m.g_prime(ps.v_plus) / ps.epsilon;
             const double horizon =
                 std::min(0.7 * std::log(1e4) / rate_s, 10.0 / ps.s);
             const double dt =
                 std::min(0.2 * grid.dx() / 3.0, 0.05 / rate_s);
             const double mass0 = mass_u(grid, st);
             double gate = peak_position(grid, st.u, ps.u_minus);
             std::vector<std::pair<double, double>> frames{{0.0, gate}};
             const int n_steps = static_cast<int>(std::ceil(horizon / dt));
             const int stride = std::max(1, n_steps / 24);
             for (int i = 0; i < n_steps; ++i) {
                 step(C.m, ps, grid, st, dt);
                 if ((i + 1) % stride == 0) {
                     gate = peak_position(grid, st.u, ps.u_minus,
                                          gate - 0.75 * support,
                                          gate + 0.75 * support);
                     frames.emplace_back(st.t, gate);
                 }
             }
             const double drift = std::abs(mass_u(grid, st) - mass0) / mass0 *
                                  1e3 / n_steps;
             const SpeedFit fit = track_speed(frames);
             const double rel = std::abs(fit.speed - ps.s) / ps.s;
             ok = ok && rel < 0.05 && drift < 1e-8;

             // (b) perturbation growth at eps = 1e-2
             WaveParams pg = C.p;
             pg.epsilon = 1e-2;
             const Orbit pulse_g = shoot_slow(C.m, pg, 1e-7, icfg);
             const double sup_g = visible_support(pg, pulse_g);
             Grid1D grid_g{0.0, 4.2 * sup_g, 4096, Boundary::Neumann};
             const PDEState st_g = seed_pulse(C.m, pg, pulse_g, grid_g);
             const double rate_g = -C.m.g_prime(pg.v_plus) / pg.epsilon;
             const GrowthFit gf =
                 growth_probe(C.m, pg, grid_g, st_g, 1e-5,
                              6.0 * std::log(20.0) / rate_g, 0.05 / rate_g);
             const auto mats = asymptotic_matrices(C.m, pg, Side::Plus, 0.0);
             const double predicted =
                 max_growth(mats, 2.0, 401).lambda_star.real();
             ok = ok && gf.rate > 0.0;
             // proximity to the dispersion rate is reported, not asserted
             d = fmt("speed %.5f vs %.5f (%.2f%%, tol 5%%); mass drift %.1e "
                     "per 1e3 steps (tol 1e-8); growth %.1f > 0, "
                     "%.2fx dispersion %.1f [reported]",
                     fit.speed, ps.s, 100.0 * rel, drift, gf.rate,
                     gf.rate / predicted, predicted);
             return ok;
         }});

    std::printf("%s: %d criterion(s) failed\n",
                g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
    return g_failures == 0 ? 0 : 1;
}
