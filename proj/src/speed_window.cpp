#include "ks/speed_window.hpp"

#include <cmath>

#include "ks/phase_plane.hpp"
#include "ks/quadrature.hpp"

namespace ks {

double edge_budget_lower(const ModelSpec& m, double u_minus, double V) {
    return V * (m.g(V) - u_minus);
}

double edge_budget_upper(const ModelSpec& m, const Equilibria& eq, double V) {
    const double span = eq.v_minus - V;
    if (span <= 0.0) return 0.0;
    // inf of g' over (V, v_minus]; g' is continuous so the closed-interval
    // minimum is the same value
    const double zmin = golden_min(m.g_prime, V, eq.v_minus, 1e-12);
    double inf_gp = std::min(m.g_prime(zmin),
                             std::min(m.g_prime(V), m.g_prime(eq.v_minus)));
    if (inf_gp < -1e-10)
        throw Error("model-violation",
                    "g' negative on (V, v_minus]; g is not increasing past beta");
    if (inf_gp < 0.0) inf_gp = 0.0;
    return span * span * inf_gp;
}

double edge_integral_lower(const ModelSpec& m, double u_minus,
                           const Equilibria& eq) {
    const double val = adaptive_simpson(
        [&](double V) { return edge_budget_lower(m, u_minus, V); }, 0.0,
        eq.v_plus, 1e-10, 1e-14);
    return val / eq.v_plus;
}

double edge_integral_upper(const ModelSpec& m, double u_minus,
                           const Equilibria& eq) {
    (void)u_minus;
    const double val = adaptive_simpson(
        [&](double V) { return edge_budget_upper(m, eq, V); }, m.beta,
        eq.v_minus, 1e-10, 1e-14);
    return val / (eq.v_minus - m.beta);
}

SpeedWindow speed_bounds(const ModelSpec& m, double u_minus, Branch branch) {
    const Equilibria eq = resolve_states(m, u_minus);
    SpeedWindow w;
    w.branch = branch;
    w.J_mean = edge_integral_lower(m, u_minus, eq);
    w.Q_mean = edge_integral_upper(m, u_minus, eq);

    const double gb = m.g(m.beta);
    const double g0 = m.g(0.0);
    const double phi0 = m.phi(0.0);
    const double rJ = std::sqrt(std::max(0.0, w.J_mean));
    const double rQ = std::sqrt(std::max(0.0, w.Q_mean));
    const double sgn = branch == Branch::Above ? 1.0 : -1.0;

    w.s1 = m.chi / (1.0 - u_minus / gb) *
           (m.phi(-sgn * rJ) - u_minus * phi0 / gb);
    w.s2 = m.chi / (1.0 - u_minus / g0) *
           (m.phi(sgn * rQ) - u_minus * phi0 / g0);

    if (branch == Branch::Above) {
        w.s_lower = m.chi * phi0;
        w.s_upper = std::min(w.s1, w.s2);
    } else {
        w.s_lower = std::max(w.s1, w.s2);
        w.s_upper = m.chi * phi0;
    }
    return w;
}

void require_nonempty(const SpeedWindow& w) {
    if (w.empty())
        throw Error("empty-window",
                    "speed window is empty: s_upper <= s_lower");
}

TrapConstants pick_trap_constants(const ModelSpec& m, const WaveParams& p,
                                  double margin) {
    if (!(margin > 0.0 && margin < 1.0))
        throw Error("constants-infeasible", "margin must lie in (0,1)");
    if (!p.above_branch(m))
        throw Error("constants-infeasible",
                    "trap constants are defined on the s > chi*phi(0) branch");

    const Equilibria eq{p.v_minus, p.v_plus};
    TrapConstants c;
    c.v_star_low = scan_max(
        [&](double V) { return edge_budget_lower(m, p.u_minus, V); }, 0.0,
        p.v_plus);
    c.v_star_high = scan_max(
        [&](double V) { return edge_budget_upper(m, eq, V); }, m.beta,
        p.v_minus);
    c.J_at_low = edge_budget_lower(m, p.u_minus, c.v_star_low);
    c.Q_at_high = edge_budget_upper(m, eq, c.v_star_high);
    c.isocline_w_beta = isocline_w(m, p, m.beta);
    c.isocline_w_zero = isocline_w(m, p, 0.0);

    const double rJ = std::sqrt(std::max(0.0, c.J_at_low));
    const double rQ = std::sqrt(std::max(0.0, c.Q_at_high));

    // The slaved density lives on the branch chi phi(W) < s; the upper edge
    // must stay below the singular line W = phi^{-1}(s/chi). Cap it so that
    // chi phi(w_high) <= s - mu (s - chi phi(0)) with mu = u_minus/(2 g(0)),
    // which always leaves room above the isocline height at V = 0. A bounded
    // sensitivity whose supremum stays under the cap level has no singular
    // line to avoid, so no cap applies.
    const double phi0 = m.chi * m.phi(0.0);
    const double mu = 0.5 * p.u_minus / m.g(0.0);
    const double level_cap = (p.s - mu * (p.s - phi0)) / m.chi;
    const double w_far = 60.0;
    const double w_cap =
        m.phi(w_far) > level_cap ? m.phi_inverse(level_cap) : HUGE_VAL;
    const double high_top = std::min(rQ, w_cap);

    c.w_low = (1.0 - margin) * c.isocline_w_beta + margin * (-rJ);
    c.w_high = (1.0 - margin) * c.isocline_w_zero + margin * high_top;

    const bool low_ok = -rJ < c.w_low && c.w_low < c.isocline_w_beta &&
                        c.isocline_w_beta < 0.0;
    const bool high_ok = 0.0 < c.isocline_w_zero &&
                         c.isocline_w_zero < c.w_high && c.w_high < rQ &&
                         c.w_high < w_cap;
    if (!low_ok || !high_ok)
        throw Error("constants-infeasible",
                    "strict inequality chains failed; s is too close to the "
                    "window edge");
    return c;
}

SaddleRate saddle_rate_bound(const ModelSpec& m, const WaveParams& p,
                             const TrapConstants& c) {
    const EquilibriumInfo saddle = classify_equilibrium(m, p, p.v_minus);
    SaddleRate r;
    r.lambda2 = saddle.lambda2.real();
    r.bound = -c.w_high / (p.v_minus - c.v_star_high);
    r.ok = r.lambda2 < r.bound && r.bound < 0.0;
    return r;
}

}  // namespace ks
