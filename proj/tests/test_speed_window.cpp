// Speed window and trap constants. The canonical quadratic degradation has
// closed-form edge budgets, so the interval means have exact rational values
// that serve as independent oracles for the adaptive quadrature:
//
//   lower budget J(V) = V (g(V) - 5/4) = V^3 - 2V^2 + (3/4)V on [0, 1/2]
//     antiderivative V^4/4 - (2/3)V^3 + (3/8)V^2, giving mean 5/96
//   upper budget Q(V) = (3/2 - V)^2 inf g' = 2(V-1)(3/2-V)^2 on [1, 3/2]
//     with substitution t = V-1: 2 t(1/2-t)^2 integrates to 1/96 on [0,1/2],
//     giving mean 1/48

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ks/phase_plane.hpp"
#include "ks/speed_window.hpp"

using namespace ks;

namespace {

const double kJMeanExact = 5.0 / 96.0;
const double kQMeanExact = 1.0 / 48.0;

ModelSpec canonical() { return build_model("tanh-quadratic", {}); }

// the two bound formulas evaluated from the exact means
double s1_exact(const ModelSpec& m) {
    return 1.0 / (1.0 - 1.25) * (m.phi(-std::sqrt(kJMeanExact)) - 1.25);
}
double s2_exact(const ModelSpec& m) {
    return 1.0 / (1.0 - 0.625) * (m.phi(std::sqrt(kQMeanExact)) - 0.625);
}

}  // namespace

TEST_CASE("edge budgets vanish where they must") {
    const ModelSpec m = canonical();
    const Equilibria eq = resolve_states(m, 1.25);
    CHECK(edge_budget_lower(m, 1.25, 0.0) == 0.0);
    CHECK(std::abs(edge_budget_lower(m, 1.25, eq.v_plus)) < 1e-10);
    CHECK(std::abs(edge_budget_upper(m, eq, eq.v_minus)) < 1e-12);
    // positive strictly inside
    CHECK(edge_budget_lower(m, 1.25, 0.25) > 0.0);
    CHECK(edge_budget_upper(m, eq, 1.2) > 0.0);
}

TEST_CASE("interval means agree with the closed-form oracles") {
    const ModelSpec m = canonical();
    const Equilibria eq = resolve_states(m, 1.25);
    CHECK(std::abs(edge_integral_lower(m, 1.25, eq) - kJMeanExact) <
          1e-9 * kJMeanExact);
    CHECK(std::abs(edge_integral_upper(m, 1.25, eq) - kQMeanExact) <
          1e-9 * kQMeanExact);
}

TEST_CASE("speed bounds from the oracle chain") {
    const ModelSpec m = canonical();
    const SpeedWindow w = speed_bounds(m, 1.25, Branch::Above);

    CHECK(std::abs(w.J_mean - kJMeanExact) < 1e-9 * kJMeanExact);
    CHECK(std::abs(w.Q_mean - kQMeanExact) < 1e-9 * kQMeanExact);
    CHECK(std::abs(w.s1 - s1_exact(m)) < 1e-9 * std::abs(s1_exact(m)));
    CHECK(std::abs(w.s2 - s2_exact(m)) < 1e-9 * std::abs(s2_exact(m)));

    CHECK(w.s_lower == doctest::Approx(1.0));  // chi phi(0)
    CHECK(w.s_upper == doctest::Approx(std::min(w.s1, w.s2)));
    CHECK_FALSE(w.empty());
    CHECK(w.s_upper == doctest::Approx(w.s2));  // upper budget binds here

    // the two normalizers straddle zero in the two-state regime
    CHECK(1.0 - 1.25 / m.g(m.beta) < 0.0);
    CHECK(1.0 - 1.25 / m.g(0.0) > 0.0);
}

TEST_CASE("mirrored branch window hangs below chi phi(0)") {
    const ModelSpec m = canonical();
    const SpeedWindow w = speed_bounds(m, 1.25, Branch::Below);
    CHECK(w.s_upper == doctest::Approx(1.0));
    // radicals flip sign relative to the upper branch
    const double s1b = 1.0 / (1.0 - 1.25) * (m.phi(std::sqrt(kJMeanExact)) - 1.25);
    const double s2b =
        1.0 / (1.0 - 0.625) * (m.phi(-std::sqrt(kQMeanExact)) - 0.625);
    CHECK(w.s1 == doctest::Approx(s1b).epsilon(1e-9));
    CHECK(w.s2 == doctest::Approx(s2b).epsilon(1e-9));
    CHECK(w.s_lower == doctest::Approx(std::max(s1b, s2b)).epsilon(1e-9));
}

TEST_CASE("window recomputes without error as the regime narrows") {
    const ModelSpec m = canonical();
    double prev_len = HUGE_VAL;
    for (double u : {1.25, 1.1, 1.01, 1.001}) {
        const SpeedWindow w = speed_bounds(m, u, Branch::Above);
        const double len = w.s_upper - w.s_lower;
        CHECK(std::isfinite(len));
        CHECK(len < prev_len);
        prev_len = len;
    }
}

TEST_CASE("empty-window guard") {
    SpeedWindow w;
    w.s_lower = 1.0;
    w.s_upper = 0.5;
    CHECK_THROWS_WITH_AS(require_nonempty(w), doctest::Contains("empty-window"),
                         Error);
}

TEST_CASE("budget maximizers land at the stationary points") {
    const ModelSpec m = canonical();
    const SpeedWindow w = speed_bounds(m, 1.25, Branch::Above);
    const WaveParams p = make_wave_params(m, 1.25, w.midpoint(), 0.0);
    const TrapConstants c = pick_trap_constants(m, p, 0.5);
    // d/dV of the lower budget vanishes at (4 - sqrt 7)/6
    CHECK(c.v_star_low ==
          doctest::Approx((4.0 - std::sqrt(7.0)) / 6.0).epsilon(1e-6));
    // d/dV of the upper budget vanishes at 7/6
    CHECK(c.v_star_high == doctest::Approx(7.0 / 6.0).epsilon(1e-6));
}

TEST_CASE("constants satisfy both strict chains across the window") {
    const ModelSpec m = canonical();
    const SpeedWindow w = speed_bounds(m, 1.25, Branch::Above);
    for (int k = 1; k <= 20; ++k) {
        const double s = w.s_lower + (w.s_upper - w.s_lower) * k / 21.0;
        const WaveParams p = make_wave_params(m, 1.25, s, 0.0);
        const TrapConstants c = pick_trap_constants(m, p, 0.5);

        CHECK(-std::sqrt(c.J_at_low) < c.w_low);
        CHECK(c.w_low < c.isocline_w_beta);
        CHECK(c.isocline_w_beta < 0.0);
        CHECK(0.0 < c.isocline_w_zero);
        CHECK(c.isocline_w_zero < c.w_high);
        CHECK(c.w_high < std::sqrt(c.Q_at_high));

        CHECK(c.w_low * c.w_low < c.J_at_low);
        CHECK(c.w_high * c.w_high < c.Q_at_high);

        // midpoint placement at margin 1/2 (lower edge; the upper edge top
        // may also be capped by the singular-line guard)
        CHECK(c.w_low == doctest::Approx(0.5 * (c.isocline_w_beta -
                                                std::sqrt(c.J_at_low))));
        CHECK(c.w_high <= 0.5 * (c.isocline_w_zero + std::sqrt(c.Q_at_high)) +
                              1e-12);
        CHECK(c.w_high > c.isocline_w_zero);
    }
}

TEST_CASE("constants become infeasible outside the window") {
    const ModelSpec m = canonical();
    const WaveParams p = make_wave_params(m, 1.25, 2.0, 0.0);  // above s2
    CHECK_THROWS_WITH_AS(pick_trap_constants(m, p, 0.5),
                         doctest::Contains("constants-infeasible"), Error);
}

TEST_CASE("saddle contraction beats the edge slope inside the window") {
    const ModelSpec m = canonical();
    const SpeedWindow w = speed_bounds(m, 1.25, Branch::Above);
    for (int k = 1; k <= 10; ++k) {
        const double s = w.s_lower + (w.s_upper - w.s_lower) * k / 11.0;
        const WaveParams p = make_wave_params(m, 1.25, s, 0.0);
        const TrapConstants c = pick_trap_constants(m, p, 0.5);
        const SaddleRate r = saddle_rate_bound(m, p, c);
        CHECK(r.ok);
        CHECK(r.bound < 0.0);
        CHECK(r.lambda2 < r.bound);
        // the contraction rate also dominates the infimum of g' past v*
        const double inf_gp = m.g_prime(c.v_star_high);
        CHECK(r.lambda2 * r.lambda2 > inf_gp);
    }
}

TEST_CASE("random tanh families keep the structural identities") {
    std::uint64_t seed = 314159;
    auto uni = [&]() {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        return static_cast<double>(seed >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 20; ++trial) {
        const double a = 0.5 + 1.5 * uni();
        const double b = 0.4 + 1.6 * uni();
        const double cc = 0.5 + uni();
        const double d = 0.3 + 2.0 * uni();
        const double beta = 0.5 + uni();
        const double chi = 0.5 + uni();
        const ModelSpec m = build_model("tanh-quadratic",
                                        {{"a", a},
                                         {"b", b},
                                         {"c", cc},
                                         {"d", d},
                                         {"beta", beta},
                                         {"chi", chi}});
        const double gb = m.g(beta), gs = m.g_star();
        const double u = gb + (0.2 + 0.6 * uni()) * (gs - gb);
        const Equilibria eq = resolve_states(m, u);
        CHECK(std::abs(m.g(eq.v_minus) - u) < 1e-9);
        CHECK(std::abs(m.g(eq.v_plus) - u) < 1e-9);

        const SpeedWindow w = speed_bounds(m, u, Branch::Above);
        if (w.empty()) continue;  // emptiness is a reportable outcome
        const WaveParams p = make_wave_params(m, u, w.midpoint(), 0.0);
        // identity of the slaved density on the isocline holds family-wide
        for (int i = 1; i <= 20; ++i) {
            const double v = eq.v_minus * i / 20.0;
            const double wi = isocline_w(m, p, v);
            CHECK(std::abs(slaved_u(m, p, wi) - m.g(v)) < 1e-9);
        }
        const TrapConstants c = pick_trap_constants(m, p, 0.5);
        CHECK(c.w_low * c.w_low < c.J_at_low);
        CHECK(c.w_high * c.w_high < c.Q_at_high);
    }
}

TEST_CASE("logistic-rational window is computable on both branches") {
    const ModelSpec m = build_model(
        "logistic-rational",
        {{"L", 1.0}, {"m", 0.5}, {"c", 1.0}, {"d", 1.0}, {"beta", 1.5}});
    const SpeedWindow wa = speed_bounds(m, 1.4, Branch::Above);
    CHECK(std::isfinite(wa.s_upper));
    CHECK(wa.s_lower == doctest::Approx(m.chi * m.phi(0.0)));
    const SpeedWindow wb = speed_bounds(m, 1.4, Branch::Below);
    CHECK(wb.s_upper == doctest::Approx(m.chi * m.phi(0.0)));
}
