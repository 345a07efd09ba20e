// Model functions: family construction, pulse-state resolution, the slaved
// density on the critical manifold, and the isocline identities.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ks/model.hpp"

using namespace ks;

namespace {

ModelSpec canonical() { return build_model("tanh-quadratic", {}); }

WaveParams canonical_wave(double s = 2.0, double eps = 0.0) {
    const ModelSpec m = canonical();
    return make_wave_params(m, 1.25, s, eps);
}

}  // namespace

TEST_CASE("tanh-quadratic family caches the right constants") {
    const ModelSpec m = canonical();
    CHECK(m.beta == 1.0);
    CHECK(m.g_at_zero == 2.0);
    CHECK(std::isinf(m.g_infinity));
    CHECK(m.g_star() == 2.0);
    CHECK(m.phi(0.0) == 1.0);
    CHECK(m.phi_prime(0.0) == doctest::Approx(1.0));
}

TEST_CASE("decreasing sensitivity is rejected") {
    ModelSpec m = canonical();
    m.phi = [](double w) { return 1.0 - w; };
    m.phi_prime = [](double) { return -1.0; };
    CHECK_THROWS_WITH_AS(validate_model(m), doctest::Contains("phi'"), Error);
}

TEST_CASE("derivative mismatch with finite differences is rejected") {
    ModelSpec m = canonical();
    m.g_prime = [](double v) { return 3.0 * (v - 1.0); };  // wrong factor
    CHECK_THROWS_AS(validate_model(m), Error);
}

TEST_CASE("logistic-rational family has a finite tail limit") {
    const ModelSpec m = build_model(
        "logistic-rational",
        {{"L", 1.0}, {"m", 0.5}, {"c", 1.0}, {"d", 1.0}, {"beta", 1.5}});
    CHECK(m.g_infinity == doctest::Approx(2.0));  // c + d
    CHECK(m.g_at_zero == doctest::Approx(1.0 + 2.25 / 1.0));
    CHECK(m.g_star() == doctest::Approx(2.0));

    // two-state regime with the finite branch active
    const Equilibria eq = resolve_states(m, 1.4);
    CHECK(eq.v_plus < m.beta);
    CHECK(eq.v_minus > m.beta);
    CHECK(std::abs(m.g(eq.v_plus) - 1.4) < 1e-10);
    CHECK(std::abs(m.g(eq.v_minus) - 1.4) < 1e-10);
}

TEST_CASE("state resolution: canonical closed-form roots") {
    const ModelSpec m = canonical();
    const Equilibria eq = resolve_states(m, 1.25);
    // g(v) = 1 + (v-1)^2 = 1.25 has roots 1 +- 1/2
    CHECK(std::abs(eq.v_minus - 1.5) < 1e-10);
    CHECK(std::abs(eq.v_plus - 0.5) < 1e-10);
}

TEST_CASE("state resolution rejects the boundary and outside regimes") {
    const ModelSpec m = canonical();
    CHECK_THROWS_WITH_AS(resolve_states(m, 1.0), doctest::Contains("strictly"),
                         Error);  // u = g(beta)
    CHECK_THROWS_AS(resolve_states(m, 2.0), Error);  // u = g(0) = g*
    CHECK_THROWS_AS(resolve_states(m, 0.5), Error);
    CHECK_THROWS_AS(resolve_states(m, 3.0), Error);
}

TEST_CASE("front branch s = chi phi(0) is rejected") {
    const ModelSpec m = canonical();
    CHECK_THROWS_AS(make_wave_params(m, 1.25, 1.0, 0.0), Error);
}

TEST_CASE("slaved density anchors") {
    const ModelSpec m = canonical();
    const WaveParams p = canonical_wave();

    CHECK(slaved_u(m, p, 0.0) == doctest::Approx(1.25).epsilon(1e-14));

    // independent long-double evaluation of the closed form at W = -1/2
    const long double phi_w = 1.0L + std::tanh(-0.5L);
    const long double expect = 1.25L * (1.0L - 2.0L) / (phi_w - 2.0L);
    CHECK(slaved_u(m, p, -0.5) ==
          doctest::Approx(static_cast<double>(expect)).epsilon(1e-14));

    // derivative at 0: -u chi phi'(0)(chi phi0 - s)/(chi phi0 - s)^2
    CHECK(slaved_u_dw(m, p, 0.0) == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("slaved density trips the singularity guard") {
    const ModelSpec m = canonical();
    const WaveParams p = canonical_wave();
    // phi(W) -> 2 = s/chi as W grows; tanh(12) is within 1e-8 of 1
    CHECK_THROWS_WITH_AS(slaved_u(m, p, 12.0),
                         doctest::Contains("manifold-singularity"), Error);
}

TEST_CASE("slaved density is strictly increasing in W") {
    const ModelSpec m = canonical();
    const WaveParams p = canonical_wave();
    double prev = slaved_u(m, p, -3.0);
    for (int i = 1; i <= 120; ++i) {
        const double w = -3.0 + 6.0 * i / 120.0;
        const double cur = slaved_u(m, p, w);
        CHECK(cur > prev);
        CHECK(slaved_u_dw(m, p, w) > 0.0);
        prev = cur;
    }
}

TEST_CASE("slaved derivative matches finite differences") {
    const ModelSpec m = canonical();
    const WaveParams p = canonical_wave();
    for (double w : {-1.5, -0.3, 0.0, 0.4, 2.0}) {
        const double d = 1e-6;
        const double fd =
            (slaved_u(m, p, w + d) - slaved_u(m, p, w - d)) / (2 * d);
        CHECK(fd == doctest::Approx(slaved_u_dw(m, p, w)).epsilon(1e-8));
    }
}

TEST_CASE("isocline level anchors") {
    const ModelSpec m = canonical();
    const WaveParams p = canonical_wave();

    // at the minimum of g: s/chi + u/g(beta) (phi0 - s/chi) = 2 + 1.25(-1)
    CHECK(isocline_level(m, p, 1.0) == doctest::Approx(0.75).epsilon(1e-14));

    // pinned to phi(0) at both pulse states
    CHECK(isocline_level(m, p, p.v_minus) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(isocline_level(m, p, p.v_plus) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(isocline_w(m, p, p.v_minus)) < 1e-10);
    CHECK(std::abs(isocline_w(m, p, p.v_plus)) < 1e-10);
}

TEST_CASE("slaved density on the isocline reproduces g") {
    const ModelSpec m = canonical();
    const WaveParams p = canonical_wave();
    for (int i = 1; i <= 200; ++i) {
        const double v = p.v_minus * i / 200.0;
        const double w = isocline_w(m, p, v);
        CHECK(std::abs(slaved_u(m, p, w) - m.g(v)) < 1e-10);
    }
}

TEST_CASE("isocline slope carries the sign of g'") {
    const ModelSpec m = canonical();
    const WaveParams p = canonical_wave();
    const double d = 1e-6;
    for (double v : {0.2, 0.6, 0.9, 1.1, 1.4, 1.8}) {
        const double fd =
            (isocline_level(m, p, v + d) - isocline_level(m, p, v - d)) /
            (2 * d);
        CHECK(fd * m.g_prime(v) > 0.0);
    }
}

TEST_CASE("phi inverse round trip") {
    const ModelSpec m = canonical();
    for (double w : {-4.0, -1.0, -0.1, 0.0, 0.3, 2.5}) {
        CHECK(m.phi_inverse(m.phi(w)) == doctest::Approx(w).epsilon(1e-9));
    }
}

TEST_CASE("unknown family is rejected") {
    CHECK_THROWS_AS(build_model("cubic-spline", {}), Error);
}
