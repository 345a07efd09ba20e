#include "ks/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ks/phase_plane.hpp"
#include "ks/rk.hpp"

namespace ks {

std::vector<Vec2> Orbit::vw() const {
    std::vector<Vec2> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
        out[i] = {states[i][2], states[i][1]};
    return out;
}

namespace {

double initial_step_heuristic(double ynorm, double fnorm, double max_step) {
    const double h = 1e-3 * (1.0 + ynorm) / (1.0 + fnorm);
    return std::clamp(h, 1e-10, max_step);
}

}  // namespace

// ---------------------------------------------------------------------------
// reduced flow

namespace {

struct ReducedField {
    const ModelSpec* m;
    const WaveParams* p;
    Vec2 operator()(double, const Vec2& y) const {
        return {y[1], -slaved_u(*m, *p, y[1]) + m->g(y[0])};
    }
};

}  // namespace

Orbit integrate_reduced(const ModelSpec& m, const WaveParams& p,
                        const ReducedState& start, const IntegratorConfig& cfg,
                        const std::optional<BoxVW>& box,
                        const std::optional<Vec2>& target) {
    const Vec2 tgt = target.value_or(Vec2{p.v_plus, 0.0});
    const double capture_r = 0.9 * cfg.event_tol;  // margin inside the ball
    const ReducedField f{&m, &p};

    Orbit orbit;
    orbit.stayed_in_trap = true;
    auto push = [&](double xi, const Vec2& y) {
        orbit.xi.push_back(xi);
        orbit.states.push_back({slaved_u(m, p, y[1]), y[1], y[0]});
    };

    Vec2 y = start;
    double xi = 0.0;
    push(xi, y);
    if (norm2(y - tgt) < capture_r) {
        orbit.captured = true;
        orbit.terminal_residual = norm2(y - tgt);
        orbit.stop_reason = "captured";
        return orbit;
    }

    Vec2 k1 = f(xi, y);
    double h = cfg.initial_step > 0.0
                   ? cfg.initial_step
                   : initial_step_heuristic(norm2(y), norm2(k1), cfg.max_step);

    while (xi < cfg.max_length) {
        h = std::min({h, cfg.max_step, cfg.max_length - xi + 1e-30});
        if (h < 1e-14 * std::max(1.0, std::abs(xi)))
            throw Error("step-underflow", "reduced step size collapsed");
        auto st = rk::dp5_step<2>(f, xi, y, k1, h, cfg.abs_tol,
                                            cfg.rel_tol);
        if (st.err_ratio > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(st.err_ratio, -0.2));
            continue;
        }
        // event: capture ball around the target
        if (norm2(st.y - tgt) < capture_r) {
            double lo = 0.0, hi = h;
            Vec2 y_hi = st.y;
            for (int it = 0; it < 60 && (hi - lo) > 1e-16 * std::max(1.0, hi);
                 ++it) {
                const double mid = 0.5 * (lo + hi);
                auto sm = rk::dp5_step<2>(f, xi, y, k1, mid,
                                                    cfg.abs_tol, cfg.rel_tol);
                if (norm2(sm.y - tgt) < capture_r) {
                    hi = mid;
                    y_hi = sm.y;
                } else {
                    lo = mid;
                }
            }
            xi += hi;
            y = y_hi;
            push(xi, y);
            orbit.captured = true;
            orbit.terminal_residual = norm2(y - tgt);
            orbit.stop_reason = "captured";
            return orbit;
        }
        xi += h;
        y = st.y;
        k1 = st.k_last;
        push(xi, y);
        if (box && !box->inside(y[0], y[1])) {
            orbit.stop_reason = "box-exit";
            orbit.terminal_residual = norm2(y - tgt);
            return orbit;
        }
        h *= std::clamp(0.9 * std::pow(std::max(st.err_ratio, 1e-10), -0.2),
                        0.2, 5.0);
    }
    orbit.stop_reason = "length-exhausted";
    orbit.terminal_residual = norm2(y - tgt);
    return orbit;
}

Orbit shoot_heteroclinic(const ModelSpec& m, const WaveParams& p,
                         const TrapRegion& trap, double offset,
                         const IntegratorConfig& cfg) {
    const EquilibriumInfo saddle = classify_equilibrium(m, p, p.v_minus);
    if (saddle.cls != EquilibriumClass::Saddle)
        throw Error("no-saddle", "equilibrium at v_minus is not a saddle");

    Vec2 dir{1.0, saddle.lambda1.real()};
    const double nrm = norm2(dir);
    dir = {dir[0] / nrm, dir[1] / nrm};
    if (dir[1] > 0.0) dir = {-dir[0], -dir[1]};  // step into W < 0

    const Vec2 start{p.v_minus + offset * dir[0], offset * dir[1]};
    const Vec2 tgt{p.v_plus, 0.0};
    const double capture_r = 0.9 * cfg.event_tol;
    const ReducedField f{&m, &p};

    Orbit orbit;
    orbit.stayed_in_trap = true;
    auto push = [&](double xi, const Vec2& y) {
        orbit.xi.push_back(xi);
        orbit.states.push_back({slaved_u(m, p, y[1]), y[1], y[0]});
    };

    Vec2 y = start;
    double xi = 0.0;
    if (!trap.contains({y[0], y[1]}))
        throw Error("escape", "launch point lies outside the trapping region");
    push(xi, y);

    Vec2 k1 = f(xi, y);
    double h = cfg.initial_step > 0.0
                   ? cfg.initial_step
                   : initial_step_heuristic(norm2(y), norm2(k1), cfg.max_step);

    while (xi < cfg.max_length) {
        h = std::min(h, cfg.max_step);
        if (h < 1e-14 * std::max(1.0, std::abs(xi)))
            throw Error("step-underflow", "shooting step size collapsed");
        auto st =
            rk::dp5_step<2>(f, xi, y, k1, h, cfg.abs_tol, cfg.rel_tol);
        if (st.err_ratio > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(st.err_ratio, -0.2));
            continue;
        }
        if (norm2(st.y - tgt) < capture_r) {
            double lo = 0.0, hi = h;
            Vec2 y_hi = st.y;
            for (int it = 0; it < 60 && (hi - lo) > 1e-16 * std::max(1.0, hi);
                 ++it) {
                const double mid = 0.5 * (lo + hi);
                auto sm = rk::dp5_step<2>(f, xi, y, k1, mid,
                                                    cfg.abs_tol, cfg.rel_tol);
                if (norm2(sm.y - tgt) < capture_r) {
                    hi = mid;
                    y_hi = sm.y;
                } else {
                    lo = mid;
                }
            }
            xi += hi;
            y = y_hi;
            push(xi, y);
            orbit.captured = true;
            orbit.terminal_residual = norm2(y - tgt);
            orbit.stop_reason = "captured";
            return orbit;
        }
        xi += h;
        y = st.y;
        k1 = st.k_last;
        if (!trap.contains({y[0], y[1]}))
            throw Error("escape", "orbit left the trapping region at xi=" +
                                      std::to_string(xi));
        push(xi, y);
        h *= std::clamp(0.9 * std::pow(std::max(st.err_ratio, 1e-10), -0.2),
                        0.2, 5.0);
    }
    throw Error("no-capture", "integration length exhausted before capture");
}

// ---------------------------------------------------------------------------
// slow system

namespace {

struct PairField {
    const ModelSpec* m;
    const WaveParams* p;
    double u_frozen;
    Vec2 operator()(double, const Vec2& y) const {
        // y = (W, V)
        return {-p->epsilon * p->s * y[0] - u_frozen + m->g(y[1]), y[0]};
    }
};

struct SlowStepOut {
    Vec3 y;            // (U, W, V)
    double err_ratio;  // max of pair error and splitting defect ratios
    bool split_bound;  // which term dominated
};

// One Strang step: exact exponential on U over h/2 with W frozen, embedded
// pair on (W, V) with U frozen, exponential on U over the second half.
SlowStepOut slow_step(const ModelSpec& m, const WaveParams& p, const Vec3& y,
                      double h, const IntegratorConfig& cfg) {
    const double eps = p.epsilon;
    auto alpha = [&](double W) {
        const double a = m.chi * m.phi(W) - p.s;
        if (std::abs(a) < kSingularityGuard)
            throw Error("manifold-singularity", "slow step hit the manifold guard");
        return a;
    };
    auto slaved = [&](double a) {
        return p.u_minus * (m.chi * m.phi(0.0) - p.s) / a;
    };

    const double a0 = alpha(y[1]);
    const double hw0 = slaved(a0);
    const double u_half = hw0 + (y[0] - hw0) * std::exp(a0 * h / (2.0 * eps));

    PairField f{&m, &p, u_half};
    const Vec2 wv{y[1], y[2]};
    const Vec2 k1 = f(0.0, wv);
    auto st = rk::dp5_step<2>(f, 0.0, wv, k1, h, cfg.abs_tol, cfg.rel_tol);

    const double a1 = alpha(st.y[0]);
    const double hw1 = slaved(a1);
    const double u_new = hw1 + (u_half - hw1) * std::exp(a1 * h / (2.0 * eps));

    // splitting defect: third-order estimate from the curvature of the
    // slaved value across the step
    const double w_mid = 0.5 * (y[1] + st.y[0]);
    const double hw_mid = slaved(alpha(w_mid));
    const double defect = std::abs(hw1 - 2.0 * hw_mid + hw0) * h / 12.0;
    const double sc = cfg.split_abs_tol + cfg.split_rel_tol * std::abs(u_new);
    const double split_ratio = defect / sc;

    SlowStepOut out;
    out.y = {u_new, st.y[0], st.y[1]};
    out.split_bound = split_ratio > st.err_ratio;
    out.err_ratio = std::max(st.err_ratio, split_ratio);
    return out;
}

}  // namespace

Orbit integrate_slow(const ModelSpec& m, const WaveParams& p, const Vec3& start,
                     const IntegratorConfig& cfg,
                     const std::optional<Vec3>& target,
                     const std::optional<BoxVW>& box) {
    if (!(p.epsilon > 0.0))
        throw Error("bad-epsilon", "integrate_slow requires epsilon > 0");
    const Vec3 tgt = target.value_or(Vec3{p.u_minus, 0.0, p.v_plus});
    const double capture_r = 0.9 * cfg.event_tol;

    Orbit orbit;
    orbit.stayed_in_trap = true;
    Vec3 y = start;
    double xi = 0.0;
    orbit.xi.push_back(xi);
    orbit.states.push_back(y);
    if (norm2(y - tgt) < capture_r) {
        orbit.captured = true;
        orbit.terminal_residual = norm2(y - tgt);
        orbit.stop_reason = "captured";
        return orbit;
    }

    double h = cfg.initial_step > 0.0 ? cfg.initial_step
                                      : std::min(cfg.max_step, p.epsilon);

    while (xi < cfg.max_length) {
        h = std::min(h, cfg.max_step);
        if (h < 1e-15 * std::max(1.0, std::abs(xi)))
            throw Error("step-underflow",
                        "slow step size collapsed at xi=" + std::to_string(xi));
        SlowStepOut st = slow_step(m, p, y, h, cfg);
        if (st.err_ratio > 1.0) {
            const double expo = st.split_bound ? -1.0 / 3.0 : -0.2;
            h *= std::max(0.2, 0.9 * std::pow(st.err_ratio, expo));
            continue;
        }
        if (norm2(st.y - tgt) < capture_r) {
            double lo = 0.0, hi = h;
            Vec3 y_hi = st.y;
            for (int it = 0; it < 60 && (hi - lo) > 1e-16 * std::max(1.0, hi);
                 ++it) {
                const double mid = 0.5 * (lo + hi);
                SlowStepOut sm = slow_step(m, p, y, mid, cfg);
                if (norm2(sm.y - tgt) < capture_r) {
                    hi = mid;
                    y_hi = sm.y;
                } else {
                    lo = mid;
                }
            }
            xi += hi;
            y = y_hi;
            orbit.xi.push_back(xi);
            orbit.states.push_back(y);
            orbit.captured = true;
            orbit.terminal_residual = norm2(y - tgt);
            orbit.stop_reason = "captured";
            return orbit;
        }
        xi += h;
        y = st.y;
        orbit.xi.push_back(xi);
        orbit.states.push_back(y);
        if (box && !box->inside(y[2], y[1])) {
            orbit.stop_reason = "box-exit";
            orbit.terminal_residual = norm2(y - tgt);
            return orbit;
        }
        const double expo = st.split_bound ? -1.0 / 3.0 : -0.2;
        h *= std::clamp(0.9 * std::pow(std::max(st.err_ratio, 1e-10), expo),
                        0.2, 5.0);
    }
    orbit.stop_reason = "length-exhausted";
    orbit.terminal_residual = norm2(y - tgt);
    return orbit;
}

Unstable3 slow_saddle_unstable(const ModelSpec& m, const WaveParams& p) {
    const double eps = p.epsilon;
    const double a0 = m.chi * m.phi(0.0) - p.s;
    // rows of the Jacobian at (u_minus, 0, v_minus), variables (U, W, V)
    const double J[3][3] = {
        {a0 / eps, m.chi * p.u_minus * m.phi_prime(0.0) / eps, 0.0},
        {-1.0, -eps * p.s, m.g_prime(p.v_minus)},
        {0.0, 1.0, 0.0},
    };

    // characteristic cubic: lambda^3 + c2 lambda^2 + c1 lambda + c0
    const double tr = J[0][0] + J[1][1] + J[2][2];
    const double m2 = (J[0][0] * J[1][1] - J[0][1] * J[1][0]) +
                      (J[0][0] * J[2][2] - J[0][2] * J[2][0]) +
                      (J[1][1] * J[2][2] - J[1][2] * J[2][1]);
    const double det =
        J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
        J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
        J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    const double c2 = -tr, c1 = m2, c0 = -det;

    // depressed cubic t^3 + pt + q, lambda = t - c2/3
    const double shift = c2 / 3.0;
    const double pc = c1 - c2 * c2 / 3.0;
    const double qc = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    std::vector<double> roots;
    const double disc = qc * qc / 4.0 + pc * pc * pc / 27.0;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-qc / 2.0 + sq);
        const double v = std::cbrt(-qc / 2.0 - sq);
        roots.push_back(u + v - shift);
    } else {
        const double r = std::sqrt(-pc * pc * pc / 27.0);
        const double phi = std::acos(std::clamp(-qc / (2.0 * r), -1.0, 1.0));
        const double mag = 2.0 * std::sqrt(-pc / 3.0);
        for (int k = 0; k < 3; ++k)
            roots.push_back(mag * std::cos((phi + 2.0 * M_PI * k) / 3.0) - shift);
    }
    // Newton polish on the original cubic
    auto poly = [&](double x) { return ((x + c2) * x + c1) * x + c0; };
    auto dpoly = [&](double x) { return (3.0 * x + 2.0 * c2) * x + c1; };
    double best = -HUGE_VAL;
    for (double r : roots) {
        for (int it = 0; it < 50; ++it) {
            const double d = dpoly(r);
            if (d == 0.0) break;
            const double step = poly(r) / d;
            r -= step;
            if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(r))) break;
        }
        best = std::max(best, r);
    }
    if (!(best > 0.0))
        throw Error("no-unstable-direction",
                    "slow saddle has no positive real eigenvalue");

    // null space of (J - lambda I) via the largest cross product of rows
    double A[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A[i][j] = J[i][j] - (i == j ? best : 0.0);
    auto crossrows = [&](int i, int j) {
        return Vec3{A[i][1] * A[j][2] - A[i][2] * A[j][1],
                    A[i][2] * A[j][0] - A[i][0] * A[j][2],
                    A[i][0] * A[j][1] - A[i][1] * A[j][0]};
    };
    Vec3 v01 = crossrows(0, 1), v02 = crossrows(0, 2), v12 = crossrows(1, 2);
    Vec3 v = v01;
    if (norm2(v02) > norm2(v)) v = v02;
    if (norm2(v12) > norm2(v)) v = v12;
    const double nv = norm2(v);
    if (!(nv > 0.0))
        throw Error("no-unstable-direction", "degenerate eigenvector");
    for (auto& c : v) c /= nv;
    if (v[1] > 0.0)
        for (auto& c : v) c = -c;
    return {best, v};
}

Orbit shoot_slow(const ModelSpec& m, const WaveParams& p, double offset,
                 const IntegratorConfig& cfg) {
    const Unstable3 u = slow_saddle_unstable(m, p);
    Vec3 start{p.u_minus + offset * u.direction[0], offset * u.direction[1],
               p.v_minus + offset * u.direction[2]};
    Orbit orbit = integrate_slow(m, p, start, cfg);
    if (!orbit.captured)
        throw Error("no-capture", "slow shot failed to capture (" +
                                      orbit.stop_reason + ")");
    return orbit;
}

std::vector<Rung> continue_in_epsilon(const ModelSpec& m, const WaveParams& p,
                                      const std::vector<double>& ladder,
                                      const TrapRegion& trap, double offset,
                                      const IntegratorConfig& cfg,
                                      const Orbit& singular) {
    std::vector<Rung> rungs;
    double warm_h = 0.0;
    for (double eps : ladder) {
        Rung rung;
        rung.epsilon = eps;
        try {
            if (eps == 0.0) {
                rung.orbit = shoot_heteroclinic(m, p, trap, offset, cfg);
            } else {
                WaveParams pe = p;
                pe.epsilon = eps;
                IntegratorConfig c = cfg;
                if (warm_h > 0.0) c.initial_step = warm_h;
                rung.orbit = shoot_slow(m, pe, offset, c);
                if (rung.orbit.xi.size() > 2)
                    warm_h = rung.orbit.xi[1] - rung.orbit.xi[0];
            }
            rung.distance_to_singular =
                polyline_hausdorff(rung.orbit.vw(), singular.vw());
            rung.ok = true;
        } catch (const Error& e) {
            rung.ok = false;
            rung.error = e.code();
        }
        rungs.push_back(std::move(rung));
    }
    return rungs;
}

std::vector<Vec2> resample_arclength(const std::vector<Vec2>& pts, int n) {
    if (pts.size() < 2 || n < 2) return pts;
    std::vector<double> s(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i)
        s[i] = s[i - 1] + norm2(pts[i] - pts[i - 1]);
    const double total = s.back();
    std::vector<Vec2> out(n);
    std::size_t j = 0;
    for (int i = 0; i < n; ++i) {
        const double si = total * i / (n - 1);
        while (j + 2 < s.size() && s[j + 1] < si) ++j;
        const double seg = s[j + 1] - s[j];
        const double t = seg > 0.0 ? (si - s[j]) / seg : 0.0;
        out[i] = {pts[j][0] + t * (pts[j + 1][0] - pts[j][0]),
                  pts[j][1] + t * (pts[j + 1][1] - pts[j][1])};
    }
    return out;
}

namespace {

double point_to_polyline(const Vec2& pt, const std::vector<Vec2>& poly) {
    double best = HUGE_VAL;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[i + 1];
        const double vx = b[0] - a[0], vy = b[1] - a[1];
        const double wx = pt[0] - a[0], wy = pt[1] - a[1];
        const double vv = vx * vx + vy * vy;
        double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double dx = pt[0] - (a[0] + t * vx);
        const double dy = pt[1] - (a[1] + t * vy);
        best = std::min(best, dx * dx + dy * dy);
    }
    return std::sqrt(best);
}

}  // namespace

double polyline_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                          int nodes) {
    const std::vector<Vec2> ra = resample_arclength(a, nodes);
    const std::vector<Vec2> rb = resample_arclength(b, nodes);
    double d = 0.0;
    for (const Vec2& pt : ra) d = std::max(d, point_to_polyline(pt, rb));
    for (const Vec2& pt : rb) d = std::max(d, point_to_polyline(pt, ra));
    return d;
}

double slow_manifold_defect(const ModelSpec& m, const WaveParams& p,
                            const Orbit& orbit, double xi_min) {
    double worst = 0.0;
    for (std::size_t i = 0; i < orbit.xi.size(); ++i) {
        if (orbit.xi[i] <= xi_min) continue;
        const double u_manifold = slaved_u(m, p, orbit.states[i][1]);
        worst = std::max(worst, std::abs(orbit.states[i][0] - u_manifold));
    }
    return worst;
}

void write_orbit_csv(const Orbit& orbit, const std::string& path) {
    std::ofstream out(path);
    out.precision(17);
    out << "xi,U,W,V\n";
    for (std::size_t i = 0; i < orbit.xi.size(); ++i) {
        out << orbit.xi[i] << ',' << orbit.states[i][0] << ','
            << orbit.states[i][1] << ',' << orbit.states[i][2] << '\n';
    }
}

}  // namespace ks
