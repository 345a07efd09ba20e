#include "ks/trap.hpp"

#include <cmath>
#include <fstream>

#include "ks/kernels.hpp"
#include "ks/phase_plane.hpp"

namespace ks {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

bool TrapRegion::contains(const Vec2& pt, double tol) const {
    // the hexagon is convex and ccw; inside means left of every edge
    const std::size_t n = corners.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = corners[i];
        const Vec2& b = corners[(i + 1) % n];
        const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        if (cross(a, b, pt) < -tol * len) return false;
    }
    return true;
}

int TrapRegion::winding_number(const Vec2& pt) const {
    int wn = 0;
    const std::size_t n = corners.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = corners[i];
        const Vec2& b = corners[(i + 1) % n];
        if (a[1] <= pt[1]) {
            if (b[1] > pt[1] && cross(a, b, pt) > 0.0) ++wn;
        } else {
            if (b[1] <= pt[1] && cross(a, b, pt) < 0.0) --wn;
        }
    }
    return wn;
}

TrapRegion build_trap(const ModelSpec& m, const WaveParams& p,
                      const TrapConstants& c) {
    (void)m;
    TrapRegion trap;
    trap.constants = c;
    trap.v_minus = p.v_minus;
    trap.v_plus = p.v_plus;
    trap.beta = m.beta;

    const double vl = c.v_star_low, vh = c.v_star_high;
    const double wl = c.w_low, wh = c.w_high;
    const double vm = p.v_minus;
    const double slope4 = -wh / (vm - vh);

    trap.corners = {{0.0, 0.0}, {vl, wl},        {vm, wl},
                    {vm, 0.0},  {vh, wh},        {0.0, wh}};
    // ccw check: the corner list above walks the lower boundary left to
    // right, then the upper boundary right to left

    auto line = [](Vec2 a, Vec2 b) {
        return [a, b](double t) -> Vec2 {
            return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
        };
    };

    trap.curves = {
        {"edge1", {wl / vl, -1.0}, 0.0, 1.0, line({0.0, 0.0}, {vl, wl})},
        {"edge2", {0.0, -1.0}, 0.0, 1.0, line({vl, wl}, {vm, wl})},
        {"edge3", {1.0, 0.0}, 0.0, 1.0, line({vm, wl}, {vm, 0.0})},
        {"edge4", {-slope4, 1.0}, 0.0, 1.0, line({vm, 0.0}, {vh, wh})},
        {"connector", {0.0, 1.0}, 0.0, 1.0, line({vh, wh}, {m.beta, wh})},
        {"edge5", {0.0, 1.0}, 0.0, 1.0, line({m.beta, wh}, {0.0, wh})},
        {"edge6", {-1.0, 0.0}, 0.0, 1.0, line({0.0, wh}, {0.0, 0.0})},
    };

    // walked closure: each piece must start where the previous one ended
    for (std::size_t i = 0; i < trap.curves.size(); ++i) {
        const Vec2 end = trap.curves[i].point(trap.curves[i].t1);
        const auto& next = trap.curves[(i + 1) % trap.curves.size()];
        const Vec2 start = next.point(next.t0);
        if (std::abs(end[0] - start[0]) > 1e-12 ||
            std::abs(end[1] - start[1]) > 1e-12)
            throw Error("geometry-mismatch",
                        "boundary pieces fail to close at " + next.name);
    }
    return trap;
}

namespace {

// Batched g(V) and slaved u(W) along a sampled piece; drops to the scalar
// model functions for custom families.
void eval_g(const ModelSpec& m, const std::vector<double>& v,
            std::vector<double>& out) {
    out.resize(v.size());
    const auto& k = kernels::ops();
    switch (m.kind) {
        case FamilyKind::TanhQuadratic:
            k.quad_g(m.fam[2], m.fam[3], m.fam[4], v.data(), out.data(), v.size());
            break;
        case FamilyKind::LogisticRational:
            k.ratquad_g(m.fam[2], m.fam[3], m.fam[4], v.data(), out.data(),
                        v.size());
            break;
        default:
            for (std::size_t i = 0; i < v.size(); ++i) out[i] = m.g(v[i]);
    }
}

void eval_slaved_u(const ModelSpec& m, const WaveParams& p,
                   const std::vector<double>& w, std::vector<double>& out) {
    out.resize(w.size());
    if (m.kind == FamilyKind::TanhQuadratic) {
        kernels::ops().tanhquad_slaved_u(m.fam[0], m.fam[1], m.chi, p.s,
                                         p.u_minus, w.data(), out.data(),
                                         w.size());
        // guard check after the batched evaluation
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (std::abs(m.chi * (m.fam[0] + std::tanh(m.fam[1] * w[i])) - p.s) <
                kSingularityGuard)
                throw Error("manifold-singularity",
                            "sample hit the manifold guard");
        }
    } else {
        for (std::size_t i = 0; i < w.size(); ++i)
            out[i] = slaved_u(m, p, w[i]);
    }
}

}  // namespace

FluxReport certify_flux(const ModelSpec& m, const WaveParams& p,
                        const TrapRegion& trap, int samples_per_curve,
                        double pass_tol) {
    FluxReport report;
    report.all_pass = true;
    report.worst_flux = -HUGE_VAL;
    report.worst_inflated = -HUGE_VAL;

    const int n = std::max(samples_per_curve, 8);
    std::vector<double> vs(n), ws(n), gs, us, flux(n), arclen(n);

    for (const TrapCurve& curve : trap.curves) {
        // Chebyshev parameters over the closed parameter range
        for (int i = 0; i < n; ++i) {
            const double theta = M_PI * i / (n - 1);
            const double t =
                curve.t0 + (curve.t1 - curve.t0) * 0.5 * (1.0 - std::cos(theta));
            const Vec2 pt = curve.point(t);
            vs[i] = pt[0];
            ws[i] = pt[1];
        }
        eval_g(m, vs, gs);
        eval_slaved_u(m, p, ws, us);

        CurveFlux cf;
        cf.name = curve.name;
        cf.samples = n;
        for (int i = 0; i < n; ++i) {
            // n . F with F = (W, -u(W) + g(V))
            flux[i] = curve.normal[0] * ws[i] +
                      curve.normal[1] * (gs[i] - us[i]);
        }
        arclen[0] = 0.0;
        for (int i = 1; i < n; ++i) {
            arclen[i] = arclen[i - 1] + std::hypot(vs[i] - vs[i - 1],
                                                   ws[i] - ws[i - 1]);
        }

        int arg = 0;
        double mx = flux[0];
        for (int i = 1; i < n; ++i) {
            if (flux[i] > mx) {
                mx = flux[i];
                arg = i;
            }
        }
        cf.max_flux = mx;
        cf.arg_t = curve.t0 + (curve.t1 - curve.t0) * 0.5 *
                                  (1.0 - std::cos(M_PI * arg / (n - 1)));
        cf.arg_point = {vs[arg], ws[arg]};

        // slope estimate along arclength, doubled as a safety factor
        double lip = 0.0;
        for (int i = 1; i < n; ++i) {
            const double ds = arclen[i] - arclen[i - 1];
            if (ds > 0.0)
                lip = std::max(lip, std::abs(flux[i] - flux[i - 1]) / ds);
        }
        cf.lipschitz = 2.0 * lip;

        double inflated = -HUGE_VAL;
        for (int i = 1; i < n; ++i) {
            const double gap = arclen[i] - arclen[i - 1];
            inflated = std::max(inflated, std::max(flux[i - 1], flux[i]) +
                                              0.5 * cf.lipschitz * gap);
        }
        cf.inflated_max = inflated;
        cf.pass = cf.max_flux <= pass_tol;

        report.worst_flux = std::max(report.worst_flux, cf.max_flux);
        report.worst_inflated = std::max(report.worst_inflated, cf.inflated_max);
        report.all_pass = report.all_pass && cf.pass;
        report.curves.push_back(cf);
    }
    return report;
}

void write_flux_csv(const ModelSpec& m, const WaveParams& p,
                    const TrapRegion& trap, int samples_per_curve,
                    const std::string& path) {
    std::ofstream out(path);
    out.precision(17);
    out << "curve,t,v,w,flux\n";
    const int n = std::max(samples_per_curve, 2);
    for (const TrapCurve& curve : trap.curves) {
        for (int i = 0; i < n; ++i) {
            const double t =
                curve.t0 + (curve.t1 - curve.t0) * i / (n - 1);
            const Vec2 pt = curve.point(t);
            const double flux =
                curve.normal[0] * pt[1] +
                curve.normal[1] * (m.g(pt[0]) - slaved_u(m, p, pt[1]));
            out << curve.name << ',' << t << ',' << pt[0] << ',' << pt[1]
                << ',' << flux << '\n';
        }
    }
}

bool corner_exclusion_check(const ModelSpec& m, const WaveParams& p,
                            const TrapRegion& trap) {
    const EquilibriumInfo saddle = classify_equilibrium(m, p, p.v_minus);
    const double lambda2 = saddle.lambda2.real();
    const double edge_slope = -trap.constants.w_high /
                              (p.v_minus - trap.constants.v_star_high);
    return lambda2 < edge_slope && edge_slope < 0.0;
}

}  // namespace ks
