#include "ks/pde.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ks/kernels.hpp"

namespace ks {

namespace {

// Thomas solve of tridiag(lower, diag, upper) x = rhs; arrays length n.
void tridiag_solve(std::vector<double>& lower, std::vector<double>& diag,
                   std::vector<double>& upper, std::vector<double>& rhs,
                   std::vector<double>& out) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    out.resize(n);
    out[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        out[i] = (rhs[i] - upper[i] * out[i + 1]) / diag[i];
    }
}

// Cyclic variant via Sherman-Morrison; corner couplings c_low (row 0 to
// x[n-1]) and c_up (row n-1 to x[0]).
void cyclic_solve(std::vector<double> lower, std::vector<double> diag,
                  std::vector<double> upper, double c_low, double c_up,
                  std::vector<double> rhs, std::vector<double>& out) {
    const std::size_t n = diag.size();
    const double gamma = -diag[0];
    diag[0] -= gamma;
    diag[n - 1] -= c_low * c_up / gamma;
    std::vector<double> d1 = diag, l1 = lower, u1 = upper, r1 = rhs;
    tridiag_solve(l1, d1, u1, r1, out);
    std::vector<double> uvec(n, 0.0);
    uvec[0] = gamma;
    uvec[n - 1] = c_up;
    d1 = diag;
    l1 = lower;
    u1 = upper;
    std::vector<double> z;
    tridiag_solve(l1, d1, u1, uvec, z);
    const double vy = out[0] + c_low / gamma * out[n - 1];
    const double vz = z[0] + c_low / gamma * z[n - 1];
    const double factor = vy / (1.0 + vz);
    for (std::size_t i = 0; i < n; ++i) out[i] -= factor * z[i];
}

void face_velocities(const ModelSpec& m, const WaveParams& p,
                     const Grid1D& grid, const std::vector<double>& v,
                     std::vector<double>& a_face) {
    const int n = grid.n;
    const double dx = grid.dx();
    const int n_face = grid.boundary == Boundary::Neumann ? n - 1 : n;
    static thread_local std::vector<double> vx;
    vx.resize(n_face);
    for (int i = 0; i < n_face; ++i) {
        const double vr = (i + 1 < n) ? v[i + 1] : v[0];
        vx[i] = (vr - v[i]) / dx;
    }
    a_face.resize(n_face);
    const auto& k = kernels::ops();
    switch (m.kind) {
        case FamilyKind::TanhQuadratic:
            k.tanhquad_phi(m.fam[0], m.fam[1], vx.data(), a_face.data(),
                           vx.size());
            break;
        case FamilyKind::LogisticRational:
            k.logistic_phi(m.fam[0], m.fam[1], vx.data(), a_face.data(),
                           vx.size());
            break;
        default:
            for (int i = 0; i < n_face; ++i) a_face[i] = m.phi(vx[i]);
    }
    for (int i = 0; i < n_face; ++i) a_face[i] *= m.chi;
    (void)p;
}

}  // namespace

StepStats step(const ModelSpec& m, const WaveParams& p, const Grid1D& grid,
               PDEState& state, double dt, const Sources* src) {
    const int n = grid.n;
    const double dx = grid.dx();
    const double eps = p.epsilon;
    if (!(eps > 0.0)) throw Error("bad-epsilon", "PDE step requires epsilon > 0");

    // --- explicit advection: minmod-limited upwind fluxes
    static thread_local std::vector<double> a_face, slope, flux, rhs, lower,
        diag, upper, u_new, v_new;
    face_velocities(m, p, grid, state.v, a_face);

    StepStats stats;
    double amax = 0.0;
    for (double a : a_face) amax = std::max(amax, std::abs(a));
    stats.cfl_dt = amax > 0.0 ? 0.5 * dx / amax : HUGE_VAL;
    stats.cfl_warning = dt > stats.cfl_dt;

    slope.resize(n);
    if (grid.boundary == Boundary::Neumann) {
        kernels::ops().minmod_slopes(state.u.data(), slope.data(), n);
    } else {
        auto mm = [](double a, double b) {
            return (a > 0 && b > 0) ? std::min(a, b)
                 : (a < 0 && b < 0) ? std::max(a, b)
                                    : 0.0;
        };
        for (int i = 0; i < n; ++i) {
            const double um = state.u[(i + n - 1) % n];
            const double up = state.u[(i + 1) % n];
            slope[i] = mm(state.u[i] - um, up - state.u[i]);
        }
    }

    const int n_face = grid.boundary == Boundary::Neumann ? n - 1 : n;
    flux.resize(n_face);
    if (grid.boundary == Boundary::Neumann) {
        kernels::ops().upwind_flux(a_face.data(), state.u.data(), slope.data(),
                                   flux.data(), n_face);
    } else {
        for (int i = 0; i < n_face; ++i) {
            const int r = (i + 1) % n;
            const double uf = a_face[i] >= 0.0 ? state.u[i] + 0.5 * slope[i]
                                               : state.u[r] - 0.5 * slope[r];
            flux[i] = a_face[i] * uf;
        }
    }

    // --- u update: conservative divergence, implicit diffusion
    rhs.resize(n);
    for (int i = 0; i < n; ++i) {
        double div;
        if (grid.boundary == Boundary::Neumann) {
            const double fr = i < n - 1 ? flux[i] : 0.0;  // zero-flux walls
            const double fl = i > 0 ? flux[i - 1] : 0.0;
            div = (fr - fl) / dx;
        } else {
            const double fr = flux[i];
            const double fl = flux[(i + n - 1) % n];
            div = (fr - fl) / dx;
        }
        rhs[i] = state.u[i] - dt * div;
        if (src && src->on_u) rhs[i] += dt * src->on_u(grid.x(i), state.t);
    }
    const double au = dt * eps / (dx * dx);
    lower.assign(n, -au);
    upper.assign(n, -au);
    diag.assign(n, 1.0 + 2.0 * au);
    if (grid.boundary == Boundary::Neumann) {
        diag[0] = 1.0 + au;
        diag[n - 1] = 1.0 + au;
        tridiag_solve(lower, diag, upper, rhs, u_new);
    } else {
        cyclic_solve(lower, diag, upper, -au, -au, rhs, u_new);
    }

    // --- v update: implicit diffusion + one Newton linearization of g
    const double av = dt / eps / (dx * dx);
    rhs.resize(n);
    lower.assign(n, -av);
    upper.assign(n, -av);
    diag.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double gp = m.g_prime(state.v[i]);
        diag[i] = 1.0 + 2.0 * av + dt / eps * gp;
        rhs[i] = state.v[i] +
                 dt / eps * (u_new[i] - m.g(state.v[i]) + gp * state.v[i]);
        if (src && src->on_v) rhs[i] += dt * src->on_v(grid.x(i), state.t);
    }
    if (grid.boundary == Boundary::Neumann) {
        diag[0] -= av;
        diag[n - 1] -= av;
        tridiag_solve(lower, diag, upper, rhs, v_new);
    } else {
        cyclic_solve(lower, diag, upper, -av, -av, rhs, v_new);
    }

    state.u.swap(u_new);
    state.v.swap(v_new);
    state.t += dt;
    stats.min_u = *std::min_element(state.u.begin(), state.u.end());
    return stats;
}

double mass_u(const Grid1D& grid, const PDEState& state) {
    double s = 0.0;
    for (double u : state.u) s += u;
    return s * grid.dx();
}

double visible_support(const WaveParams& p, const Orbit& orbit,
                       double rel_tol) {
    double amp = 0.0;
    for (const Vec3& st : orbit.states) {
        amp = std::max({amp, std::abs(st[0] - p.u_minus), std::abs(st[1])});
    }
    const double thresh = rel_tol * std::max(amp, 1e-12);
    double lo = orbit.xi.back(), hi = orbit.xi.front();
    for (std::size_t i = 0; i < orbit.xi.size(); ++i) {
        const Vec3& st = orbit.states[i];
        const double dev_minus = std::max({std::abs(st[0] - p.u_minus),
                                           std::abs(st[1]),
                                           std::abs(st[2] - p.v_minus)});
        const double dev_plus = std::max({std::abs(st[0] - p.u_minus),
                                          std::abs(st[1]),
                                          std::abs(st[2] - p.v_plus)});
        if (std::min(dev_minus, dev_plus) > thresh) {
            lo = std::min(lo, orbit.xi[i]);
            hi = std::max(hi, orbit.xi[i]);
        }
    }
    return std::max(hi - lo, 0.0);
}

PDEState seed_pulse(const ModelSpec& m, const WaveParams& p, const Orbit& orbit,
                    const Grid1D& grid) {
    if (orbit.xi.size() < 2)
        throw Error("profile-too-short", "orbit has fewer than 2 samples");
    const double xi0 = orbit.xi.front(), xi1 = orbit.xi.back();
    const double support = visible_support(p, orbit);
    if (grid.x_max - grid.x_min < 4.0 * support)
        throw Error("domain-too-short",
                    "domain must be at least 4 pulse supports long");

    const double x_mid = 0.5 * (grid.x_min + grid.x_max);
    const double xi_mid = 0.5 * (xi0 + xi1);
    const double eps = p.epsilon;
    const double c0 = p.s * p.u_minus - m.chi * p.u_minus * m.phi(0.0);

    auto u_slope = [&](const Vec3& st) {
        return ((m.chi * m.phi(st[1]) - p.s) * st[0] + c0) / eps;
    };

    PDEState out;
    out.t = 0.0;
    out.u.resize(grid.n);
    out.v.resize(grid.n);
    std::size_t j = 0;
    for (int i = 0; i < grid.n; ++i) {
        const double xi = grid.x(i) - x_mid + xi_mid;
        if (xi <= xi0) {
            out.u[i] = p.u_minus;
            out.v[i] = p.v_minus;
            continue;
        }
        if (xi >= xi1) {
            out.u[i] = p.u_minus;
            out.v[i] = p.v_plus;
            continue;
        }
        while (j + 2 < orbit.xi.size() && orbit.xi[j + 1] < xi) ++j;
        const double h = orbit.xi[j + 1] - orbit.xi[j];
        const double t = (xi - orbit.xi[j]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        const Vec3& sl = orbit.states[j];
        const Vec3& sr = orbit.states[j + 1];
        out.u[i] = h00 * sl[0] + h10 * h * u_slope(sl) + h01 * sr[0] +
                   h11 * h * u_slope(sr);
        // V' = W gives the exact slope for v
        out.v[i] = h00 * sl[2] + h10 * h * sl[1] + h01 * sr[2] + h11 * h * sr[1];
    }
    return out;
}

double peak_position(const Grid1D& grid, const std::vector<double>& u,
                     double background, double x_lo, double x_hi) {
    // The pulse is the extremum of the deviation from the far-field density;
    // for the canonical family it is a depression (the connecting orbit keeps
    // the signal slope nonpositive, so u = slaved_u(W) stays below u_minus).
    const int n = grid.n;
    int arg = -1;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        if (grid.x(i) < x_lo || grid.x(i) > x_hi) continue;
        const double dev = std::abs(u[i] - background);
        if (arg < 0 || dev > best) {
            best = dev;
            arg = i;
        }
    }
    if (arg < 0) throw Error("peak-lost", "empty tracking window");
    if (!(best >= 0.1 * background))
        throw Error("peak-lost", "pulse deviation below 10% of background");
    if (arg == 0 || arg == n - 1) return grid.x(arg);
    const double dm = std::abs(u[arg - 1] - background);
    const double dp = std::abs(u[arg + 1] - background);
    const double num = dm - dp;
    const double den = dm - 2.0 * best + dp;
    double shift = den != 0.0 ? 0.5 * num / den : 0.0;
    shift = std::clamp(shift, -0.5, 0.5);
    return grid.x(arg) + shift * grid.dx();
}

SpeedFit track_speed(const std::vector<std::pair<double, double>>& t_and_pos) {
    if (t_and_pos.size() < 10)
        throw Error("too-few-frames", "speed fit needs at least 10 frames");
    std::vector<double> t, x;
    for (const auto& [ti, xi] : t_and_pos) {
        t.push_back(ti);
        x.push_back(xi);
    }
    const auto [intercept, slope] = fit_line(t, x);
    (void)intercept;
    SpeedFit fit;
    fit.speed = slope;
    fit.frames = static_cast<int>(t_and_pos.size());
    return fit;
}

GrowthFit growth_probe(const ModelSpec& m, const WaveParams& p,
                       const Grid1D& grid, const PDEState& seeded,
                       double amplitude, double horizon, double dt) {
    PDEState ref = seeded;
    PDEState pert = seeded;

    // smooth bump ahead of the pulse, in the right tail
    const double x_peak = peak_position(grid, seeded.u, p.u_minus);

    const double x_bump = x_peak + 0.25 * (grid.x_max - x_peak);
    const double width = std::max(20.0 * grid.dx(), 1e-3);
    for (int i = 0; i < grid.n; ++i) {
        const double z = (grid.x(i) - x_bump) / width;
        pert.v[i] += amplitude * std::exp(-z * z);
    }

    std::vector<double> ts, log_norms;
    std::vector<std::pair<double, double>> trace;
    const double a0 = std::abs(amplitude);
    double max_norm = 0.0;
    double t0 = -1.0, t1 = -1.0;
    const int n_steps = static_cast<int>(std::ceil(horizon / dt));
    for (int s_i = 0; s_i < n_steps; ++s_i) {
        step(m, p, grid, ref, dt);
        step(m, p, grid, pert, dt);
        double nrm = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            nrm = std::max(nrm, std::abs(pert.u[i] - ref.u[i]));
            nrm = std::max(nrm, std::abs(pert.v[i] - ref.v[i]));
        }
        max_norm = std::max(max_norm, nrm);
        trace.emplace_back(ref.t, nrm);
        if (a0 > 0.0 && nrm >= 2.0 * a0 && t0 < 0.0) t0 = ref.t;
        if (a0 > 0.0 && nrm >= 20.0 * a0 && t1 < 0.0) {
            t1 = ref.t;
            break;
        }
    }
    if (a0 <= 0.0 || max_norm <= 1e-14 || t0 < 0.0)
        throw Error("no-linear-window",
                    "perturbation never reached 2x its initial amplitude");
    if (t1 < 0.0) t1 = trace.back().first;

    for (const auto& [tt, nn] : trace) {
        if (tt >= t0 && tt <= t1 && nn > 0.0) {
            ts.push_back(tt);
            log_norms.push_back(std::log(nn));
        }
    }
    if (ts.size() < 5)
        throw Error("no-linear-window", "too few samples inside the 2x-20x window");

    const auto [intercept, slope] = fit_line(ts, log_norms);
    (void)intercept;
    GrowthFit fit;
    fit.rate = slope;
    fit.window_t0 = t0;
    fit.window_t1 = t1;
    fit.max_norm = max_norm;
    fit.ok = true;
    return fit;
}

void write_frame_csv(const Grid1D& grid, const PDEState& state,
                     const std::string& path) {
    std::ofstream f(path);
    f.precision(17);
    f << "x,u,v\n";
    for (int i = 0; i < grid.n; ++i)
        f << grid.x(i) << ',' << state.u[i] << ',' << state.v[i] << '\n';
}

}  // namespace ks
