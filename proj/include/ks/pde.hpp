// Method-of-lines simulation of the full system
//     u_t     = (eps u_x - chi u phi(v_x))_x
//     eps v_t = v_xx + u - g(v)
// on a truncated line. One step is IMEX: implicit treatment of both
// diffusions and of the stiff reaction (one Newton linearization of g),
// explicit minmod-limited upwind advection. The u update is in conservative
// flux form, so cell mass is exact up to solver roundoff.

#ifndef KS_PDE_HPP
#define KS_PDE_HPP

#include <functional>
#include <optional>
#include <vector>

#include "ks/orbit.hpp"

namespace ks {

enum class Boundary { Neumann, Periodic };

struct Grid1D {
    double x_min = 0.0, x_max = 1.0;
    int n = 64;
    Boundary boundary = Boundary::Neumann;
    double dx() const {
        return boundary == Boundary::Neumann ? (x_max - x_min) / (n - 1)
                                             : (x_max - x_min) / n;
    }
    double x(int i) const { return x_min + dx() * i; }
};

struct PDEState {
    std::vector<double> u, v;
    double t = 0.0;
};

// Optional manufactured source terms added to u_t and v_t.
struct Sources {
    std::function<double(double, double)> on_u;  // (x, t)
    std::function<double(double, double)> on_v;
};

struct StepStats {
    double cfl_dt = 0.0;      // advective stability bound 0.5 dx / max|a|
    bool cfl_warning = false; // dt exceeded the bound
    double min_u = 0.0;
};

StepStats step(const ModelSpec& m, const WaveParams& p, const Grid1D& grid,
               PDEState& state, double dt, const Sources* src = nullptr);

double mass_u(const Grid1D& grid, const PDEState& state);

// Width of the xi-range where the orbit deviates visibly (more than rel_tol
// of the pulse amplitude) from the tail equilibria; the launch and capture
// tails of a shot orbit are exponentially flat and do not count.
double visible_support(const WaveParams& p, const Orbit& orbit,
                       double rel_tol = 1e-3);

// Interpolates a slow orbit (U, V)(xi) onto the grid, centered at the domain
// midpoint, cubic Hermite with slopes from the governing field; tails extend
// by the equilibrium values. Throws "domain-too-short" when the domain is
// shorter than four visible pulse supports.
PDEState seed_pulse(const ModelSpec& m, const WaveParams& p, const Orbit& orbit,
                    const Grid1D& grid);

// Sub-grid pulse location: extremum of |u - background| with quadratic
// refinement, optionally restricted to [x_lo, x_hi] (tracking gate).
// Throws "peak-lost" when the deviation falls below 10% of background.
double peak_position(const Grid1D& grid, const std::vector<double>& u,
                     double background, double x_lo = -HUGE_VAL,
                     double x_hi = HUGE_VAL);

struct SpeedFit {
    double speed = 0.0;
    int frames = 0;
};

// Least-squares slope of peak position against time. Needs >= 10 frames.
SpeedFit track_speed(const std::vector<std::pair<double, double>>& t_and_pos);

struct GrowthFit {
    double rate = 0.0;
    double window_t0 = 0.0, window_t1 = 0.0;
    double max_norm = 0.0;
    bool ok = false;
};

// Twin-run probe: evolves the seeded state and a copy carrying a small
// smooth bump in v placed ahead of the pulse, and fits exponential growth of
// the sup-norm difference over the window where it sits between 2x and 20x
// the initial amplitude. Throws "no-linear-window" when no such window
// exists before the horizon.
GrowthFit growth_probe(const ModelSpec& m, const WaveParams& p,
                       const Grid1D& grid, const PDEState& seeded,
                       double amplitude, double horizon, double dt);

void write_frame_csv(const Grid1D& grid, const PDEState& state,
                     const std::string& path);

}  // namespace ks

#endif
