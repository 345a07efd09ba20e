// Orbit computation: adaptive embedded Runge-Kutta on the reduced plane,
// heteroclinic shooting from the saddle into the trapping region, the
// eps > 0 slow system with an exact exponential update for the fast cell
// density, and the continuation ladder measuring convergence of the slow
// orbits to the reduced connecting orbit.

#ifndef KS_ORBIT_HPP
#define KS_ORBIT_HPP

#include <optional>
#include <string>
#include <vector>

#include "ks/phase_plane.hpp"
#include "ks/trap.hpp"

namespace ks {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 1.0;
    double max_length = 1e4;   // cap on xi
    double event_tol = 1e-6;   // capture-ball radius
    // splitting control for the slow system (third-order local estimate)
    double split_rel_tol = 1e-12;
    double split_abs_tol = 1e-14;
    double initial_step = 0.0;  // 0 picks a heuristic
};

struct Orbit {
    std::vector<double> xi;      // strictly increasing
    std::vector<Vec3> states;    // rows (U, W, V); reduced orbits carry the
                                 // slaved U
    double terminal_residual = 0.0;
    bool captured = false;
    bool stayed_in_trap = false;
    std::string stop_reason;     // "captured" | "box-exit" | "length-exhausted"

    Vec3 back() const { return states.back(); }
    std::vector<Vec2> vw() const;  // (V, W) projection
};

struct BoxVW {
    double v_lo, v_hi, w_lo, w_hi;
    bool inside(double v, double w) const {
        return v >= v_lo && v <= v_hi && w >= w_lo && w <= w_hi;
    }
};

// Reduced flow from `start`; terminates on capture at `target` (defaults to
// the attractor (v_plus, 0)), on leaving `box`, or at max_length. The final
// step is bisected so a captured endpoint sits on the event sphere.
Orbit integrate_reduced(const ModelSpec& m, const WaveParams& p,
                        const ReducedState& start, const IntegratorConfig& cfg,
                        const std::optional<BoxVW>& box = std::nullopt,
                        const std::optional<Vec2>& target = std::nullopt);

// Launches from the saddle along its unstable direction, offset inward
// (negative W component), and integrates to capture at the attractor.
// Throws "escape" when a step leaves the trapping region and "no-capture"
// when max_length is exhausted first.
Orbit shoot_heteroclinic(const ModelSpec& m, const WaveParams& p,
                         const TrapRegion& trap, double offset,
                         const IntegratorConfig& cfg);

// Slow system at p.epsilon > 0:
//   eps U' = U (chi phi(W) - s) + s u_minus - chi u_minus phi(0)
//   W'     = -eps s W - U + g(V)
//   V'     = W
// The U equation is linear in U for frozen W and is advanced by its exact
// exponential over half steps around an embedded-pair step of (W, V); the
// step controller also bounds the splitting defect.
Orbit integrate_slow(const ModelSpec& m, const WaveParams& p,
                     const Vec3& start, const IntegratorConfig& cfg,
                     const std::optional<Vec3>& target = std::nullopt,
                     const std::optional<BoxVW>& box = std::nullopt);

// Unstable eigenpair of the slow-system linearization at the 3-D saddle
// (u_minus, 0, v_minus). Throws "no-unstable-direction" if the Jacobian has
// no positive real eigenvalue.
struct Unstable3 {
    double lambda;
    Vec3 direction;  // unit, W component negative
};
Unstable3 slow_saddle_unstable(const ModelSpec& m, const WaveParams& p);

// Shoots the slow system from the 3-D saddle (same inward convention).
Orbit shoot_slow(const ModelSpec& m, const WaveParams& p, double offset,
                 const IntegratorConfig& cfg);

struct Rung {
    double epsilon = 0.0;
    Orbit orbit;
    double distance_to_singular = 0.0;
    bool ok = false;
    std::string error;
};

// Walks the epsilon ladder (decreasing), shooting the slow system per rung
// and recording the (V, W) Hausdorff distance to the reduced orbit. A rung
// failure is recorded and the ladder continues. epsilon == 0 delegates to
// the reduced shot.
std::vector<Rung> continue_in_epsilon(const ModelSpec& m, const WaveParams& p,
                                      const std::vector<double>& ladder,
                                      const TrapRegion& trap, double offset,
                                      const IntegratorConfig& cfg,
                                      const Orbit& singular);

// Discrete Hausdorff distance between two polylines after arclength
// resampling; distances are point-to-segment, both directions.
std::vector<Vec2> resample_arclength(const std::vector<Vec2>& pts, int n);
double polyline_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                          int nodes = 512);

// Max of |U - slaved_u(W)| over samples with xi > xi_min.
double slow_manifold_defect(const ModelSpec& m, const WaveParams& p,
                            const Orbit& orbit, double xi_min);

void write_orbit_csv(const Orbit& orbit, const std::string& path);

}  // namespace ks

#endif
