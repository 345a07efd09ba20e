// Trapping region for the reduced flow and the inward-flux certification.
//
// The region is a convex hexagon in the (V, W) plane built from the four
// constants of pick_trap_constants. Boundary pieces, walked counterclockwise
// from the origin:
//   edge1  W = (w_low/v_star_low) V            0 <= V <= v_star_low
//   edge2  W = w_low                            v_star_low <= V <= v_minus
//   edge3  V = v_minus                          w_low <= W <= 0
//   edge4  W = -(w_high/(v_minus-v_star_high)) (V - v_minus)
//                                               v_star_high <= V <= v_minus
//   edge5  W = w_high                           0 <= V <= beta
//   edge6  V = 0                                0 <= W <= w_high
// The flat stretch W = w_high between V = beta and V = v_star_high is kept
// as an explicit connector piece and certified with the same inequality as
// edge5, so the walked boundary is closed.

#ifndef KS_TRAP_HPP
#define KS_TRAP_HPP

#include <functional>
#include <string>
#include <vector>

#include "ks/speed_window.hpp"

namespace ks {

struct TrapCurve {
    std::string name;
    Vec2 normal;              // outward, constant along the piece
    double t0 = 0.0, t1 = 1.0;  // parameter range handed to point()
    std::function<Vec2(double)> point;
};

struct TrapRegion {
    TrapConstants constants;
    double v_minus = 0.0, v_plus = 0.0, beta = 0.0;
    std::vector<TrapCurve> curves;  // 6 edges + connector, boundary order
    std::vector<Vec2> corners;      // the 6 hexagon vertices, ccw from origin

    // Signed membership with tolerance: true when the point is inside or
    // within tol of the boundary.
    bool contains(const Vec2& pt, double tol = 1e-9) const;

    // Winding-number membership on the corner polygon (used as the
    // independent route in tests and for the interior check).
    int winding_number(const Vec2& pt) const;
};

// Builds the region and verifies the walked boundary closes to 1e-12
// per corner ("geometry-mismatch" otherwise).
TrapRegion build_trap(const ModelSpec& m, const WaveParams& p,
                      const TrapConstants& c);

struct CurveFlux {
    std::string name;
    int samples = 0;
    double max_flux = 0.0;       // max of n.F over the sampled closure
    double arg_t = 0.0;          // parameter of the max
    Vec2 arg_point = {0.0, 0.0};
    double lipschitz = 0.0;      // estimated slope bound of n.F along arc
    double inflated_max = 0.0;   // per-gap bound max(f_l, f_r) + L*gap/2
    bool pass = false;
};

struct FluxReport {
    std::vector<CurveFlux> curves;
    bool all_pass = false;
    double worst_flux = 0.0;      // most positive sampled flux
    double worst_inflated = 0.0;  // most positive inflated bound
};

// Samples n.F on Chebyshev points along each boundary piece (closure
// included), reports per-curve maxima, a Lipschitz estimate, and the
// gap-inflated bound. A piece passes when the sampled max is <= pass_tol;
// the inflated bound is reported for gap coverage. pass_tol absorbs the
// root-finding residual at the corner where the flux vanishes identically.
FluxReport certify_flux(const ModelSpec& m, const WaveParams& p,
                        const TrapRegion& trap, int samples_per_curve,
                        double pass_tol = 1e-11);

// True when the saddle's contracting eigendirection is steeper than the
// slanted upper edge, i.e. the stable subspace stays outside the region.
bool corner_exclusion_check(const ModelSpec& m, const WaveParams& p,
                            const TrapRegion& trap);

// (curve, parameter, flux) triples at uniform parameters, for plotting.
void write_flux_csv(const ModelSpec& m, const WaveParams& p,
                    const TrapRegion& trap, int samples_per_curve,
                    const std::string& path);

}  // namespace ks

#endif
