// Admissible traveling-speed window and the four free constants that
// parameterize the trapping region.
//
// Two edge budgets control how far the region can bulge past the isocline:
//   lower edge:  J(V) = V (g(V) - u_minus)            on [0, v_plus]
//   upper edge:  Q(V) = (v_minus - V)^2 inf_{z in (V, v_minus]} g'(z)
//                                                     on [beta, v_minus]
// Their interval means bound the speeds for which a region closes up.

#ifndef KS_SPEED_WINDOW_HPP
#define KS_SPEED_WINDOW_HPP

#include "ks/model.hpp"

namespace ks {

enum class Branch { Above, Below };

struct SpeedWindow {
    double s_lower = 0.0;
    double s_upper = 0.0;
    double s1 = 0.0, s2 = 0.0;
    double J_mean = 0.0, Q_mean = 0.0;
    Branch branch = Branch::Above;
    bool empty() const { return !(s_upper > s_lower); }
    double midpoint() const { return 0.5 * (s_lower + s_upper); }
};

struct TrapConstants {
    double v_star_low = 0.0;   // in (0, v_plus), near the max of J
    double v_star_high = 0.0;  // in (beta, v_minus), near the max of Q
    double w_low = 0.0;        // lower edge height, negative
    double w_high = 0.0;       // upper edge height, positive
    // diagnostics recorded at construction
    double J_at_low = 0.0;
    double Q_at_high = 0.0;
    double isocline_w_beta = 0.0;  // phi^{-1}(level at beta), negative
    double isocline_w_zero = 0.0;  // phi^{-1}(level at 0), positive
};

double edge_budget_lower(const ModelSpec& m, double u_minus, double V);  // J
double edge_budget_upper(const ModelSpec& m, const Equilibria& eq,
                         double V);  // Q, with the inner infimum minimized
                                     // per evaluation point

// Interval means of the edge budgets by adaptive quadrature
// (relative tolerance 1e-10, absolute floor 1e-14).
double edge_integral_lower(const ModelSpec& m, double u_minus,
                           const Equilibria& eq);
double edge_integral_upper(const ModelSpec& m, double u_minus,
                           const Equilibria& eq);

// Speed window for the requested branch. Emptiness is reported in the
// struct, not thrown; call require_nonempty where a window is mandatory.
SpeedWindow speed_bounds(const ModelSpec& m, double u_minus, Branch branch);
void require_nonempty(const SpeedWindow& w);

// Chooses the budget maximizers and places the edge heights a convex
// fraction `margin` of the way from the isocline bound toward the budget
// bound. Verifies both strict inequality chains; throws
// "constants-infeasible" when they fail (s too close to the window edge).
TrapConstants pick_trap_constants(const ModelSpec& m, const WaveParams& p,
                                  double margin = 0.5);

struct SaddleRate {
    double lambda2 = 0.0;  // contracting eigenvalue at the saddle
    double bound = 0.0;    // -w_high / (v_minus - v_star_high)
    bool ok = false;       // lambda2 < bound < 0
};

// The slanted upper edge excludes the saddle's stable subspace exactly when
// lambda2 lies below the edge slope; this is that comparison.
SaddleRate saddle_rate_bound(const ModelSpec& m, const WaveParams& p,
                             const TrapConstants& c);

}  // namespace ks

#endif
