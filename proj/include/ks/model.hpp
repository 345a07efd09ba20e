// Model functions and pulse parameters.
//
// The PDE family is
//     u_t   = (eps u_x - chi u phi(v_x))_x,
//     eps v_t = v_xx + u - g(v),
// with phi strictly increasing, phi(0) > 0, and g positive with a single
// interior minimum at beta. A traveling pulse with speed s and far-field
// density u_minus rides the critical manifold
//     U = slaved_u(W) = u_minus (chi phi(0) - s) / (chi phi(W) - s),
// and the signal states v_minus > beta > v_plus solve g(v) = u_minus.

#ifndef KS_MODEL_HPP
#define KS_MODEL_HPP

#include <array>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include "ks/common.hpp"

namespace ks {

enum class FamilyKind { Custom, TanhQuadratic, LogisticRational };

struct ModelSpec {
    std::function<double(double)> phi;
    std::function<double(double)> phi_prime;
    std::function<double(double)> g;
    std::function<double(double)> g_prime;
    double beta = 1.0;       // minimizer of g
    double chi = 1.0;        // chemotactic coefficient
    double g_at_zero = 0.0;  // cached g(0)
    double g_infinity = std::numeric_limits<double>::infinity();

    FamilyKind kind = FamilyKind::Custom;  // enables batched kernel paths
    std::array<double, 6> fam = {};        // family parameters, kind-specific

    double g_star() const { return std::min(g_at_zero, g_infinity); }

    // Monotone inverse of phi, safeguarded Newton with a geometrically grown
    // bracket from 0. Absolute tolerance kPhiInverseTol.
    double phi_inverse(double y) const;
};

struct Equilibria {
    double v_minus;  // saddle side, > beta
    double v_plus;   // attractor side, < beta
};

struct WaveParams {
    double s = 0.0;        // traveling speed
    double u_minus = 0.0;  // far-field cell density (pulse: equal both sides)
    double epsilon = 0.0;  // singular parameter; 0 for the limiting systems
    double v_minus = 0.0;
    double v_plus = 0.0;

    bool above_branch(const ModelSpec& m) const {
        return s > m.chi * m.phi(0.0);
    }
};

// Instantiates a named family and validates the structural assumptions on a
// probe grid (phi' > 0, phi(0) > 0, g' changes sign once, supplied derivatives
// match finite differences).
//
// Families:
//   "tanh-quadratic":    phi = a + tanh(b w),            g = c + d (v-beta)^2
//   "logistic-rational": phi = L/(1+e^{-w}) + m,         g = c + d (v-beta)^2/(1+v^2)
// The second family has the finite limit g(inf) = c + d.
ModelSpec build_model(const std::string& family,
                      const std::map<std::string, double>& params);

// Validation entry point shared by build_model and custom models.
void validate_model(const ModelSpec& m, double w_probe_halfwidth = 5.0,
                    double v_probe_max = 0.0 /* 0 -> auto */);

// Two roots of g(v) = u_minus with v_plus < beta < v_minus, by bracketed
// bisection. Requires g(beta) < u_minus < g_star strictly, else
// "no-pulse-regime"; "bracket-failure" when no right bracket exists.
Equilibria resolve_states(const ModelSpec& m, double u_minus);

// Assembles pulse parameters; rejects s == chi*phi(0) (front branch).
WaveParams make_wave_params(const ModelSpec& m, double u_minus, double s,
                            double epsilon = 0.0);

// Cell density slaved to the critical manifold and its W-derivative.
//   slaved_u(W)  = u_minus (chi phi(0) - s) / (chi phi(W) - s)
// Both trip "manifold-singularity" when |chi phi(W) - s| < kSingularityGuard.
double slaved_u(const ModelSpec& m, const WaveParams& p, double W);
double slaved_u_dw(const ModelSpec& m, const WaveParams& p, double W);

// W'-isocline in phi-units: the isocline W' = 0 is phi(W) = isocline_level(V),
//   isocline_level(V) = s/chi + (u_minus/g(V)) (phi(0) - s/chi).
double isocline_level(const ModelSpec& m, const WaveParams& p, double V);

// W-coordinate of the isocline: phi_inverse(isocline_level(V)).
double isocline_w(const ModelSpec& m, const WaveParams& p, double V);

}  // namespace ks

#endif
