// Equilibrium analysis and vector-field structure of the reduced slow flow
//     V' = W,   W' = -slaved_u(W) + g(V)
// on the critical manifold, plus the transversal attraction rate of the
// manifold in the fast scale.

#ifndef KS_PHASE_PLANE_HPP
#define KS_PHASE_PLANE_HPP

#include <array>
#include <complex>

#include "ks/model.hpp"

namespace ks {

enum class EquilibriumClass { Saddle, StableNode, StableFocus, NonHyperbolic };

struct EquilibriumInfo {
    double v = 0.0;  // equilibrium at (V, W) = (v, 0)
    std::complex<double> lambda1, lambda2;
    std::array<std::complex<double>, 2> eigvec1, eigvec2;  // (1, lambda_i)
    EquilibriumClass cls = EquilibriumClass::NonHyperbolic;
};

// State on the reduced plane, components (V, W).
using ReducedState = Vec2;

// F(V, W) = (W, -slaved_u(W) + g(V)).
Vec2 reduced_vector_field(const ModelSpec& m, const WaveParams& p,
                          const ReducedState& state);

// Classifies the two pulse equilibria. Returned order: [0] = attractor side
// (v_plus), [1] = saddle side (v_minus). Eigenpairs solve
//   lambda^2 + slaved_u_dw(0) lambda - g'(v) = 0.
// Throws "degenerate-equilibrium" when |g'(v)| < kHyperbolicityTol.
std::array<EquilibriumInfo, 2> classify_equilibria(const ModelSpec& m,
                                                   const WaveParams& p);

EquilibriumInfo classify_equilibrium(const ModelSpec& m, const WaveParams& p,
                                     double v);

// Eigenvalue of the fast-layer linearization transverse to the critical
// manifold: (u_minus/U)(chi phi(0) - s); negative on the s > chi phi(0)
// branch, which is what makes the manifold normally attracting.
double transversal_eigenvalue(const ModelSpec& m, const WaveParams& p, double U);

// div F = -slaved_u_dw(W); negative wherever defined, so the reduced flow
// admits no closed orbits (Bendixson).
double divergence(const ModelSpec& m, const WaveParams& p,
                  const ReducedState& state);

}  // namespace ks

#endif
