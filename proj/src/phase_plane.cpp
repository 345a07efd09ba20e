#include "ks/phase_plane.hpp"

#include <cmath>

namespace ks {

Vec2 reduced_vector_field(const ModelSpec& m, const WaveParams& p,
                          const ReducedState& state) {
    return {state[1], -slaved_u(m, p, state[1]) + m.g(state[0])};
}

EquilibriumInfo classify_equilibrium(const ModelSpec& m, const WaveParams& p,
                                     double v) {
    const double gp = m.g_prime(v);
    if (std::abs(gp) < kHyperbolicityTol)
        throw Error("degenerate-equilibrium",
                    "|g'(v)| below hyperbolicity tolerance at v=" + std::to_string(v));

    const double hp0 = slaved_u_dw(m, p, 0.0);
    const double disc = hp0 * hp0 + 4.0 * gp;

    EquilibriumInfo e;
    e.v = v;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        e.lambda1 = std::complex<double>((-hp0 + r) / 2.0, 0.0);
        e.lambda2 = std::complex<double>((-hp0 - r) / 2.0, 0.0);
        e.cls = gp > 0.0 ? EquilibriumClass::Saddle : EquilibriumClass::StableNode;
    } else {
        const double im = std::sqrt(-disc) / 2.0;
        e.lambda1 = std::complex<double>(-hp0 / 2.0, im);
        e.lambda2 = std::complex<double>(-hp0 / 2.0, -im);
        e.cls = EquilibriumClass::StableFocus;
    }
    e.eigvec1 = {std::complex<double>(1.0, 0.0), e.lambda1};
    e.eigvec2 = {std::complex<double>(1.0, 0.0), e.lambda2};
    return e;
}

std::array<EquilibriumInfo, 2> classify_equilibria(const ModelSpec& m,
                                                   const WaveParams& p) {
    return {classify_equilibrium(m, p, p.v_plus),
            classify_equilibrium(m, p, p.v_minus)};
}

double transversal_eigenvalue(const ModelSpec& m, const WaveParams& p,
                              double U) {
    return p.u_minus / U * (m.chi * m.phi(0.0) - p.s);
}

double divergence(const ModelSpec& m, const WaveParams& p,
                  const ReducedState& state) {
    return -slaved_u_dw(m, p, state[1]);
}

}  // namespace ks
