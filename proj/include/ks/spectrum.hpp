// Essential-spectrum machinery for the linearization about the pulse.
//
// The linearized operator has constant-coefficient limits at both tails;
// their Fourier symbols give a complex quadratic in lambda per Fourier
// parameter tau whose roots trace the spectral boundary curves. A weight
// e^{rho xi} shifts the symbol through Mw = M - 2 rho D and
// Nw = rho^2 D - rho M + N. The tail instability survives every weight: the
// real part of the trace polynomial stays positive near tau = 0.
//
// Also here: the diffusion-only resolvent oracle. For Re lambda > 0 the
// two-component problem (L0 - lambda)(p,q) = (f1,f2) with
// L0 = diag-coupled D(xi) d^2/dxi^2 has explicit exponential-kernel
// solutions, evaluated by product integration exactly on piecewise-linear
// data, plus a sup-norm bound C1/|lambda| checked sample by sample.

#ifndef KS_SPECTRUM_HPP
#define KS_SPECTRUM_HPP

#include <complex>
#include <vector>

#include "ks/orbit.hpp"

namespace ks {

using Cplx = std::complex<double>;

enum class Side { Plus, Minus };

struct Mat2 {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
};

struct AsymptoticMatrices {
    Side side = Side::Plus;
    double eps = 0.0, rho = 0.0;
    Mat2 D, M, N;    // unweighted tail limits
    Mat2 Mw, Nw;     // weighted: Mw = M - 2 rho D, Nw = rho^2 D - rho M + N
};

AsymptoticMatrices asymptotic_matrices(const ModelSpec& m, const WaveParams& p,
                                       Side side, double rho);

struct DispersionPoint {
    double tau = 0.0, rho = 0.0;
    Cplx lambda_plus, lambda_minus;  // roots ordered by descending real part
    Cplx a, b;                       // the quadratic lambda^2 + a lambda + b
};

// Roots of det(-tau^2 D + i tau Mw + Nw - lambda I) = 0 via the numerically
// stable quadratic formula (larger root first, companion from the product).
DispersionPoint dispersion_roots(const AsymptoticMatrices& mats, double tau);

// Independent closed-form expansion of the same quadratic's coefficients
// (side + limits), used as the second route in tests.
void dispersion_coeffs_expanded(const ModelSpec& m, const WaveParams& p,
                                double rho, double tau, Cplx& a, Cplx& b);

struct GrowthResult {
    double tau_star = 0.0;
    Cplx lambda_star;
    bool positive = false;
};

// Maximizes max(Re lambda+-) over a tau grid on [-tau_max, tau_max]
// (uniform points plus a cluster at 0) with golden-section refinement.
GrowthResult max_growth(const AsymptoticMatrices& mats, double tau_max = 2.0,
                        int n_grid = 401);

struct WeightPolyReport {
    double disc = 0.0;          // (2s-chi phi0)^2 + (4/eps)(eps+1/eps) g'(v+)
    bool disc_negative = false;
    double p_at_zero = 0.0;     // -g'(v+)/eps
    double min_p = 0.0;
    std::vector<double> rho_grid, p_values;
    bool small_eps_ok = false;  // disc < 0 and min_p > 0
};

// P(rho) = (eps+1/eps) rho^2 - (2s - chi phi0) rho - g'(v+)/eps evaluated on
// the grid; disc < 0 certifies P > 0 for every weight.
WeightPolyReport weight_polynomial_check(const ModelSpec& m,
                                         const WaveParams& p,
                                         const std::vector<double>& rho_grid);

// --------------------------------------------------------------------------
// resolvent oracle

// chi * U * phi'(W) along the pulse, cubic-Hermite interpolated and extended
// by its common tail value chi * u_minus * phi'(0).
struct ProfileK {
    std::vector<double> xi, value, slope;
    double tail = 0.0;
    double norm_inf = 0.0;
    double eval(double x) const;
};

ProfileK profile_k_from_orbit(const ModelSpec& m, const WaveParams& p,
                              const Orbit& orbit);
ProfileK profile_k_constant(double k0);

struct ResolventGrid {
    double x0 = 0.0;
    int n = 0;
    double h = 0.0;
    double x(int i) const { return x0 + h * i; }
    double span() const { return h * (n - 1); }
};

struct ResolventSolution {
    std::vector<Cplx> p, q;
    double tail_bound = 0.0;  // analytic bound on the truncated tail mass
};

// Applies (L0 - lambda I)^{-1} to (f1, f2) given on the grid, treating the
// data as piecewise linear; the exponential-kernel cell integrals are exact,
// accumulated by forward/backward sweeps. Throws "domain-too-short" when a
// kernel decay length exceeds a quarter of the span.
ResolventSolution resolvent_apply_L0(const WaveParams& p, Cplx lambda,
                                     const std::vector<double>& f1,
                                     const std::vector<double>& f2,
                                     const ResolventGrid& grid,
                                     const ProfileK& k);

enum class Stencil {
    Fitted,   // three-point second difference fitted to the layer rates
              // sqrt(eps lambda) and sqrt(lambda/eps); resolves both kernels
              // at any spacing
    Classic,  // plain (u[i-1]-2u[i]+u[i+1])/h^2; only meaningful when the
              // kernel scales are resolved by the grid
};

struct ResolventCheck {
    Cplx lambda;
    double residual_rel = 0.0;  // ||L0(p,q) - lambda (p,q) - f|| / ||f||
    double ratio = 0.0;         // ||(p,q)|| * |lambda| / ||f||
    double c1 = 0.0;            // 2 (1 + 3 eps ||k||)
    bool residual_ok = false;
    bool ratio_ok = false;
};

ResolventCheck resolvent_bound_check(const WaveParams& p, Cplx lambda,
                                     const std::vector<double>& f1,
                                     const std::vector<double>& f2,
                                     const ResolventGrid& grid,
                                     const ProfileK& k,
                                     double residual_tol = 1e-4,
                                     Stencil stencil = Stencil::Fitted);

// Deterministic smooth test data: sums of low-frequency cosines normalized
// to unit sup norm. The generator is fully specified (no library
// distributions) so reports reproduce bit-for-bit.
std::vector<double> smooth_sample(std::uint64_t seed, const ResolventGrid& grid);

void write_dispersion_csv(const AsymptoticMatrices& mats, double tau_max,
                          int n, const std::string& path);

}  // namespace ks

#endif
