// Array kernels for the hot loops (flux certification sampling, PDE sweeps,
// batched model-family evaluation). Scalar reference implementations always
// exist; an AVX2 variant is selected at runtime when the CPU supports it.
// Override with KS_SIMD=scalar|avx2|auto. Scalar and SIMD paths are
// equivalence-tested against each other in tests/test_kernels.cpp.

#ifndef KS_KERNELS_HPP
#define KS_KERNELS_HPP

#include <cstddef>

namespace ks::kernels {

struct Ops {
    // elementwise transcendentals
    void (*vexp)(const double* x, double* out, std::size_t n);
    void (*vtanh)(const double* x, double* out, std::size_t n);

    // model-family batches
    // phi(w) = a + tanh(b*w)
    void (*tanhquad_phi)(double a, double b, const double* w, double* out,
                         std::size_t n);
    // phi(w) = L/(1+exp(-w)) + m
    void (*logistic_phi)(double L, double m, const double* w, double* out,
                         std::size_t n);
    // g(v) = c + d*(v-beta)^2
    void (*quad_g)(double c, double d, double beta, const double* v, double* out,
                   std::size_t n);
    // g(v) = c + d*(v-beta)^2/(1+v^2)
    void (*ratquad_g)(double c, double d, double beta, const double* v,
                      double* out, std::size_t n);
    // slaved density on the critical manifold for the tanh family:
    //   u(w) = u_minus*(chi*phi(0)-s)/(chi*phi(w)-s),  phi(w) = a + tanh(b*w)
    void (*tanhquad_slaved_u)(double a, double b, double chi, double s,
                              double u_minus, const double* w, double* out,
                              std::size_t n);

    // reductions / PDE sweeps
    double (*max_reduce)(const double* x, std::size_t n);
    // slope[i] = minmod(u[i]-u[i-1], u[i+1]-u[i]) for i in [1, n-2]; ends 0
    void (*minmod_slopes)(const double* u, double* slope, std::size_t n);
    // face flux for n-1 faces: a[i] >= 0 picks left cell with +slope/2,
    // a[i] < 0 picks right cell with -slope/2
    void (*upwind_flux)(const double* a_face, const double* u,
                        const double* slope, double* flux, std::size_t n_face);
};

// Dispatch table chosen once per process.
const Ops& ops();

// "scalar" or "avx2"
const char* active_isa();

// Both concrete tables, for equivalence testing.
const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when unsupported on this CPU

}  // namespace ks::kernels

#endif
