// Scalar reference kernels and the runtime dispatch table.

#include "ks/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace ks::kernels {

namespace scalar {

static void vexp(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

static void vtanh(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(x[i]);
}

static void tanhquad_phi(double a, double b, const double* w, double* out,
                         std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a + std::tanh(b * w[i]);
}

static void logistic_phi(double L, double m, const double* w, double* out,
                         std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = L / (1.0 + std::exp(-w[i])) + m;
}

static void quad_g(double c, double d, double beta, const double* v, double* out,
                   std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = v[i] - beta;
        out[i] = c + d * t * t;
    }
}

static void ratquad_g(double c, double d, double beta, const double* v,
                      double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double t = v[i] - beta;
        out[i] = c + d * t * t / (1.0 + v[i] * v[i]);
    }
}

static void tanhquad_slaved_u(double a, double b, double chi, double s,
                              double u_minus, const double* w, double* out,
                              std::size_t n) {
    const double num = u_minus * (chi * a - s);  // chi*phi(0) - s with phi(0)=a
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = num / (chi * (a + std::tanh(b * w[i])) - s);
    }
}

static double max_reduce(const double* x, std::size_t n) {
    double m = -HUGE_VAL;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i]);
    return m;
}

static inline double minmod(double p, double q) {
    if (p > 0.0 && q > 0.0) return std::min(p, q);
    if (p < 0.0 && q < 0.0) return std::max(p, q);
    return 0.0;
}

static void minmod_slopes(const double* u, double* slope, std::size_t n) {
    if (n == 0) return;
    slope[0] = 0.0;
    if (n > 1) slope[n - 1] = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        slope[i] = minmod(u[i] - u[i - 1], u[i + 1] - u[i]);
    }
}

static void upwind_flux(const double* a_face, const double* u,
                        const double* slope, double* flux, std::size_t n_face) {
    for (std::size_t i = 0; i < n_face; ++i) {
        const double uf = (a_face[i] >= 0.0) ? u[i] + 0.5 * slope[i]
                                             : u[i + 1] - 0.5 * slope[i + 1];
        flux[i] = a_face[i] * uf;
    }
}

}  // namespace scalar

static const Ops g_scalar_ops = {
    scalar::vexp,        scalar::vtanh,         scalar::tanhquad_phi,
    scalar::logistic_phi, scalar::quad_g,        scalar::ratquad_g,
    scalar::tanhquad_slaved_u, scalar::max_reduce, scalar::minmod_slopes,
    scalar::upwind_flux,
};

const Ops& scalar_ops() { return g_scalar_ops; }

namespace detail {
// defined in kernels_avx2.cpp; nullptr on non-x86 builds
const Ops* avx2_table();
}

const Ops* avx2_ops() {
#if defined(__x86_64__) || defined(__i386__)
    if (__builtin_cpu_supports("avx2")) return detail::avx2_table();
#endif
    return nullptr;
}

namespace {

struct Selection {
    const Ops* ops;
    const char* name;
};

Selection select() {
    const char* want = std::getenv("KS_SIMD");
    const bool force_scalar = want && std::strcmp(want, "scalar") == 0;
    const bool force_avx2 = want && std::strcmp(want, "avx2") == 0;
    if (!force_scalar) {
        if (const Ops* t = avx2_ops()) return {t, "avx2"};
        if (force_avx2) return {&g_scalar_ops, "scalar"};  // requested but absent
    }
    return {&g_scalar_ops, "scalar"};
}

}  // namespace

static const Selection& selection() {
    static const Selection sel = select();
    return sel;
}

const Ops& ops() { return *selection().ops; }

const char* active_isa() { return selection().name; }

}  // namespace ks::kernels
