// AVX2 variants of the array kernels. Each function carries the avx2 target
// attribute so this translation unit builds without -mavx2 and the code only
// runs after the CPUID check in kernels.cpp.
//
// exp is the classic Cody-Waite reduction x = n*ln2 + r with a degree-11
// Taylor core on |r| <= ln2/2 and an exponent-field scale by 2^n. tanh is
// derived from it via tanh(x) = sign(x)*(1 - 2/(exp(2|x|)+1)).

#include "ks/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace ks::kernels {
namespace avx2 {

#define KS_AVX2 __attribute__((target("avx2,fma")))

KS_AVX2 static inline __m256d exp_pd(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
    const __m256d max_x = _mm256_set1_pd(709.0);
    const __m256d min_x = _mm256_set1_pd(-709.0);

    __m256d xc = _mm256_min_pd(_mm256_max_pd(x, min_x), max_x);

    __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, xc);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    // Taylor core: sum r^k/k!, k = 0..11
    const double inv_fact[12] = {
        1.0,
        1.0,
        1.0 / 2,
        1.0 / 6,
        1.0 / 24,
        1.0 / 120,
        1.0 / 720,
        1.0 / 5040,
        1.0 / 40320,
        1.0 / 362880,
        1.0 / 3628800,
        1.0 / 39916800,
    };
    __m256d p = _mm256_set1_pd(inv_fact[11]);
    for (int k = 10; k >= 0; --k) {
        p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[k]));
    }

    // scale by 2^n through the exponent field
    __m128i ni = _mm256_cvtpd_epi32(n);
    __m256i nl = _mm256_cvtepi32_epi64(ni);
    __m256i bias = _mm256_add_epi64(nl, _mm256_set1_epi64x(1023));
    __m256i pow2 = _mm256_slli_epi64(bias, 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(pow2));
}

KS_AVX2 static inline __m256d tanh_pd(__m256d x) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d ax = _mm256_andnot_pd(sign_mask, x);
    __m256d sgn = _mm256_and_pd(sign_mask, x);
    // 1 - 2/(e^{2|x|}+1); saturate for large |x| happens naturally
    __m256d e = exp_pd(_mm256_mul_pd(ax, _mm256_set1_pd(2.0)));
    __m256d one = _mm256_set1_pd(1.0);
    __m256d t = _mm256_sub_pd(
        one, _mm256_div_pd(_mm256_set1_pd(2.0), _mm256_add_pd(e, one)));
    return _mm256_or_pd(t, sgn);
}

KS_AVX2 static void vexp(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) {
        double buf[4] = {x[i], 0, 0, 0}, res[4];
        _mm256_storeu_pd(res, exp_pd(_mm256_loadu_pd(buf)));
        out[i] = res[0];
    }
}

KS_AVX2 static void vtanh(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, tanh_pd(_mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) {
        double buf[4] = {x[i], 0, 0, 0}, res[4];
        _mm256_storeu_pd(res, tanh_pd(_mm256_loadu_pd(buf)));
        out[i] = res[0];
    }
}

KS_AVX2 static void tanhquad_phi(double a, double b, const double* w,
                                 double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = tanh_pd(_mm256_mul_pd(vb, _mm256_loadu_pd(w + i)));
        _mm256_storeu_pd(out + i, _mm256_add_pd(va, t));
    }
    for (; i < n; ++i) {
        double buf[4] = {b * w[i], 0, 0, 0}, res[4];
        _mm256_storeu_pd(res, tanh_pd(_mm256_loadu_pd(buf)));
        out[i] = a + res[0];
    }
}

KS_AVX2 static void logistic_phi(double L, double m, const double* w,
                                 double* out, std::size_t n) {
    const __m256d vL = _mm256_set1_pd(L);
    const __m256d vm = _mm256_set1_pd(m);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d e = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(),
                                         _mm256_loadu_pd(w + i)));
        __m256d v = _mm256_add_pd(_mm256_div_pd(vL, _mm256_add_pd(one, e)), vm);
        _mm256_storeu_pd(out + i, v);
    }
    for (; i < n; ++i) {
        double buf[4] = {-w[i], 0, 0, 0}, res[4];
        _mm256_storeu_pd(res, exp_pd(_mm256_loadu_pd(buf)));
        out[i] = L / (1.0 + res[0]) + m;
    }
}

KS_AVX2 static void quad_g(double c, double d, double beta, const double* v,
                           double* out, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vd = _mm256_set1_pd(d);
    const __m256d vbeta = _mm256_set1_pd(beta);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_sub_pd(_mm256_loadu_pd(v + i), vbeta);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vd, _mm256_mul_pd(t, t), vc));
    }
    for (; i < n; ++i) {
        const double t = v[i] - beta;
        out[i] = std::fma(d, t * t, c);
    }
}

KS_AVX2 static void ratquad_g(double c, double d, double beta, const double* v,
                              double* out, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vd = _mm256_set1_pd(d);
    const __m256d vbeta = _mm256_set1_pd(beta);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vv = _mm256_loadu_pd(v + i);
        __m256d t = _mm256_sub_pd(vv, vbeta);
        __m256d num = _mm256_mul_pd(vd, _mm256_mul_pd(t, t));
        __m256d den = _mm256_fmadd_pd(vv, vv, one);
        _mm256_storeu_pd(out + i, _mm256_add_pd(vc, _mm256_div_pd(num, den)));
    }
    for (; i < n; ++i) {
        const double t = v[i] - beta;
        out[i] = c + d * t * t / std::fma(v[i], v[i], 1.0);
    }
}

KS_AVX2 static void tanhquad_slaved_u(double a, double b, double chi, double s,
                                      double u_minus, const double* w,
                                      double* out, std::size_t n) {
    const double num_s = u_minus * (chi * a - s);
    const __m256d num = _mm256_set1_pd(num_s);
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    const __m256d vchi = _mm256_set1_pd(chi);
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d phi =
            _mm256_add_pd(va, tanh_pd(_mm256_mul_pd(vb, _mm256_loadu_pd(w + i))));
        __m256d den = _mm256_fmsub_pd(vchi, phi, vs);
        _mm256_storeu_pd(out + i, _mm256_div_pd(num, den));
    }
    for (; i < n; ++i) {
        double buf[4] = {b * w[i], 0, 0, 0}, res[4];
        _mm256_storeu_pd(res, tanh_pd(_mm256_loadu_pd(buf)));
        out[i] = num_s / (std::fma(chi, a + res[0], -s));
    }
}

KS_AVX2 static double max_reduce(const double* x, std::size_t n) {
    __m256d m = _mm256_set1_pd(-HUGE_VAL);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(x + i));
    double buf[4];
    _mm256_storeu_pd(buf, m);
    double r = buf[0];
    for (int k = 1; k < 4; ++k) r = r > buf[k] ? r : buf[k];
    for (; i < n; ++i) r = r > x[i] ? r : x[i];
    return r;
}

KS_AVX2 static inline __m256d minmod_pd(__m256d p, __m256d q) {
    const __m256d zero = _mm256_setzero_pd();
    __m256d both_pos =
        _mm256_and_pd(_mm256_cmp_pd(p, zero, _CMP_GT_OQ),
                      _mm256_cmp_pd(q, zero, _CMP_GT_OQ));
    __m256d both_neg =
        _mm256_and_pd(_mm256_cmp_pd(p, zero, _CMP_LT_OQ),
                      _mm256_cmp_pd(q, zero, _CMP_LT_OQ));
    __m256d mn = _mm256_min_pd(p, q);
    __m256d mx = _mm256_max_pd(p, q);
    __m256d r = _mm256_blendv_pd(zero, mn, both_pos);
    return _mm256_blendv_pd(r, mx, both_neg);
}

KS_AVX2 static void minmod_slopes(const double* u, double* slope,
                                  std::size_t n) {
    if (n == 0) return;
    slope[0] = 0.0;
    if (n > 1) slope[n - 1] = 0.0;
    std::size_t i = 1;
    for (; i + 5 <= n; i += 4) {
        __m256d um = _mm256_loadu_pd(u + i - 1);
        __m256d uc = _mm256_loadu_pd(u + i);
        __m256d up = _mm256_loadu_pd(u + i + 1);
        _mm256_storeu_pd(slope + i,
                         minmod_pd(_mm256_sub_pd(uc, um), _mm256_sub_pd(up, uc)));
    }
    for (; i + 1 < n; ++i) {
        const double p = u[i] - u[i - 1], q = u[i + 1] - u[i];
        slope[i] = (p > 0 && q > 0) ? (p < q ? p : q)
                 : (p < 0 && q < 0) ? (p > q ? p : q)
                                    : 0.0;
    }
    if (n > 1) slope[n - 1] = 0.0;
}

KS_AVX2 static void upwind_flux(const double* a_face, const double* u,
                                const double* slope, double* flux,
                                std::size_t n_face) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d half = _mm256_set1_pd(0.5);
    std::size_t i = 0;
    for (; i + 4 <= n_face; i += 4) {
        __m256d a = _mm256_loadu_pd(a_face + i);
        __m256d ul = _mm256_fmadd_pd(half, _mm256_loadu_pd(slope + i),
                                     _mm256_loadu_pd(u + i));
        __m256d ur = _mm256_fnmadd_pd(half, _mm256_loadu_pd(slope + i + 1),
                                      _mm256_loadu_pd(u + i + 1));
        __m256d pick_left = _mm256_cmp_pd(a, zero, _CMP_GE_OQ);
        __m256d uf = _mm256_blendv_pd(ur, ul, pick_left);
        _mm256_storeu_pd(flux + i, _mm256_mul_pd(a, uf));
    }
    for (; i < n_face; ++i) {
        const double uf = (a_face[i] >= 0.0) ? u[i] + 0.5 * slope[i]
                                             : u[i + 1] - 0.5 * slope[i + 1];
        flux[i] = a_face[i] * uf;
    }
}

#undef KS_AVX2

}  // namespace avx2

namespace detail {

static const Ops g_avx2_ops = {
    avx2::vexp,        avx2::vtanh,         avx2::tanhquad_phi,
    avx2::logistic_phi, avx2::quad_g,        avx2::ratquad_g,
    avx2::tanhquad_slaved_u, avx2::max_reduce, avx2::minmod_slopes,
    avx2::upwind_flux,
};

const Ops* avx2_table() { return &g_avx2_ops; }

}  // namespace detail
}  // namespace ks::kernels

#else  // non-x86

namespace ks::kernels::detail {
const Ops* avx2_table() { return nullptr; }
}

#endif
