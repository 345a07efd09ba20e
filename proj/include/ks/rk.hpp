// Embedded Dormand-Prince 5(4) step, header-only so callers can drive it on
// any right-hand side (the orbit engine uses it for the reduced plane and
// the slow pair; tests measure its order directly).

#ifndef KS_RK_HPP
#define KS_RK_HPP

#include <array>
#include <cmath>

namespace ks::rk {

template <int N>
using State = std::array<double, N>;

template <int N>
struct StepResult {
    State<N> y;        // fifth-order solution at t + h
    double err_ratio;  // scaled embedded error, accept when <= 1
    State<N> k_last;   // derivative at the new point (FSAL)
};

// One step from (t, y) with derivative k1 = f(t, y) already evaluated.
template <int N, class F>
StepResult<N> dp5_step(const F& f, double t, const State<N>& y,
                       const State<N>& k1, double h, double atol,
                       double rtol) {
    constexpr double A21 = 1.0 / 5;
    constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
    constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
    constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                     A53 = 64448.0 / 6561, A54 = -212.0 / 729;
    constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33,
                     A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                     A65 = -5103.0 / 18656;
    constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                     B5 = -2187.0 / 6784, B6 = 11.0 / 84;
    constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                     E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

    State<N> tmp, k2, k3, k4, k5, k6, k7, y5;
    for (int i = 0; i < N; ++i) tmp[i] = y[i] + h * A21 * k1[i];
    k2 = f(t + h / 5, tmp);
    for (int i = 0; i < N; ++i) tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    k3 = f(t + 3 * h / 10, tmp);
    for (int i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    k4 = f(t + 4 * h / 5, tmp);
    for (int i = 0; i < N; ++i)
        tmp[i] =
            y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    k5 = f(t + 8 * h / 9, tmp);
    for (int i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] +
                             A64 * k4[i] + A65 * k5[i]);
    k6 = f(t + h, tmp);
    for (int i = 0; i < N; ++i)
        y5[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] +
                            B6 * k6[i]);
    k7 = f(t + h, y5);

    double err = 0.0;
    for (int i = 0; i < N; ++i) {
        const double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] +
                              E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        const double sc =
            atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        err += (e / sc) * (e / sc);
    }
    return {y5, std::sqrt(err / N), k7};
}

}  // namespace ks::rk

#endif
