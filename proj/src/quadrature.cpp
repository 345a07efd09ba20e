#include "ks/quadrature.hpp"

#include <cmath>

namespace ks {

namespace {

struct SimpsonCtx {
    const std::function<double(double)>& f;
    double rel_tol;
    double abs_floor;
    int max_depth;
    double scale;  // magnitude of the whole-interval estimate
};

double simpson_rec(const SimpsonCtx& ctx, double a, double b, double fa,
                   double fm, double fb, double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = ctx.f(lm), frm = ctx.f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const double tol =
        std::max(ctx.abs_floor, ctx.rel_tol * std::max(ctx.scale, std::abs(whole)));
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= ctx.max_depth)
        throw Error("quadrature-non-convergence",
                    "adaptive Simpson exceeded max depth");
    return simpson_rec(ctx, a, m, fa, flm, fm, left, depth + 1) +
           simpson_rec(ctx, m, b, fm, frm, fb, right, depth + 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, double abs_floor,
                        int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    SimpsonCtx ctx{f, rel_tol, abs_floor, max_depth, std::abs(whole)};
    // Split once up front so a symmetric integrand cannot fool the
    // first Richardson comparison.
    const double m = 0.5 * (a + b);
    const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    ctx.scale = std::max(ctx.scale, std::abs(left + right));
    return simpson_rec(ctx, a, m, fa, flm, fm, left, 1) +
           simpson_rec(ctx, m, b, fm, frm, fb, right, 1);
}

double golden_min(const std::function<double(double)>& f, double a, double b,
                  double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double invphi2 = (3.0 - std::sqrt(5.0)) / 2.0;
    double h = b - a;
    if (h <= tol) return 0.5 * (a + b);
    double c = a + invphi2 * h;
    double d = a + invphi * h;
    double fc = f(c), fd = f(d);
    const int n = static_cast<int>(std::ceil(std::log(tol / h) / std::log(invphi)));
    for (int k = 0; k < n; ++k) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            h *= invphi;
            c = a + invphi2 * h;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            h *= invphi;
            d = a + invphi * h;
            fd = f(d);
        }
    }
    return fc < fd ? 0.5 * (a + d) : 0.5 * (c + b);
}

double scan_max(const std::function<double(double)>& f, double a, double b,
                int n, double tol) {
    double best_x = a, best = f(a);
    for (int i = 1; i <= n; ++i) {
        const double x = a + (b - a) * i / n;
        const double v = f(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    const double dx = (b - a) / n;
    const double lo = std::max(a, best_x - dx), hi = std::min(b, best_x + dx);
    return golden_min([&](double x) { return -f(x); }, lo, hi, tol);
}

}  // namespace ks
