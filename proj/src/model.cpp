#include "ks/model.hpp"

#include <algorithm>
#include <cmath>

namespace ks {

std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y) {
    const std::size_t n = std::min(x.size(), y.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    const double b = (n * sxy - sx * sy) / den;
    const double a = (sy - b * sx) / n;
    return {a, b};
}

double ModelSpec::phi_inverse(double y) const {
    // Grow a bracket [lo, hi] with phi(lo) <= y <= phi(hi) out of 0.
    double lo = 0.0, hi = 0.0;
    const double p0 = phi(0.0);
    if (y >= p0) {
        double step = 1.0;
        hi = step;
        int it = 0;
        while (phi(hi) < y) {
            lo = hi;
            step *= 2.0;
            hi = step;
            if (++it > 60) throw Error("phi-inverse-bracket", "phi never reaches requested level above");
        }
    } else {
        double step = 1.0;
        lo = -step;
        int it = 0;
        while (phi(lo) > y) {
            hi = lo;
            step *= 2.0;
            lo = -step;
            if (++it > 60) throw Error("phi-inverse-bracket", "phi never reaches requested level below");
        }
    }

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = phi(x) - y;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        const double df = phi_prime(x);
        double xn = (df > 0.0) ? x - f / df : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);  // bisection fallback
        if (std::abs(xn - x) < kPhiInverseTol) return xn;
        x = xn;
    }
    return x;
}

namespace {

ModelSpec tanh_quadratic(double a, double b, double c, double d, double beta,
                         double chi) {
    ModelSpec m;
    m.phi = [a, b](double w) { return a + std::tanh(b * w); };
    m.phi_prime = [b](double w) {
        const double t = std::cosh(b * w);
        return b / (t * t);
    };
    m.g = [c, d, beta](double v) { return c + d * (v - beta) * (v - beta); };
    m.g_prime = [d, beta](double v) { return 2.0 * d * (v - beta); };
    m.beta = beta;
    m.chi = chi;
    m.g_at_zero = m.g(0.0);
    m.g_infinity = std::numeric_limits<double>::infinity();
    m.kind = FamilyKind::TanhQuadratic;
    m.fam = {a, b, c, d, beta, 0.0};
    return m;
}

ModelSpec logistic_rational(double L, double mshift, double c, double d,
                            double beta, double chi) {
    ModelSpec m;
    m.phi = [L, mshift](double w) { return L / (1.0 + std::exp(-w)) + mshift; };
    m.phi_prime = [L](double w) {
        const double e = std::exp(-w);
        const double q = 1.0 + e;
        return L * e / (q * q);
    };
    m.g = [c, d, beta](double v) {
        const double t = v - beta;
        return c + d * t * t / (1.0 + v * v);
    };
    m.g_prime = [d, beta](double v) {
        const double t = v - beta;
        const double q = 1.0 + v * v;
        return 2.0 * d * t * (1.0 + beta * v) / (q * q);
    };
    m.beta = beta;
    m.chi = chi;
    m.g_at_zero = m.g(0.0);
    m.g_infinity = c + d;
    m.kind = FamilyKind::LogisticRational;
    m.fam = {L, mshift, c, d, beta, 0.0};
    return m;
}

double param(const std::map<std::string, double>& p, const std::string& key,
             double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

}  // namespace

void validate_model(const ModelSpec& m, double w_probe_halfwidth,
                    double v_probe_max) {
    if (!(m.chi > 0.0)) throw Error("model-invalid", "chi must be positive");
    if (!(m.beta > 0.0)) throw Error("model-invalid", "beta must be positive");
    if (!(m.phi(0.0) > 0.0)) throw Error("model-invalid", "phi(0) must be positive");

    const int nw = 201;
    for (int i = 0; i < nw; ++i) {
        const double w =
            -w_probe_halfwidth + 2.0 * w_probe_halfwidth * i / (nw - 1);
        const double dp = m.phi_prime(w);
        if (!(dp > 0.0))
            throw Error("model-invalid", "phi' not positive at w=" + std::to_string(w));
        const double dw = 1e-6 * std::max(1.0, std::abs(w));
        const double fd = (m.phi(w + dw) - m.phi(w - dw)) / (2.0 * dw);
        if (std::abs(fd - dp) > 1e-4 * std::max(1.0, std::abs(dp)))
            throw Error("model-invalid",
                        "phi' disagrees with finite differences at w=" + std::to_string(w));
        // inverse round trip on the same samples
        const double back = m.phi_inverse(m.phi(w));
        if (std::abs(back - w) > 1e-8 * std::max(1.0, std::abs(w)))
            throw Error("model-invalid", "phi_inverse round trip failed");
    }

    if (v_probe_max <= 0.0) v_probe_max = 4.0 * m.beta + 4.0;
    const int nv = 201;
    bool saw_neg = false, saw_pos = false;
    for (int i = 0; i < nv; ++i) {
        const double v = v_probe_max * (i + 0.5) / nv;
        if (!(m.g(v) > 0.0))
            throw Error("model-invalid", "g not positive at v=" + std::to_string(v));
        const double dg = m.g_prime(v);
        if (v < m.beta && dg < 0.0) saw_neg = true;
        if (v > m.beta && dg > 0.0) saw_pos = true;
        if (v < m.beta - 1e-6 && dg > 0.0)
            throw Error("model-invalid", "g' positive left of beta");
        if (v > m.beta + 1e-6 && dg < 0.0)
            throw Error("model-invalid", "g' negative right of beta");
        const double dv = 1e-6 * std::max(1.0, v);
        if (v > 2 * dv) {
            const double fd = (m.g(v + dv) - m.g(v - dv)) / (2.0 * dv);
            if (std::abs(fd - dg) > 1e-4 * std::max(1.0, std::abs(dg)))
                throw Error("model-invalid",
                            "g' disagrees with finite differences at v=" + std::to_string(v));
        }
    }
    if (!saw_neg || !saw_pos)
        throw Error("model-invalid", "g' shows no sign change on the probe grid");
}

ModelSpec build_model(const std::string& family,
                      const std::map<std::string, double>& params) {
    ModelSpec m;
    if (family == "tanh-quadratic") {
        m = tanh_quadratic(param(params, "a", 1.0), param(params, "b", 1.0),
                           param(params, "c", 1.0), param(params, "d", 1.0),
                           param(params, "beta", 1.0), param(params, "chi", 1.0));
    } else if (family == "logistic-rational") {
        m = logistic_rational(param(params, "L", 1.0), param(params, "m", 0.5),
                              param(params, "c", 1.0), param(params, "d", 1.0),
                              param(params, "beta", 1.0),
                              param(params, "chi", 1.0));
    } else {
        throw Error("model-invalid", "unknown family '" + family + "'");
    }
    validate_model(m);
    return m;
}

Equilibria resolve_states(const ModelSpec& m, double u_minus) {
    const double gb = m.g(m.beta);
    const double gs = m.g_star();
    if (!(u_minus > gb) || !(u_minus < gs))
        throw Error("no-pulse-regime",
                    "u_minus must lie strictly between g(beta) and g*");

    auto bisect = [&](double lo, double hi) {
        // g - u_minus changes sign on [lo, hi]
        double flo = m.g(lo) - u_minus;
        for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = m.g(mid) - u_minus;
            if ((fm > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    // Left root: g decreases from g(0) >= g* > u_minus to g(beta) < u_minus.
    const double v_plus = bisect(0.0, m.beta);

    // Right root: grow the bracket geometrically past beta.
    double hi = m.beta + std::max(1.0, m.beta);
    int it = 0;
    while (m.g(hi) < u_minus) {
        hi = m.beta + 2.0 * (hi - m.beta);
        if (++it > 60)
            throw Error("bracket-failure", "no right bracket for g(v) = u_minus");
    }
    const double v_minus = bisect(m.beta, hi);

    return {v_minus, v_plus};
}

WaveParams make_wave_params(const ModelSpec& m, double u_minus, double s,
                            double epsilon) {
    const Equilibria eq = resolve_states(m, u_minus);
    if (std::abs(s - m.chi * m.phi(0.0)) < 1e-12)
        throw Error("front-branch", "s == chi*phi(0) is the front case, not a pulse");
    WaveParams p;
    p.s = s;
    p.u_minus = u_minus;
    p.epsilon = epsilon;
    p.v_minus = eq.v_minus;
    p.v_plus = eq.v_plus;
    return p;
}

static double guarded_denominator(const ModelSpec& m, const WaveParams& p,
                                  double W) {
    const double den = m.chi * m.phi(W) - p.s;
    if (std::abs(den) < kSingularityGuard)
        throw Error("manifold-singularity",
                    "chi*phi(W) - s within guard at W=" + std::to_string(W));
    return den;
}

double slaved_u(const ModelSpec& m, const WaveParams& p, double W) {
    const double den = guarded_denominator(m, p, W);
    return p.u_minus * (m.chi * m.phi(0.0) - p.s) / den;
}

double slaved_u_dw(const ModelSpec& m, const WaveParams& p, double W) {
    const double den = guarded_denominator(m, p, W);
    return -p.u_minus * m.chi * m.phi_prime(W) * (m.chi * m.phi(0.0) - p.s) /
           (den * den);
}

double isocline_level(const ModelSpec& m, const WaveParams& p, double V) {
    const double gv = m.g(V);
    if (!(gv > 0.0)) throw Error("model-invalid", "g(V) <= 0 in isocline_level");
    const double soc = p.s / m.chi;
    return soc + p.u_minus / gv * (m.phi(0.0) - soc);
}

double isocline_w(const ModelSpec& m, const WaveParams& p, double V) {
    return m.phi_inverse(isocline_level(m, p, V));
}

}  // namespace ks
