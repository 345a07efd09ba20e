#include "ks/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "ks/quadrature.hpp"

namespace ks {

AsymptoticMatrices asymptotic_matrices(const ModelSpec& m, const WaveParams& p,
                                       Side side, double rho) {
    if (!(p.epsilon > 0.0))
        throw Error("bad-epsilon", "asymptotic matrices need epsilon > 0");
    const double eps = p.epsilon;
    const double u_tail = p.u_minus;  // pulse: same density both sides
    const double v_tail = side == Side::Plus ? p.v_plus : p.v_minus;
    const double phi0 = m.phi(0.0);
    const double dphi0 = m.phi_prime(0.0);

    AsymptoticMatrices out;
    out.side = side;
    out.eps = eps;
    out.rho = rho;
    out.D = {eps, -m.chi * u_tail * dphi0, 0.0, 1.0 / eps};
    out.M = {p.s - m.chi * phi0, 0.0, 0.0, p.s};
    out.N = {0.0, 0.0, 1.0 / eps, -m.g_prime(v_tail) / eps};

    auto lin = [&](const Mat2& A, double ca, const Mat2& B, double cb,
                   const Mat2& C, double cc) {
        return Mat2{ca * A.a11 + cb * B.a11 + cc * C.a11,
                    ca * A.a12 + cb * B.a12 + cc * C.a12,
                    ca * A.a21 + cb * B.a21 + cc * C.a21,
                    ca * A.a22 + cb * B.a22 + cc * C.a22};
    };
    out.Mw = lin(out.M, 1.0, out.D, -2.0 * rho, Mat2{}, 0.0);
    out.Nw = lin(out.D, rho * rho, out.M, -rho, out.N, 1.0);
    return out;
}

DispersionPoint dispersion_roots(const AsymptoticMatrices& mats, double tau) {
    const Cplx I(0.0, 1.0);
    const double t2 = tau * tau;
    const Cplx a11 = -t2 * mats.D.a11 + I * tau * mats.Mw.a11 + mats.Nw.a11;
    const Cplx a12 = -t2 * mats.D.a12 + I * tau * mats.Mw.a12 + mats.Nw.a12;
    const Cplx a21 = -t2 * mats.D.a21 + I * tau * mats.Mw.a21 + mats.Nw.a21;
    const Cplx a22 = -t2 * mats.D.a22 + I * tau * mats.Mw.a22 + mats.Nw.a22;

    DispersionPoint pt;
    pt.tau = tau;
    pt.rho = mats.rho;
    pt.a = -(a11 + a22);
    pt.b = a11 * a22 - a12 * a21;

    const Cplx disc = std::sqrt(pt.a * pt.a - 4.0 * pt.b);
    // pick the branch that avoids cancellation in -a -+ disc
    const Cplx s = (std::real(std::conj(pt.a) * disc) >= 0.0) ? disc : -disc;
    const Cplx q = -0.5 * (pt.a + s);
    Cplx l1 = q;
    Cplx l2 = (q == Cplx(0.0, 0.0)) ? -pt.a - q : pt.b / q;
    if (l1.real() < l2.real()) std::swap(l1, l2);
    pt.lambda_plus = l1;
    pt.lambda_minus = l2;
    return pt;
}

void dispersion_coeffs_expanded(const ModelSpec& m, const WaveParams& p,
                                double rho, double tau, Cplx& a, Cplx& b) {
    const Cplx I(0.0, 1.0);
    const double eps = p.epsilon;
    const double phi0 = m.chi * m.phi(0.0);
    const double gp = m.g_prime(p.v_plus);
    const double ku = m.chi * p.u_minus * m.phi_prime(0.0);
    const double t2 = tau * tau, r2 = rho * rho;

    const Cplx r1 = t2 * eps - I * tau * (p.s - phi0 - 2.0 * rho * eps) -
                    r2 * eps + rho * (p.s - phi0);
    const Cplx r2q = t2 / eps - I * tau * (p.s - 2.0 * rho / eps) - r2 / eps +
                     p.s * rho + gp / eps;
    const Cplx r3 = -(1.0 / eps) * Cplx((t2 - r2) * ku, 2.0 * tau * rho * ku);
    a = r1 + r2q;
    b = r1 * r2q + r3;
}

GrowthResult max_growth(const AsymptoticMatrices& mats, double tau_max,
                        int n_grid) {
    auto growth = [&](double tau) {
        const DispersionPoint pt = dispersion_roots(mats, tau);
        return std::max(pt.lambda_plus.real(), pt.lambda_minus.real());
    };

    std::vector<double> grid;
    grid.reserve(n_grid + 64);
    for (int i = 0; i < n_grid; ++i)
        grid.push_back(-tau_max + 2.0 * tau_max * i / (n_grid - 1));
    // cluster at the origin: the unstable root sits at small tau
    for (int k = -8; k <= 0; ++k) {
        const double t = tau_max * std::pow(10.0, k);
        grid.push_back(t);
        grid.push_back(-t);
    }
    grid.push_back(0.0);

    double best_tau = grid[0], best = growth(grid[0]);
    for (double t : grid) {
        const double v = growth(t);
        if (v > best) {
            best = v;
            best_tau = t;
        }
    }
    const double dx = 2.0 * tau_max / (n_grid - 1);
    const double lo = std::max(-tau_max, best_tau - dx);
    const double hi = std::min(tau_max, best_tau + dx);
    const double refined =
        golden_min([&](double t) { return -growth(t); }, lo, hi, 1e-12);
    if (growth(refined) > best) best_tau = refined;

    GrowthResult out;
    out.tau_star = best_tau;
    const DispersionPoint pt = dispersion_roots(mats, best_tau);
    out.lambda_star = pt.lambda_plus.real() >= pt.lambda_minus.real()
                          ? pt.lambda_plus
                          : pt.lambda_minus;
    out.positive = out.lambda_star.real() > 0.0;
    return out;
}

WeightPolyReport weight_polynomial_check(const ModelSpec& m,
                                         const WaveParams& p,
                                         const std::vector<double>& rho_grid) {
    const double eps = p.epsilon;
    const double gp = m.g_prime(p.v_plus);
    const double coef2 = eps + 1.0 / eps;
    const double coef1 = 2.0 * p.s - m.chi * m.phi(0.0);

    WeightPolyReport rep;
    rep.rho_grid = rho_grid;
    rep.disc = coef1 * coef1 + (4.0 / eps) * coef2 * gp;
    rep.disc_negative = rep.disc < 0.0;
    rep.p_at_zero = -gp / eps;
    rep.min_p = HUGE_VAL;
    for (double rho : rho_grid) {
        const double val = coef2 * rho * rho - coef1 * rho - gp / eps;
        rep.p_values.push_back(val);
        rep.min_p = std::min(rep.min_p, val);
    }
    rep.small_eps_ok = rep.disc_negative && rep.min_p > 0.0;
    return rep;
}

// --------------------------------------------------------------------------
// profile of k(y) = chi U phi'(W) along the pulse

double ProfileK::eval(double x) const {
    if (xi.empty() || x <= xi.front() || x >= xi.back()) return tail;
    const auto it = std::upper_bound(xi.begin(), xi.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xi.begin()) - 1;
    const double hseg = xi[j + 1] - xi[j];
    const double t = (x - xi[j]) / hseg;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * value[j] + h10 * hseg * slope[j] + h01 * value[j + 1] +
           h11 * hseg * slope[j + 1];
}

ProfileK profile_k_from_orbit(const ModelSpec& m, const WaveParams& p,
                              const Orbit& orbit) {
    ProfileK k;
    const std::size_t n = orbit.xi.size();
    if (n < 2) throw Error("profile-too-short", "orbit has fewer than 2 samples");
    k.xi.resize(n);
    k.value.resize(n);
    const double mid = 0.5 * (orbit.xi.front() + orbit.xi.back());
    for (std::size_t i = 0; i < n; ++i) {
        k.xi[i] = orbit.xi[i] - mid;  // center the pulse on the grid origin
        k.value[i] =
            m.chi * orbit.states[i][0] * m.phi_prime(orbit.states[i][1]);
    }
    // secant-weighted slopes on the non-uniform samples
    k.slope.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hl = k.xi[i] - k.xi[i - 1];
        const double hr = k.xi[i + 1] - k.xi[i];
        const double dl = (k.value[i] - k.value[i - 1]) / hl;
        const double dr = (k.value[i + 1] - k.value[i]) / hr;
        k.slope[i] = (dl * hr + dr * hl) / (hl + hr);
    }
    k.slope[0] = (k.value[1] - k.value[0]) / (k.xi[1] - k.xi[0]);
    k.slope[n - 1] = (k.value[n - 1] - k.value[n - 2]) / (k.xi[n - 1] - k.xi[n - 2]);
    k.tail = m.chi * p.u_minus * m.phi_prime(0.0);
    k.norm_inf = std::abs(k.tail);
    for (double v : k.value) k.norm_inf = std::max(k.norm_inf, std::abs(v));
    return k;
}

ProfileK profile_k_constant(double k0) {
    ProfileK k;
    k.tail = k0;
    k.norm_inf = std::abs(k0);
    return k;
}

// --------------------------------------------------------------------------
// exponential-kernel convolution, exact on piecewise-linear data

namespace {

struct CellWeights {
    Cplx near_w;  // weight of the sample at the kernel's peak
    Cplx far_w;   // weight of the far sample
};

// integral over one cell of e^{-z s} (1-s) ds and e^{-z s} s ds, s in [0,1]
CellWeights cell_weights(Cplx z) {
    if (std::abs(z) < 1e-3) {
        const Cplx z2 = z * z, z3 = z2 * z;
        // series of (z-1+e^-z)/z^2 and (1-(1+z)e^-z)/z^2
        const Cplx near = 0.5 - z / 6.0 + z2 / 24.0 - z3 / 120.0;
        const Cplx far = 0.5 - z / 3.0 + z2 / 8.0 - z3 / 30.0;
        return {near, far};
    }
    const Cplx ez = std::exp(-z);
    const Cplx z2 = z * z;
    const Cplx near = (z - 1.0 + ez) / z2;
    const Cplx far = (1.0 - (1.0 + z) * ez) / z2;
    return {near, far};
}

// I(x_i) = integral over the grid of e^{-kappa |x_i - y|} f(y) dy
template <class Getter>
void kernel_convolve(Cplx kappa, const ResolventGrid& grid, const Getter& f,
                     std::vector<Cplx>& out) {
    const int n = grid.n;
    const Cplx z = kappa * grid.h;
    const Cplx decay = std::exp(-z);
    const CellWeights w = cell_weights(z);
    out.assign(n, Cplx(0.0, 0.0));

    // left sweep: contribution of y < x_i
    Cplx acc(0.0, 0.0);
    for (int i = 1; i < n; ++i) {
        acc = acc * decay + grid.h * (w.far_w * f(i - 1) + w.near_w * f(i));
        out[i] += acc;
    }
    // right sweep: contribution of y > x_i
    acc = Cplx(0.0, 0.0);
    for (int i = n - 2; i >= 0; --i) {
        acc = acc * decay + grid.h * (w.near_w * f(i) + w.far_w * f(i + 1));
        out[i] += acc;
    }
}

}  // namespace

ResolventSolution resolvent_apply_L0(const WaveParams& p, Cplx lambda,
                                     const std::vector<double>& f1,
                                     const std::vector<double>& f2,
                                     const ResolventGrid& grid,
                                     const ProfileK& k) {
    if (!(lambda.real() > 0.0))
        throw Error("bad-lambda", "resolvent oracle requires Re lambda > 0");
    if (static_cast<int>(f1.size()) != grid.n ||
        static_cast<int>(f2.size()) != grid.n)
        throw Error("bad-grid", "sample size does not match the grid");

    const double eps = p.epsilon;
    const Cplx sql = std::sqrt(lambda);
    const Cplx kappa_q = std::sqrt(eps) * sql;       // slow-component kernel
    const Cplx kappa_p = sql / std::sqrt(eps);       // fast-component kernel
    const double len_q = 1.0 / kappa_q.real();
    const double len_p = 1.0 / kappa_p.real();
    if (4.0 * std::max(len_q, len_p) > grid.span())
        throw Error("domain-too-short",
                    "kernel decay length exceeds a quarter of the grid span");

    ResolventSolution sol;
    std::vector<Cplx> conv;
    kernel_convolve(kappa_q, grid, [&](int i) { return Cplx(f2[i], 0.0); },
                    conv);
    const Cplx pref_q = -std::sqrt(eps) / (2.0 * sql);
    sol.q.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) sol.q[i] = pref_q * conv[i];

    std::vector<Cplx> gvec(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double ki = k.xi.empty() ? k.tail : k.eval(grid.x(i));
        gvec[i] = eps * ki * (lambda * sol.q[i] + f2[i]) + f1[i];
    }
    kernel_convolve(kappa_p, grid, [&](int i) { return gvec[i]; }, conv);
    const Cplx pref_p = -1.0 / (2.0 * std::sqrt(eps) * sql);
    sol.p.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) sol.p[i] = pref_p * conv[i];

    // truncated tail mass, bounded by the sup of f against the kernel tail
    double fmax = 0.0;
    for (int i = 0; i < grid.n; ++i)
        fmax = std::max({fmax, std::abs(f1[i]), std::abs(f2[i])});
    const double tail_q =
        std::abs(pref_q) * fmax / kappa_q.real();  // e^{-0} envelope at the edge
    // |G| <= (1 + 3 eps ||k||) max|f| via ||q|| <= 2 ||f2|| / |lambda|
    const double tail_p = std::abs(pref_p) * (1.0 + 3.0 * eps * k.norm_inf) *
                          fmax / kappa_p.real();
    sol.tail_bound = std::max(tail_q, tail_p);
    return sol;
}

ResolventCheck resolvent_bound_check(const WaveParams& p, Cplx lambda,
                                     const std::vector<double>& f1,
                                     const std::vector<double>& f2,
                                     const ResolventGrid& grid,
                                     const ProfileK& k, double residual_tol,
                                     Stencil stencil) {
    const ResolventSolution sol = resolvent_apply_L0(p, lambda, f1, f2, grid, k);
    const double eps = p.epsilon;
    const double h = grid.h;
    const Cplx kq2 = eps * lambda;          // kappa_q^2
    const Cplx kp2 = lambda / eps;          // kappa_p^2

    // three-point operator approximating u'' - kappa^2 u; the fitted form is
    // exact on e^{+-kappa xi}
    auto second_minus = [&](const std::vector<Cplx>& u, int i, Cplx kap2) {
        if (stencil == Stencil::Classic) {
            const Cplx d2 = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (h * h);
            return d2 - kap2 * u[i];
        }
        const Cplx kh = std::sqrt(kap2) * h;
        const Cplx ch = std::cosh(kh);
        const Cplx delta = 2.0 * (ch - 1.0) / kap2;
        return (u[i - 1] - 2.0 * ch * u[i] + u[i + 1]) / delta;
    };

    double fmax = 0.0;
    for (int i = 0; i < grid.n; ++i)
        fmax = std::max({fmax, std::abs(f1[i]), std::abs(f2[i])});

    double worst = 0.0;
    for (int i = 1; i + 1 < grid.n; ++i) {
        const Cplx row2 = second_minus(sol.q, i, kq2) / eps - f2[i];
        const Cplx qpp = second_minus(sol.q, i, kq2) + kq2 * sol.q[i];  // ~ q''
        const double ki = k.xi.empty() ? k.tail : k.eval(grid.x(i));
        const Cplx row1 = eps * second_minus(sol.p, i, kp2) - ki * qpp - f1[i];
        worst = std::max({worst, std::abs(row1), std::abs(row2)});
    }

    double sup = 0.0;
    for (int i = 0; i < grid.n; ++i)
        sup = std::max({sup, std::abs(sol.p[i]), std::abs(sol.q[i])});

    ResolventCheck out;
    out.lambda = lambda;
    out.residual_rel = fmax > 0.0 ? worst / fmax : 0.0;
    out.c1 = 2.0 * (1.0 + 3.0 * eps * k.norm_inf);
    out.ratio = fmax > 0.0 ? sup * std::abs(lambda) / fmax : 0.0;
    out.residual_ok = out.residual_rel < residual_tol;
    out.ratio_ok = out.ratio <= out.c1;
    return out;
}

std::vector<double> smooth_sample(std::uint64_t seed, const ResolventGrid& grid) {
    // xorshift-based generator, fully specified
    if (seed == 0) seed = 0x9e3779b97f4a7c15ull;
    auto next = [&]() {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        return seed;
    };
    auto uni = [&]() {  // in [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    };
    const int n_modes = 4;
    std::vector<double> amp(n_modes), freq(n_modes), phase(n_modes);
    for (int m = 0; m < n_modes; ++m) {
        amp[m] = 0.3 + 0.7 * uni();
        freq[m] = 0.1 + 1.4 * uni();
        phase[m] = 2.0 * M_PI * uni();
    }
    std::vector<double> out(grid.n);
    double sup = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        double v = 0.0;
        for (int m = 0; m < n_modes; ++m)
            v += amp[m] * std::cos(freq[m] * grid.x(i) + phase[m]);
        out[i] = v;
        sup = std::max(sup, std::abs(v));
    }
    for (double& v : out) v /= sup;
    return out;
}

void write_dispersion_csv(const AsymptoticMatrices& mats, double tau_max,
                          int n, const std::string& path) {
    std::ofstream f(path);
    f.precision(17);
    f << "tau,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus\n";
    for (int i = 0; i < n; ++i) {
        const double tau = -tau_max + 2.0 * tau_max * i / (n - 1);
        const DispersionPoint pt = dispersion_roots(mats, tau);
        f << tau << ',' << pt.lambda_plus.real() << ',' << pt.lambda_plus.imag()
          << ',' << pt.lambda_minus.real() << ',' << pt.lambda_minus.imag()
          << '\n';
    }
}

}  // namespace ks
