// Scalar/SIMD kernel equivalence. The SIMD lane must agree with the scalar
// reference to a few ulps on the ranges the toolkit actually uses.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "ks/kernels.hpp"

using namespace ks::kernels;

namespace {

// deterministic xorshift values in [lo, hi)
struct Rng {
    std::uint64_t s = 0x9e3779b97f4a7c15ull;
    double uni() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return static_cast<double>(s >> 11) * 0x1.0p-53;
    }
    double in(double lo, double hi) { return lo + (hi - lo) * uni(); }
};

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.in(lo, hi);
    return v;
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b,
                  double rel) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        // unit absolute floor: every kernel here produces O(1) values in use
        const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1.0});
        CHECK(std::abs(a[i] - b[i]) <= rel * scale);
    }
}

}  // namespace

TEST_CASE("dispatch selects a valid table") {
    CHECK(ops().vexp != nullptr);
    const char* isa = active_isa();
    CHECK((std::string(isa) == "scalar" || std::string(isa) == "avx2"));
}

TEST_CASE("avx2 exp/tanh match scalar within a few ulps") {
    const Ops* simd = avx2_ops();
    if (!simd) return;  // nothing to compare on this machine
    Rng rng;
    for (std::size_t n : {1u, 3u, 4u, 17u, 1024u}) {
        auto x = random_vec(rng, n, -30.0, 30.0);
        std::vector<double> a(n), b(n);
        scalar_ops().vexp(x.data(), a.data(), n);
        simd->vexp(x.data(), b.data(), n);
        expect_close(a, b, 1e-13);

        scalar_ops().vtanh(x.data(), a.data(), n);
        simd->vtanh(x.data(), b.data(), n);
        expect_close(a, b, 1e-13);
    }
}

TEST_CASE("family batches match scalar") {
    const Ops* simd = avx2_ops();
    if (!simd) return;
    Rng rng;
    const std::size_t n = 333;
    auto w = random_vec(rng, n, -5.0, 5.0);
    auto v = random_vec(rng, n, 0.0, 4.0);
    std::vector<double> a(n), b(n);

    scalar_ops().tanhquad_phi(1.0, 1.3, w.data(), a.data(), n);
    simd->tanhquad_phi(1.0, 1.3, w.data(), b.data(), n);
    expect_close(a, b, 1e-13);

    scalar_ops().logistic_phi(2.0, 0.5, w.data(), a.data(), n);
    simd->logistic_phi(2.0, 0.5, w.data(), b.data(), n);
    expect_close(a, b, 1e-13);

    scalar_ops().quad_g(1.0, 0.7, 1.1, v.data(), a.data(), n);
    simd->quad_g(1.0, 0.7, 1.1, v.data(), b.data(), n);
    expect_close(a, b, 1e-13);

    scalar_ops().ratquad_g(1.0, 0.7, 1.1, v.data(), a.data(), n);
    simd->ratquad_g(1.0, 0.7, 1.1, v.data(), b.data(), n);
    expect_close(a, b, 1e-13);

    scalar_ops().tanhquad_slaved_u(1.0, 1.0, 1.0, 1.2, 1.25, w.data(), a.data(),
                                   n);
    simd->tanhquad_slaved_u(1.0, 1.0, 1.0, 1.2, 1.25, w.data(), b.data(), n);
    expect_close(a, b, 1e-13);
}

TEST_CASE("reductions and pde sweeps match scalar exactly") {
    const Ops* simd = avx2_ops();
    if (!simd) return;
    Rng rng;
    for (std::size_t n : {2u, 5u, 64u, 1001u}) {
        auto u = random_vec(rng, n, -2.0, 3.0);
        CHECK(scalar_ops().max_reduce(u.data(), n) ==
              simd->max_reduce(u.data(), n));

        std::vector<double> sa(n), sb(n);
        scalar_ops().minmod_slopes(u.data(), sa.data(), n);
        simd->minmod_slopes(u.data(), sb.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(sa[i] == sb[i]);

        if (n >= 2) {
            auto a_face = random_vec(rng, n - 1, -1.5, 1.5);
            std::vector<double> fa(n - 1), fb(n - 1);
            scalar_ops().upwind_flux(a_face.data(), u.data(), sa.data(),
                                     fa.data(), n - 1);
            simd->upwind_flux(a_face.data(), u.data(), sb.data(), fb.data(),
                              n - 1);
            expect_close(fa, fb, 1e-14);
        }
    }
}

TEST_CASE("minmod slope definition") {
    // interior slope is the smaller one-sided difference when signs agree
    std::vector<double> u = {0.0, 1.0, 3.0, 3.5, 2.0};
    std::vector<double> s(u.size());
    scalar_ops().minmod_slopes(u.data(), s.data(), u.size());
    CHECK(s[0] == 0.0);
    CHECK(s[1] == doctest::Approx(1.0));   // min(1, 2)
    CHECK(s[2] == doctest::Approx(0.5));   // min(2, 0.5)
    CHECK(s[3] == 0.0);                    // sign change
    CHECK(s[4] == 0.0);
}
