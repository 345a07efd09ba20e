// Shared basics: error type, small vectors, tolerances used across the toolkit.

#ifndef KS_COMMON_HPP
#define KS_COMMON_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ks {

// Every recoverable failure carries a short stable code (e.g. "no-pulse-regime")
// so the CLI and reports can classify it without parsing prose.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

inline double norm2(const Vec2& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1]); }
inline double norm2(const Vec3& a) {
    return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
}
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

// Guard half-width around the manifold singularity chi*phi(W) = s.
inline constexpr double kSingularityGuard = 1e-8;

// |g'| below this at an equilibrium means we refuse to classify it.
inline constexpr double kHyperbolicityTol = 1e-8;

// Absolute tolerance for the monotone inverse of phi.
inline constexpr double kPhiInverseTol = 1e-12;

// Least-squares fit of y = a + b*x; returns {a, b}.
std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y);

}  // namespace ks

#endif
