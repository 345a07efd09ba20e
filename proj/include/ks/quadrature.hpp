// Adaptive Simpson quadrature and a golden-section optimizer.

#ifndef KS_QUADRATURE_HPP
#define KS_QUADRATURE_HPP

#include <functional>

#include "ks/common.hpp"

namespace ks {

// Adaptive Simpson with Richardson acceptance. Tolerance is relative to the
// running estimate with an absolute floor so integrals with vanishing
// endpoints still terminate. Throws "quadrature-non-convergence" past
// max_depth.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol = 1e-10,
                        double abs_floor = 1e-14, int max_depth = 52);

// Golden-section minimizer on [a, b]; returns the argmin to x-tolerance tol.
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double tol = 1e-11);

// Grid scan (n points) followed by golden-section refinement of the best
// bracket; returns the argmax.
double scan_max(const std::function<double(double)>& f, double a, double b,
                int n = 2048, double tol = 1e-11);

}  // namespace ks

#endif
