#pragma once

#include <functional>

namespace rjmix {

// Adaptive Gauss-Kronrod 15(7) by interval bisection until the error
// estimate drops below abs_tol + rel_tol*|integral|. Throws
// integration_error when the subdivision budget runs out.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol = 0.0);

}  // namespace rjmix
