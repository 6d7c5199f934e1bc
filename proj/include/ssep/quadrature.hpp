#pragma once

#include <functional>

namespace ssep {

// Adaptive Simpson with Richardson correction. Throws ErrorKind::Numerical
// when the recursion budget is exhausted before |error| <= abs_tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 48);

}  // namespace ssep
