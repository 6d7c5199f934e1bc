#include "ssep/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "ssep/error.hpp"

namespace ssep {
namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;
  bool exhausted = false;
  double worst_a = 0, worst_b = 0;

  double recurse(double a, double fa, double b, double fb, double m, double fm, double whole,
                 double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= max_depth) {
      if (!exhausted) {
        worst_a = a;
        worst_b = b;
      }
      exhausted = true;
      return left + right + delta / 15.0;
    }
    return recurse(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
           recurse(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  Simpson s{f, max_depth};
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double value = s.recurse(a, fa, b, fb, m, fm, whole, abs_tol, 0);
  if (s.exhausted || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << "adaptive Simpson on [" << a << ", " << b << "] did not reach tolerance " << abs_tol
        << " within depth " << max_depth << " (first unresolved panel [" << s.worst_a << ", "
        << s.worst_b << "])";
    fail(ErrorKind::Numerical, msg.str());
  }
  return value;
}

}  // namespace ssep
