#pragma once

#include <span>
#include <vector>

#include "ssep/check.hpp"
#include "ssep/profile.hpp"

// Appendix-style estimates on the discrete heat equation as checkable predicates.
namespace ssep::lemmas {

/// lambda_ell / lambda_ell0 >= ell / ell0 for all 2 <= n <= n_max and
/// ell0 <= min(ell, n/2), with 1e-12 slack.
CheckResult eigenvalue_ratio(int n_min, int n_max);

/// lambda_1 >= 3 pi^2 / 4 and |lambda_ell / (pi ell)^2 - 1| <= (pi ell)^2 / (12 n^2).
CheckResult eigenvalue_bounds(int n_min, int n_max);

/// n |u_t(x+1) - u_t(x)| <= 8 pi exp(-lambda_1 t) for t >= log 2 / lambda_1.
CheckResult gradient_decay(const ProfileSpec& profile, std::span<const int> ns, int time_points);

/// |c_ell^n - c_ell| <= C / n for ell <= ell_max, with C = sqrt(2) (kappa + pi ell |u0 - rho|_inf) / 2.
/// `fitted` receives max_n n |c_ell^n - c_ell|.
CheckResult riemann_error(const ProfileSpec& profile, std::span<const int> ns, int ell_max,
                          double* fitted = nullptr);

/// sup over x and b of |sqrt(n)(u_{t^n(b)}(x) - rho) - c_ell0 e^{-b} phi_ell0(x)| strictly
/// decreasing along `ns`. `errors` receives the per-n suprema.
CheckResult leading_mode_asymptotics(const ProfileSpec& profile, std::span<const int> ns,
                                     std::span<const double> bs, std::vector<double>* errors = nullptr);

/// u_t stays inside [eps0 - 1e-9, 1 - eps0 + 1e-9] for every sampled t.
CheckResult maximum_principle(const ProfileSpec& profile, std::span<const int> ns,
                              std::span<const double> times);

}  // namespace ssep::lemmas
