#include "ssep/heat_lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ssep/spectral_heat.hpp"

namespace ssep::lemmas {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> spectrum(int n) {
  std::vector<double> lam(static_cast<std::size_t>(n));
  for (int ell = 1; ell < n; ++ell) lam[ell] = eigenvalue(LatticeSize(n), ell);
  return lam;
}

}  // namespace

CheckResult eigenvalue_ratio(int n_min, int n_max) {
  CheckResult r{"eigenvalue_ratio", true, kInf, {}};
  int worst_n = 0, worst_l0 = 0, worst_l = 0;
  for (int n = std::max(n_min, 2); n <= n_max; ++n) {
    const auto lam = spectrum(n);
    for (int l0 = 1; 2 * l0 <= n && l0 < n; ++l0) {
      for (int l = l0; l < n; ++l) {
        const double slack = lam[l] / lam[l0] - double(l) / l0;
        if (slack < r.margin) {
          r.margin = slack;
          worst_n = n, worst_l0 = l0, worst_l = l;
        }
      }
    }
  }
  r.pass = r.margin >= -1e-12;
  std::ostringstream d;
  d << "n in [" << n_min << "," << n_max << "], tightest at n=" << worst_n << " ell0=" << worst_l0
    << " ell=" << worst_l;
  r.detail = d.str();
  return r;
}

CheckResult eigenvalue_bounds(int n_min, int n_max) {
  CheckResult r{"eigenvalue_bounds", true, kInf, {}};
  double gap_margin = kInf, ratio_margin = kInf;
  for (int n = std::max(n_min, 2); n <= n_max; ++n) {
    const auto lam = spectrum(n);
    gap_margin = std::min(gap_margin, lam[1] - 0.75 * kPi * kPi);
    for (int l = 1; l < n; ++l) {
      const double pl2 = kPi * kPi * l * l;
      const double bound = pl2 / (12.0 * n * n);
      ratio_margin = std::min(ratio_margin, bound - std::abs(lam[l] / pl2 - 1.0) + 1e-12);
    }
  }
  r.margin = std::min(gap_margin, ratio_margin);
  r.pass = gap_margin >= 0.0 && ratio_margin >= 0.0;
  std::ostringstream d;
  d << "min lambda_1 - 3pi^2/4 = " << gap_margin << "; min ratio slack = " << ratio_margin;
  r.detail = d.str();
  return r;
}

CheckResult gradient_decay(const ProfileSpec& profile, std::span<const int> ns, int time_points) {
  CheckResult r{"gradient_decay", true, kInf, {}};
  double worst_ratio = 0.0, sharp_ratio = 0.0;
  for (int n : ns) {
    const LatticeSize size(n);
    const HeatSolution sol(profile, size);
    const double lam1 = eigenvalue(size, 1);
    const double t0 = std::log(2.0) / lam1;
    for (int k = 0; k < time_points; ++k) {
      const double t = t0 * (1.0 + 0.5 * k);
      const double grad = discrete_gradient_sup(sol.at(t));
      const double bound = 8.0 * kPi * std::exp(-lam1 * t);
      r.margin = std::min(r.margin, bound - grad);
      worst_ratio = std::max(worst_ratio, grad / bound);
      // Sharper variant with pi^2 in place of lambda_1: reported, never asserted.
      sharp_ratio = std::max(sharp_ratio, grad / (8.0 * kPi * std::exp(-kPi * kPi * t)));
    }
  }
  r.pass = r.margin >= 0.0;
  std::ostringstream d;
  d << "max grad/bound = " << worst_ratio << "; with pi^2 rate: " << sharp_ratio;
  r.detail = d.str();
  return r;
}

CheckResult riemann_error(const ProfileSpec& profile, std::span<const int> ns, int ell_max,
                          double* fitted) {
  CheckResult r{"riemann_error", true, kInf, {}};
  double sup_dev = 0.0;
  const auto table_n = 8192;
  for (int i = 0; i <= table_n; ++i) sup_dev = std::max(sup_dev, std::abs(profile(double(i) / table_n) - profile.rho()));
  double c_fit = 0.0;
  double c_bound = 0.0;
  for (int l = 1; l <= ell_max; ++l)
    c_bound = std::max(c_bound, std::numbers::sqrt2 * (profile.kappa() + kPi * l * sup_dev) / 2.0);
  std::vector<double> cont(static_cast<std::size_t>(ell_max) + 1);
  for (int l = 1; l <= ell_max; ++l) cont[l] = continuum_fourier_coeff(profile, l);
  for (int n : ns) {
    if (n <= ell_max) continue;
    const auto u0 = DiscreteField::sample(profile, LatticeSize(n));
    double worst = 0.0;
    for (int l = 1; l <= ell_max; ++l)
      worst = std::max(worst, std::abs(discrete_fourier_coeff(u0, profile.rho(), l) - cont[l]));
    c_fit = std::max(c_fit, n * worst);
    r.margin = std::min(r.margin, c_bound - n * worst);
  }
  r.pass = r.margin >= 0.0;
  if (fitted) *fitted = c_fit;
  std::ostringstream d;
  d << "fitted C = " << c_fit << " (bound " << c_bound << ")";
  r.detail = d.str();
  return r;
}

CheckResult leading_mode_asymptotics(const ProfileSpec& profile, std::span<const int> ns,
                                     std::span<const double> bs, std::vector<double>* errors) {
  CheckResult r{"leading_mode_asymptotics", true, kInf, {}};
  const int l0 = find_leading_mode(profile);
  const double c0 = continuum_fourier_coeff(profile, l0);
  std::vector<double> sup_err;
  for (int n : ns) {
    const LatticeSize size(n);
    const HeatSolution sol(profile, size);
    const double sqn = std::sqrt(double(n));
    double worst = 0.0;
    for (double b : bs) {
      const auto u = sol.at(cutoff_time(n, l0, b).t);
      for (int x = 1; x < n; ++x)
        worst = std::max(worst, std::abs(sqn * (u[x] - profile.rho()) -
                                         c0 * std::exp(-b) * eigenfunction(size, l0, x)));
    }
    sup_err.push_back(worst);
  }
  std::ostringstream d;
  d << "sup errors:";
  for (std::size_t i = 0; i < sup_err.size(); ++i) {
    d << ' ' << sup_err[i];
    if (i > 0) r.margin = std::min(r.margin, sup_err[i - 1] - sup_err[i]);
  }
  r.pass = sup_err.size() < 2 || r.margin > 0.0;
  r.detail = d.str();
  if (errors) *errors = std::move(sup_err);
  return r;
}

CheckResult maximum_principle(const ProfileSpec& profile, std::span<const int> ns,
                              std::span<const double> times) {
  CheckResult r{"maximum_principle", true, kInf, {}};
  const double eps = profile.eps0() - 1e-9;
  for (int n : ns) {
    const HeatSolution sol(profile, LatticeSize(n));
    for (double t : times) {
      const auto u = sol.at(t);
      for (int x = 1; x < n; ++x) r.margin = std::min({r.margin, u[x] - eps, 1.0 - eps - u[x]});
    }
  }
  r.pass = r.margin >= 0.0;
  std::ostringstream d;
  d << "eps' = " << eps;
  r.detail = d.str();
  return r;
}

}  // namespace ssep::lemmas
