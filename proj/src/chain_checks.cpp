#include "ssep/chain_checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ssep/error.hpp"
#include "ssep/exact_chain.hpp"
#include "ssep/product_measures.hpp"

namespace ssep::checks {
namespace {

DistributionVector initial_law(const ProfileSpec& p, LatticeSize n) {
  return product_distribution(BernoulliField::from_field(DiscreteField::sample(p, n)));
}

}  // namespace

double comparison_constant(double eps0, double kappa, double theta) {
  return std::max(2.0 / eps0, 1.0 / theta) * std::exp(1.0 + kappa / (eps0 * eps0));
}

CheckResult comparison_lemma(const ProfileSpec& profile, std::span<const int> ns, int samples,
                             std::uint64_t seed, ComparisonScan* scan) {
  require(samples >= 1, ErrorKind::Domain, "need at least one sample");
  CheckResult r{"comparison_lemma", true, INFINITY, {}};
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0, bound_min = INFINITY;
  for (int n : ns) {
    require(n >= 3 && n <= 13, ErrorKind::Size, "comparison scan needs 3 <= n <= 13");
    const LatticeSize size(n);
    const auto nu = initial_law(profile, size);
    const double theta = default_theta(size, profile.rho());
    const double bound = comparison_constant(profile.eps0(), profile.kappa(), theta);
    bound_min = std::min(bound_min, bound);
    double max_ratio = 0.0;
    std::vector<double> f(nu.space().size());
    for (int k = 0; k < samples; ++k) {
      // alternate Gaussian and log-normal test functions
      for (auto& v : f) v = k % 2 ? std::exp(normal(gen)) : normal(gen);
      const auto forms = dirichlet_forms(f, nu, theta);
      for (int l = 2; l < n; ++l) max_ratio = std::max(max_ratio, forms.site[l - 1] / (n * forms.total));
    }
    worst = std::max(worst, max_ratio);
    r.margin = std::min(r.margin, bound - max_ratio);
    r.pass = r.pass && max_ratio <= bound;
    if (scan) {
      scan->ns.push_back(n);
      scan->max_ratio.push_back(max_ratio);
    }
  }
  std::ostringstream d;
  d << "max D_l/(n D) = " << worst << ", proof constant >= " << bound_min;
  r.detail = d.str();
  return r;
}

CheckResult correlation_bound(const ProfileSpec& profile, std::span<const int> ns,
                              std::span<const double> times) {
  CheckResult r{"correlation_bound", true, INFINITY, {}};
  const double k2 = profile.kappa() * profile.kappa() / (profile.eps0() * profile.eps0());
  double worst_scaled = 0.0;
  for (int n : ns) {
    require(n >= 3 && n <= 11, ErrorKind::Size, "correlation check needs 3 <= n <= 11");
    const LatticeSize size(n);
    const GeneratorSpec g(size, profile.rho());
    const HeatSolution heat(profile, size);
    const auto mu0 = initial_law(profile, size);
    for (double t : times) {
      const auto corr = omega_correlations(forward_evolve(g, mu0, t), heat.at(t));
      for (double c : corr) {
        r.margin = std::min(r.margin, k2 / n - std::abs(c));
        worst_scaled = std::max(worst_scaled, std::abs(c) * n / k2);
      }
    }
  }
  r.pass = r.margin >= 0.0;
  std::ostringstream d;
  d << "max |E[omega omega]| / (kappa^2/(eps0^2 n)) = " << worst_scaled;
  r.detail = d.str();
  return r;
}

CheckResult adjoint_identity(std::span<const ProfileSpec> profiles, std::span<const int> ns,
                             std::span<const double> times, double tol) {
  CheckResult r{"adjoint_identity", true, INFINITY, {}};
  double worst = 0.0;
  for (const auto& p : profiles) {
    for (int n : ns) {
      const LatticeSize size(n);
      const GeneratorSpec g(size, p.rho());
      const HeatSolution heat(p, size);
      for (double t : times) worst = std::max(worst, adjoint_identity_check(g, heat.at(t), heat.time_derivative(t)));
    }
  }
  r.margin = tol - worst;
  r.pass = worst <= tol;
  std::ostringstream d;
  d << "max residual " << worst;
  r.detail = d.str();
  return r;
}

CheckResult yau_inequality(const ProfileSpec& profile, std::span<const int> ns,
                           std::span<const double> times, double step, double slack) {
  CheckResult r{"yau_inequality", true, INFINITY, {}};
  int unreliable = 0;
  double worst = -INFINITY;
  for (int n : ns) {
    const GeneratorSpec g(LatticeSize(n), profile.rho());
    for (const auto& c : entropy_derivative_fd(g, profile, times, step, slack)) {
      if (!c.fd.reliable) {
        ++unreliable;
        continue;
      }
      const double excess = c.fd.value - c.point.yau.rhs;
      worst = std::max(worst, excess);
      r.margin = std::min(r.margin, slack - excess);
    }
  }
  r.pass = unreliable == 0 && r.margin >= 0.0;
  std::ostringstream d;
  d << "max (dH/dt - rhs) = " << worst << ", unreliable differences " << unreliable;
  r.detail = d.str();
  return r;
}

CheckResult ls_floor(std::span<const ProfileSpec> profiles, std::span<const int> ns, int restarts,
                     std::uint64_t seed, double keep, LsFloor* floor) {
  require(!ns.empty() && !profiles.empty(), ErrorKind::Domain, "log-Sobolev scan needs profiles and sizes");
  CheckResult r{"ls_floor", true, INFINITY, {}};
  LsFloor local;
  local.ns.assign(ns.begin(), ns.end());
  std::ostringstream d;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    std::vector<double> row;
    std::vector<bool> conv;
    for (int n : ns) {
      const LatticeSize size(n);
      const auto u = BernoulliField::from_field(DiscreteField::sample(p, size));
      const auto res = ls_ratio_minimize(u, default_theta(size, p.rho()), restarts, seed + n);
      row.push_back(res.scaled);
      conv.push_back(res.converged);
      r.pass = r.pass && res.scaled > 0.0;
    }
    const double ratio = row.back() / row.front();
    r.margin = std::min(r.margin, ratio - keep);
    r.pass = r.pass && ratio >= keep;
    d << (i ? "; " : "") << "profile " << i << ": " << row.front() << " -> " << row.back();
    local.scaled.push_back(std::move(row));
    local.converged.push_back(std::move(conv));
  }
  r.detail = d.str();
  if (floor) *floor = std::move(local);
  return r;
}

}  // namespace ssep::checks
