#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssep/check.hpp"
#include "ssep/profile.hpp"

// Inequalities and identities of the entropy method, checked on the exact chain.
namespace ssep::checks {

/// Constant of the comparison lemma as produced by its proof,
/// max(2/eps0, 1/theta) exp(1 + kappa/eps0^2).
double comparison_constant(double eps0, double kappa, double theta);

struct ComparisonScan {
  std::vector<int> ns;
  std::vector<double> max_ratio;  // per n: max over l in {2..n-1} and samples of D_l(f) / (n D(f))
};

/// D_l(f) <= C n D(f) under nu = product(u0^n) for random f, every l in {2, ..., n-1}.
/// Passes when every sampled ratio stays below the proof constant.
CheckResult comparison_lemma(const ProfileSpec& profile, std::span<const int> ns, int samples,
                             std::uint64_t seed, ComparisonScan* scan = nullptr);

/// |E_{mu_t}[omega_x omega_{x+1}]| <= kappa^2 / (eps0^2 n) on all bulk edges (n <= 10).
CheckResult correlation_bound(const ProfileSpec& profile, std::span<const int> ns,
                              std::span<const double> times);

/// Residual of L*1 - d/dt log psi + sum n^2 (grad u)^2 omega omega below `tol`.
CheckResult adjoint_identity(std::span<const ProfileSpec> profiles, std::span<const int> ns,
                             std::span<const double> times, double tol = 1e-8);

/// Finite-difference dH/dt <= Yau right side + slack at every time. An unreliable
/// difference (Richardson mismatch) fails the check rather than being compared.
CheckResult yau_inequality(const ProfileSpec& profile, std::span<const int> ns,
                           std::span<const double> times, double step = 1e-4, double slack = 1e-6);

struct LsFloor {
  std::vector<int> ns;
  std::vector<std::vector<double>> scaled;  // [profile][n]: n^2 times the best ratio found
  std::vector<std::vector<bool>> converged;
};

/// Scaled log-Sobolev ratios over profiles and n. Passes when every value is positive
/// and the last n keeps at least `keep` of the first n's value, per profile.
CheckResult ls_floor(std::span<const ProfileSpec> profiles, std::span<const int> ns, int restarts,
                     std::uint64_t seed, double keep = 0.5, LsFloor* floor = nullptr);

}  // namespace ssep::checks
