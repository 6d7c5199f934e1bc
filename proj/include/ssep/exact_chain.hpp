#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssep/product_measures.hpp"
#include "ssep/spectral_heat.hpp"

// Exact analysis of the exclusion process with reservoirs on small lattices.
// States are indexed by their bit pattern: bit x-1 holds eta(x).
namespace ssep {

inline constexpr int kMaxChainSites = 22;

/// Omega_n = {0,1}^{n-1}; requires 3 <= n and n-1 <= 22. n = 2 is refused because the
/// boundary set {1, n-1} collapses to a single site.
class StateSpace {
 public:
  explicit StateSpace(LatticeSize n);
  LatticeSize lattice() const { return n_; }
  int sites() const { return n_.bulk(); }
  std::size_t size() const { return std::size_t{1} << sites(); }
  friend bool operator==(const StateSpace&, const StateSpace&) = default;

 private:
  LatticeSize n_;
};

/// Probability vector over Omega_n (nonnegative, total mass 1 within 1e-12).
class DistributionVector {
 public:
  DistributionVector(StateSpace space, std::vector<double> mass);
  const StateSpace& space() const { return space_; }
  std::span<const double> mass() const { return mass_; }
  double operator[](std::size_t s) const { return mass_[s]; }
  /// P(eta(x) = 1), x in 1..n-1.
  double marginal(int x) const;

 private:
  StateSpace space_;
  std::vector<double> mass_;
};

/// Generator L_n with speed n^2 on both the exchange and the reservoir part.
struct GeneratorSpec {
  GeneratorSpec(LatticeSize n, double rho);
  LatticeSize n;
  double rho;
  double speed() const { return double(n.value()) * n.value(); }
  /// Uniformization rate n^2 (n-2) + 2 n^2 max(rho, 1-rho).
  double dominating_rate() const;
};

/// (L_n f)(eta) for every state.
std::vector<double> generator_apply(const GeneratorSpec& g, std::span<const double> f);
/// Forward action L_n^dagger mu, so that d/dt mu_t = L_n^dagger mu_t.
std::vector<double> generator_forward_apply(const GeneratorSpec& g, std::span<const double> mu);

struct EvolveOptions {
  double tail_tol = 1e-16;  // Poisson tail mass at which the series is truncated
};

/// exp(t L^dagger) v for a signed vector v by uniformization. `truncation` receives the
/// certified l1 bound on the neglected tail.
std::vector<double> evolve_signed(const GeneratorSpec& g, std::span<const double> v, double t,
                                  EvolveOptions opts = {}, double* truncation = nullptr);

/// Law at time t. The Poisson weights are renormalised after truncation, so total mass is
/// preserved exactly and stationary vectors stay fixed.
DistributionVector forward_evolve(const GeneratorSpec& g, const DistributionVector& mu0, double t,
                                  double* truncation = nullptr);

DistributionVector product_distribution(const BernoulliField& u);

double tv_distance(const DistributionVector& mu, const DistributionVector& nu);

/// sum mu log(mu / nu); nu must be strictly positive.
double relative_entropy_H(const DistributionVector& mu, const DistributionVector& nu);

/// H from the relative deviation r = mu/nu - 1, accurate when r is tiny.
double relative_entropy_from_deviation(std::span<const double> nu, std::span<const double> r);

/// integral of Gamma_n h d nu by the explicit move sum.
double gamma_integral(const GeneratorSpec& g, std::span<const double> h, const DistributionVector& nu);
/// The same quantity as integral of (L h^2 - 2 h L h) d nu.
double gamma_integral_generator(const GeneratorSpec& g, std::span<const double> h, const DistributionVector& nu);
/// integral of Gamma_n sqrt(f) d nu for a nonnegative f.
double carre_du_champ_integral(const GeneratorSpec& g, std::span<const double> f, const DistributionVector& nu);

struct DirichletForms {
  std::vector<double> site;  // D_x, x = 1..n-1 (index x-1)
  std::vector<double> edge;  // D_{x,x+1}, x = 1..n-2 (index x-1)
  double total = 0.0;        // (theta/n) D_1 + sum of edge forms
};

/// theta = n min(rho, 1-rho).
double default_theta(LatticeSize n, double rho);

DirichletForms dirichlet_forms(std::span<const double> f, const DistributionVector& nu, double theta);

/// E_mu[omega_x omega_{x+1}] for x = 1..n-2, omega_x = (eta(x) - u(x)) / (u(x)(1 - u(x))).
std::vector<double> omega_correlations(const DistributionVector& mu, const DiscreteField& u);

struct YauTerms {
  double gamma = 0.0;  // integral of Gamma_n sqrt(f) d nu_t
  double omega = 0.0;  // sum n^2 (grad u)^2 E_mu[omega_x omega_{x+1}]
  double rhs = 0.0;    // -gamma - omega
};

/// Right side of Yau's inequality at the law mu_t with reference nu_t = product(u_t).
YauTerms yau_rhs(const GeneratorSpec& g, const DistributionVector& mu, const DiscreteField& u_t);

/// L*_{n,t} g, the adjoint of L_n in L^2(nu_t).
std::vector<double> adjoint_apply(const GeneratorSpec& g, const DistributionVector& nu_t,
                                  std::span<const double> h);

/// max over eta of |L*_{n,t} 1 - d/dt log psi_t + sum n^2 (grad u_t)^2 omega_x omega_{x+1}|,
/// both sides evaluated from their definitions; du_dt must be the exact time derivative.
double adjoint_identity_check(const GeneratorSpec& g, const DiscreteField& u_t, const DiscreteField& du_dt);

struct LsOptions {
  int max_iter = 2000;
  double rel_tol = 1e-9;  // stop when the ratio improves by less than this per iteration
  double min_entropy = 1e-12;
};

struct LsResult {
  double ratio = 0.0;               // best D(sqrt f) / H(f) found (an upper bound on the infimum)
  double scaled = 0.0;              // n^2 ratio
  std::vector<double> density;      // argmin f, normalised so that integral f d nu = 1
  std::vector<double> start_ratios; // best ratio per start
  bool converged = false;           // every start met the stopping rule
};

/// Searches for inf over densities of D(sqrt f) / H_nu(f) with nu = product(u).
/// Parameterised by g = sqrt f >= 0 (the ratio is scale invariant); nu-preconditioned
/// projected gradient steps with Armijo backtracking, from structured starts (spikes,
/// two-state mixtures, small linear perturbations of f = 1) plus `restarts` random ones.
/// Requires n - 1 <= 12.
LsResult ls_ratio_minimize(const BernoulliField& u, double theta, int restarts, std::uint64_t seed,
                           LsOptions opts = {});

/// H_nu(f) / integral of Gamma_n sqrt(f) d nu, the inverse log-Sobolev quotient for one density.
double ls_quotient(const GeneratorSpec& g, std::span<const double> f, const DistributionVector& nu);

struct TrajectoryPoint {
  double t = 0.0;
  double entropy = 0.0;     // H_{nu_t}(f_t)
  double tv_chain = 0.0;    // D_n(t) = || mu_t - nu_bar ||
  double tv_product = 0.0;  // || nu_t - nu_bar ||
  YauTerms yau;
  double dHdt = 0.0;        // exact derivative of H along the trajectory
  double truncation = 0.0;  // accumulated uniformization tail bound
  bool triangle_ok = false; // |tv_chain - tv_product| <= sqrt(H/2) + 1e-10
};

/// Exact trajectory from mu_0 = nu_0 = product(u_0^n) at the sorted times. The deviation
/// mu_t - nu_bar is evolved directly, so H stays accurate when it is far below
/// machine epsilon relative to the masses.
std::vector<TrajectoryPoint> entropy_trajectory(const GeneratorSpec& g, const ProfileSpec& profile,
                                                std::span<const double> times);

struct FdDerivative {
  double value = 0.0;       // Richardson-extrapolated central difference
  double mismatch = 0.0;    // |D(h) - D(h/2)|
  bool reliable = false;
};

struct FdCheck {
  double t = 0.0;
  FdDerivative fd;
  TrajectoryPoint point;  // exact quantities at t
};

/// Central differences of H with steps `step` and `step/2` at each time (all > step).
/// A mismatch above 10 tol marks the difference unreliable instead of reporting it.
std::vector<FdCheck> entropy_derivative_fd(const GeneratorSpec& g, const ProfileSpec& profile,
                                           std::span<const double> times, double step, double tol = 1e-6);

}  // namespace ssep
