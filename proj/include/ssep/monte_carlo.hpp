#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ssep/configuration.hpp"
#include "ssep/profile.hpp"
#include "ssep/rng.hpp"
#include "ssep/spectral_heat.hpp"

// Continuous-time simulation of the exclusion process with reservoirs.
//
// The boundary is realised as a resampling clock: at rate n^2 a boundary site is
// redrawn from Bernoulli(rho). From a hole this injects at rate n^2 rho, from a particle
// it removes at rate n^2 (1 - rho), which are the reservoir rates. All event rates are
// then state independent, so one clock of rate n^2 (n-2) + 2 n^2 drives the chain and
// the number of events on [0, t] is Poisson.
namespace ssep {

struct SimConfig {
  SimConfig(LatticeSize n, ProfileSpec profile, double horizon, std::uint64_t replicas, std::uint64_t seed,
            int workers = 1);
  LatticeSize n;
  ProfileSpec profile;
  double rho;
  double horizon;
  std::uint64_t replicas;
  std::uint64_t seed;
  int workers;
  /// Total clock rate n^2 (n-2) + 2 n^2.
  double clock_rate() const;
};

/// Independent Bernoulli(u0(x/n)) occupations.
Configuration sample_initial(const ProfileSpec& profile, LatticeSize n, Rng& rng);
Configuration sample_initial(const ProfileSpec& profile, LatticeSize n, std::uint64_t seed);

/// Advances eta by time t (exact in law); returns the number of clock events.
std::uint64_t simulate_to(Configuration& eta, double rho, double t, Rng& rng);

struct OccupationStats {
  double t = 0.0;
  std::vector<double> mean;        // per site, x = 1..n-1 at index x-1
  std::vector<double> variance;    // sample variance of eta_t(x)
  std::vector<double> omega_mean;  // per edge x = 1..n-2, mean of omega_x omega_{x+1} against u_t
  std::vector<double> omega_se;
  std::uint64_t replicas = 0;
  double events_per_replica = 0.0;
  double mean_se(int i) const;
};

/// Statistics at each of the sorted times; replica k uses stream (seed, k) throughout,
/// and replicas are reduced in fixed chunks, so results do not depend on `workers`.
std::vector<OccupationStats> estimate_occupation(const SimConfig& cfg, std::span<const double> times);

struct StatisticTv {
  double estimate = 0.0;  // bias-corrected histogram distance (may be slightly negative)
  double raw = 0.0;       // histogram distance before correction
  double se = 0.0;        // delta-method standard error
  int bins = 0;
  bool widened = false;   // bins were merged because of too few samples per bin
  static constexpr const char* kLabel = "estimated lower bound (non-rigorous)";
};

/// Distance between the laws of S = n^{-1/2} sum phi_ell0(x)(eta(x) - rho) under mu_t and
/// under nu_bar_rho (a reference sample of the same size), an estimated lower bound on
/// D_n(t) by data processing. bins = 0 selects Freedman-Diaconis on the reference sample.
StatisticTv tv_lower_bound_statistic(const SimConfig& cfg, double t, int ell0, int bins = 0);

/// Off-diagonal rates of the resampling mechanism, row-major 2^{n-1} x 2^{n-1}
/// (n-1 <= 10), derived symbolically from the event slots.
std::vector<double> resampling_rate_matrix(LatticeSize n, double rho);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit of counts against probabilities; cells with expected count
/// below `min_expected` are pooled.
ChiSquare chi_square_gof(std::span<const double> counts, std::span<const double> probs, double min_expected = 5.0);

}  // namespace ssep
