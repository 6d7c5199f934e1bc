#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssep/profile.hpp"
#include "ssep/spectral_heat.hpp"

namespace ssep {

/// Site densities p(x) in (0,1) for x in the bulk {1, ..., n-1}; stored 0-based.
class BernoulliField {
 public:
  BernoulliField(LatticeSize n, std::vector<double> p);
  static BernoulliField constant(LatticeSize n, double rho);
  /// Bulk values of a density field.
  static BernoulliField from_field(const DiscreteField& u);

  LatticeSize size() const { return n_; }
  int sites() const { return n_.bulk(); }
  double operator[](int i) const { return p_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const { return p_; }
  bool is_constant(double rho) const;

  /// Probability of the configuration whose bit i is the occupation of site i+1
  /// (requires at most 63 sites).
  double mass(std::uint64_t state) const;

 private:
  LatticeSize n_;
  std::vector<double> p_;
};

/// log(nu_u / nu_rho)(eta) = sum_x a(x)(eta_x - rho) - bsum.
struct LLRCoefficients {
  std::vector<double> a;
  double bsum = 0.0;
  double s = 0.0;  // sqrt(rho(1-rho) sum a^2)
};

LLRCoefficients llr_coefficients(const BernoulliField& u, double rho);

/// || N(m,1) - N(0,1) ||_TV by adaptive quadrature of (1/2) E|e^{mX - m^2/2} - 1|.
double gaussian_profile(double m);

/// Exact total variation between nu_u and nu_rho by enumeration (at most 22 sites).
double tv_exact_enum(const BernoulliField& u, double rho);

/// Law of the rounded log-likelihood ratio under nu_rho on a lattice of spacing h.
struct GridDistribution {
  double origin = 0.0;   // value of the first cell
  double spacing = 0.0;  // h
  std::vector<double> mass;
  double lost_mass = 0.0;       // mass that left the sliding window (exactly accounted)
  double rounding_bound = 0.0;  // sup |L - L_grid| from per-site rounding of a(x)
};

struct TvEstimate {
  double value = 0.0;
  double error_bound = 0.0;  // |value - TV| <= error_bound (certified)
  int bins = 0;              // window resolution actually used
};

inline constexpr int kDefaultGridBins = 1 << 16;
inline constexpr double kDefaultGridTol = 1e-4;

/// Total variation through the lattice law of the log-likelihood ratio.
///
/// The value is the total variation between the laws of the grid statistic under the
/// two measures, a lower bound by data processing. The error bound adds the mass lost
/// outside the sliding window to a second-order term controlled by the per-site
/// rounding of a(x) and the Hoeffding tail of the rounding residual. The resolution
/// doubles from `bins` until the bound is <= `tol`; past `max_bins` a numerical error
/// reports the best achievable bound.
TvEstimate tv_grid_dp(const BernoulliField& u, double rho, int bins = kDefaultGridBins,
                      double tol = kDefaultGridTol, int max_bins = 1 << 22);

GridDistribution llr_distribution(const BernoulliField& u, double rho, int bins = kDefaultGridBins);

struct McEstimate {
  double value = 0.0;
  double ci95 = 0.0;  // half-width, normal approximation
  std::uint64_t samples = 0;
  double psi_cap = 0.0;  // deterministic sup of psi (uniform integrability sanity cap)
};

/// (1/2) E_{nu_rho} |psi - 1| by sampling. Samples are split into fixed chunks with
/// their own streams and reduced in order, so the result is independent of `workers`.
McEstimate tv_monte_carlo(const BernoulliField& u, double rho, std::uint64_t samples,
                          std::uint64_t seed, int workers = 1);

/// sum_x u log(u/v) + (1-u) log((1-u)/(1-v)).
double product_relative_entropy(const BernoulliField& u, const BernoulliField& v);

/// |c_ell0(u0)| / sqrt(rho(1-rho)).
double gamma_const(const ProfileSpec& profile);

/// True iff 2 tv^2 <= entropy + 1e-12.
bool pinsker_gap(double tv, double entropy);

/// sum a^4 / s^4, the fourth-moment Lyapunov ratio of the statistic.
double lyapunov_ratio(const LLRCoefficients& c);

}  // namespace ssep
