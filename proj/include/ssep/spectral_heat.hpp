#pragma once

#include <span>
#include <vector>

#include "ssep/profile.hpp"

namespace ssep {

/// Scaling parameter n >= 2; the bulk is {1, ..., n-1}.
class LatticeSize {
 public:
  explicit LatticeSize(int n);
  int value() const { return n_; }
  int bulk() const { return n_ - 1; }
  friend bool operator==(LatticeSize, LatticeSize) = default;

 private:
  int n_;
};

/// Real function on {0, ..., n}; entries 0 and n are the boundary (ghost) values.
class DiscreteField {
 public:
  DiscreteField(LatticeSize n, std::vector<double> values);
  /// u0^n(x) = u0(x/n) in the bulk, rho at x = 0 and x = n.
  static DiscreteField sample(const ProfileSpec& profile, LatticeSize n);
  static DiscreteField from_bulk(std::span<const double> bulk, double boundary);

  LatticeSize size() const { return n_; }
  double operator[](int x) const { return values_[static_cast<std::size_t>(x)]; }
  std::span<const double> values() const { return values_; }
  std::span<const double> bulk() const { return std::span(values_).subspan(1, values_.size() - 2); }

 private:
  LatticeSize n_;
  std::vector<double> values_;
};

/// 4 n^2 sin^2(pi ell / 2n), ell in {1, ..., n-1}.
double eigenvalue(LatticeSize n, int ell);
/// sqrt(2) sin(pi ell x / n), x in {0, ..., n}.
double eigenfunction(LatticeSize n, int ell, int x);

/// (1/n) sum_{x in bulk} (u0(x) - rho) phi_ell(x). The field's ghost entries must equal rho.
double discrete_fourier_coeff(const DiscreteField& u0, double rho, int ell);
/// All coefficients ell = 1..n-1 at once through a fast sine transform.
std::vector<double> discrete_fourier_coeffs_fast(const DiscreteField& u0, double rho);

/// sqrt(2) * integral_0^1 (u0(x) - rho) sin(pi ell x) dx; closed form for sine kinds,
/// adaptive Simpson (absolute tolerance 1e-10) for tabulated profiles.
double continuum_fourier_coeff(const ProfileSpec& profile, int ell);

inline constexpr double kLeadingModeTol = 1e-9;

/// Smallest ell <= ell_max with |c_ell(u0)| > tol. Throws ErrorKind::Domain
/// ("no detectable mode") when there is none.
int find_leading_mode(const ProfileSpec& profile, int ell_max = 64, double tol = kLeadingModeTol);

/// Spectral solution of the semi-discrete heat equation d/dt u = Delta_n u
/// with boundary values rho.
class HeatSolution {
 public:
  HeatSolution(const ProfileSpec& profile, LatticeSize n);
  HeatSolution(const DiscreteField& u0, double rho);

  LatticeSize size() const { return n_; }
  double rho() const { return rho_; }
  std::span<const double> coeffs() const { return coeffs_; }  // index ell-1

  /// Direct O(n^2) spectral sum; the reference evaluation.
  DiscreteField at(double t) const;
  /// Same field through a fast sine transform.
  DiscreteField at_fast(double t) const;
  /// u_t - rho without adding rho back, for callers that need the small deviation exactly.
  DiscreteField deviation(double t) const;
  /// d/dt u_t = -sum lambda_ell c_ell e^{-lambda_ell t} phi_ell, zero at the boundary.
  DiscreteField time_derivative(double t) const;

 private:
  std::vector<double> evaluate(double t, bool derivative, double base) const;

  LatticeSize n_;
  double rho_;
  std::vector<double> coeffs_;
  std::vector<double> lambdas_;
  std::vector<double> sin_table_;  // sin(pi k / n), k in [0, 2n)
};

/// max_{x in 0..n-1} n |u(x+1) - u(x)|.
double discrete_gradient_sup(const DiscreteField& field);

struct CutoffTime {
  double t;
  bool clamped;  // the formula was negative and t was clamped to 0
};

/// log(n) / (2 pi^2 ell0^2) + b / (pi^2 ell0^2), clamped at 0.
CutoffTime cutoff_time(double n, int ell0, double b);

}  // namespace ssep
