#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ssep {

enum class ProfileKind { Constant, SingleSine, SineMixture, Tabulated };

// Class parameters of a macroscopic profile. NaN means "derive the tightest
// admissible value from the profile itself".
struct ClassBounds {
  double eps0 = std::numeric_limits<double>::quiet_NaN();
  double kappa = std::numeric_limits<double>::quiet_NaN();
};

/// Initial macroscopic density u0 : [0,1] -> (0,1) with u0(0) = u0(1) = rho.
///
/// Construction validates class membership: eps0 <= u0 <= 1 - eps0 and
/// |u0'| <= kappa on a dense grid (exactly, for tabulated profiles), with
/// eps0 in (0, min(rho, 1 - rho)] and kappa > 0. Violations throw
/// ErrorKind::Config.
class ProfileSpec {
 public:
  static ProfileSpec constant(double rho, ClassBounds bounds = {});
  /// rho + amplitude * sin(pi * mode * x)
  static ProfileSpec single_sine(double rho, double amplitude, int mode, ClassBounds bounds = {});
  /// rho + sum_k amplitudes[k-1] * sin(pi * k * x)
  static ProfileSpec sine_mixture(double rho, std::vector<double> amplitudes,
                                  ClassBounds bounds = {});
  /// Piecewise-linear interpolant of `values` on the uniform knots i/(N-1).
  static ProfileSpec tabulated(double rho, std::vector<double> values, ClassBounds bounds = {});

  ProfileKind kind() const { return kind_; }
  double rho() const { return rho_; }
  double eps0() const { return eps0_; }
  double kappa() const { return kappa_; }

  double operator()(double x) const;
  double derivative(double x) const;

  /// Sine amplitudes by mode (index 0 is mode 1); empty for non-sine kinds.
  std::span<const double> sine_amplitudes() const { return amplitudes_; }
  std::span<const double> table() const { return table_; }

  /// Largest |u0'| (dense-grid maximum for sine kinds, exact for tabulated).
  double slope_sup() const;
  /// min over [0,1] of min(u0, 1 - u0).
  double distance_to_walls() const;

  std::string describe() const;

 private:
  ProfileSpec() = default;
  void finalize(ClassBounds bounds);

  ProfileKind kind_ = ProfileKind::Constant;
  double rho_ = 0.5;
  double eps0_ = 0.0;
  double kappa_ = 0.0;
  std::vector<double> amplitudes_;
  std::vector<double> table_;
};

}  // namespace ssep
