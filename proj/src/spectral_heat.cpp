#include "ssep/spectral_heat.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "ssep/error.hpp"
#include "ssep/quadrature.hpp"

namespace ssep {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kBoundarySlack = 1e-12;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place DST-I: y_k = 2 sum_j x_j sin(pi (j+1)(k+1) / (N+1)).
void dst1(std::vector<double>& data) {
  const int len = static_cast<int>(data.size());
  std::vector<double> out(data.size());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_r2r_1d(len, data.data(), out.data(), FFTW_RODFT00, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  data.swap(out);
}

void check_ghosts(const DiscreteField& u, double rho) {
  const int n = u.size().value();
  if (std::abs(u[0] - rho) > kBoundarySlack || std::abs(u[n] - rho) > kBoundarySlack) {
    std::ostringstream msg;
    msg << "field boundary values (" << u[0] << ", " << u[n] << ") differ from rho = " << rho;
    fail(ErrorKind::Domain, msg.str());
  }
}

void check_mode(LatticeSize n, int ell) {
  if (ell < 1 || ell > n.bulk()) {
    std::ostringstream msg;
    msg << "mode index " << ell << " outside {1, ..., " << n.bulk() << "}";
    fail(ErrorKind::Domain, msg.str());
  }
}

}  // namespace

LatticeSize::LatticeSize(int n) : n_(n) {
  if (n < 2) fail(ErrorKind::Domain, "lattice scaling parameter n must be >= 2, got " + std::to_string(n));
}

DiscreteField::DiscreteField(LatticeSize n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  require(values_.size() == static_cast<std::size_t>(n.value()) + 1, ErrorKind::Domain,
          "discrete field needs n+1 entries");
  for (double v : values_) require(std::isfinite(v), ErrorKind::Domain, "discrete field has a non-finite entry");
}

DiscreteField DiscreteField::sample(const ProfileSpec& profile, LatticeSize n) {
  std::vector<double> v(static_cast<std::size_t>(n.value()) + 1);
  v.front() = v.back() = profile.rho();
  for (int x = 1; x < n.value(); ++x) v[x] = profile(double(x) / n.value());
  return DiscreteField(n, std::move(v));
}

DiscreteField DiscreteField::from_bulk(std::span<const double> bulk, double boundary) {
  std::vector<double> v;
  v.reserve(bulk.size() + 2);
  v.push_back(boundary);
  v.insert(v.end(), bulk.begin(), bulk.end());
  v.push_back(boundary);
  return DiscreteField(LatticeSize(static_cast<int>(bulk.size()) + 1), std::move(v));
}

double eigenvalue(LatticeSize n, int ell) {
  check_mode(n, ell);
  const double nn = n.value();
  const double s = std::sin(kPi * ell / (2.0 * nn));
  return 4.0 * nn * nn * s * s;
}

double eigenfunction(LatticeSize n, int ell, int x) {
  if (x < 0 || x > n.value()) {
    std::ostringstream msg;
    msg << "site " << x << " outside {0, ..., " << n.value() << "}";
    fail(ErrorKind::Domain, msg.str());
  }
  if (x == 0 || x == n.value()) return 0.0;
  // Reduce the phase exactly in integers before calling sin.
  const long long k = (static_cast<long long>(ell) * x) % (2LL * n.value());
  return kSqrt2 * std::sin(kPi * static_cast<double>(k) / n.value());
}

double discrete_fourier_coeff(const DiscreteField& u0, double rho, int ell) {
  const LatticeSize n = u0.size();
  check_mode(n, ell);
  check_ghosts(u0, rho);
  double sum = 0.0;
  for (int x = 1; x < n.value(); ++x) sum += (u0[x] - rho) * eigenfunction(n, ell, x);
  return sum / n.value();
}

std::vector<double> discrete_fourier_coeffs_fast(const DiscreteField& u0, double rho) {
  check_ghosts(u0, rho);
  const int n = u0.size().value();
  std::vector<double> data(static_cast<std::size_t>(n - 1));
  for (int x = 1; x < n; ++x) data[x - 1] = u0[x] - rho;
  dst1(data);
  for (double& c : data) c /= kSqrt2 * n;
  return data;
}

double continuum_fourier_coeff(const ProfileSpec& profile, int ell) {
  require(ell >= 1, ErrorKind::Domain, "mode index must be >= 1");
  switch (profile.kind()) {
    case ProfileKind::Constant:
      return 0.0;
    case ProfileKind::SingleSine:
    case ProfileKind::SineMixture: {
      const auto amps = profile.sine_amplitudes();
      return static_cast<std::size_t>(ell) <= amps.size() ? amps[ell - 1] / kSqrt2 : 0.0;
    }
    case ProfileKind::Tabulated: {
      // Integrate segment by segment: the integrand is smooth inside each one.
      const auto table = profile.table();
      const std::size_t segments = table.size() - 1;
      const double tol = 1e-10 / static_cast<double>(segments);
      const double rho = profile.rho();
      double total = 0.0;
      for (std::size_t i = 0; i < segments; ++i) {
        const double a = double(i) / segments, b = double(i + 1) / segments;
        const double va = table[i], vb = table[i + 1];
        auto f = [&](double x) {
          const double w = (x - a) * segments;
          return ((1.0 - w) * va + w * vb - rho) * std::sin(kPi * ell * x);
        };
        total += adaptive_simpson(f, a, b, tol);
      }
      return kSqrt2 * total;
    }
  }
  return 0.0;
}

int find_leading_mode(const ProfileSpec& profile, int ell_max, double tol) {
  for (int ell = 1; ell <= ell_max; ++ell)
    if (std::abs(continuum_fourier_coeff(profile, ell)) > tol) return ell;
  std::ostringstream msg;
  msg << "no detectable mode: all |c_ell| <= " << tol << " for ell <= " << ell_max << " in "
      << profile.describe();
  fail(ErrorKind::Domain, msg.str());
}

HeatSolution::HeatSolution(const ProfileSpec& profile, LatticeSize n)
    : HeatSolution(DiscreteField::sample(profile, n), profile.rho()) {}

HeatSolution::HeatSolution(const DiscreteField& u0, double rho) : n_(u0.size()), rho_(rho) {
  check_ghosts(u0, rho);
  const int n = n_.value();
  sin_table_.resize(static_cast<std::size_t>(2 * n));
  for (int k = 0; k < 2 * n; ++k) sin_table_[k] = std::sin(kPi * k / n);
  coeffs_.resize(static_cast<std::size_t>(n - 1));
  lambdas_.resize(static_cast<std::size_t>(n - 1));
  for (int ell = 1; ell < n; ++ell) {
    lambdas_[ell - 1] = eigenvalue(n_, ell);
    double sum = 0.0;
    int idx = 0;
    for (int x = 1; x < n; ++x) {
      idx += ell;
      if (idx >= 2 * n) idx -= 2 * n;
      sum += (u0[x] - rho) * sin_table_[idx];
    }
    coeffs_[ell - 1] = kSqrt2 * sum / n;
  }
}

std::vector<double> HeatSolution::evaluate(double t, bool derivative, double base) const {
  require(t >= 0.0, ErrorKind::Domain, "time must be nonnegative");
  const int n = n_.value();
  std::vector<double> weights(coeffs_.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const double w = coeffs_[i] * std::exp(-lambdas_[i] * t);
    weights[i] = derivative ? -lambdas_[i] * w : w;
  }
  std::vector<double> v(static_cast<std::size_t>(n) + 1, base);
  for (int x = 1; x < n; ++x) {
    double sum = 0.0;
    int idx = 0;
    for (int ell = 1; ell < n; ++ell) {
      idx += x;
      if (idx >= 2 * n) idx -= 2 * n;
      const double w = weights[ell - 1];
      if (w != 0.0) sum += w * sin_table_[idx];
    }
    v[x] += kSqrt2 * sum;
  }
  return v;
}

DiscreteField HeatSolution::at(double t) const { return DiscreteField(n_, evaluate(t, false, rho_)); }

DiscreteField HeatSolution::deviation(double t) const { return DiscreteField(n_, evaluate(t, false, 0.0)); }

DiscreteField HeatSolution::time_derivative(double t) const {
  return DiscreteField(n_, evaluate(t, true, 0.0));
}

DiscreteField HeatSolution::at_fast(double t) const {
  require(t >= 0.0, ErrorKind::Domain, "time must be nonnegative");
  std::vector<double> data(coeffs_.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = coeffs_[i] * std::exp(-lambdas_[i] * t);
  dst1(data);
  std::vector<double> v(static_cast<std::size_t>(n_.value()) + 1, rho_);
  for (std::size_t i = 0; i < data.size(); ++i) v[i + 1] += data[i] / kSqrt2;
  return DiscreteField(n_, std::move(v));
}

double discrete_gradient_sup(const DiscreteField& field) {
  const int n = field.size().value();
  double s = 0.0;
  for (int x = 0; x < n; ++x) s = std::max(s, std::abs(field[x + 1] - field[x]));
  return n * s;
}

CutoffTime cutoff_time(double n, int ell0, double b) {
  require(n >= 2.0, ErrorKind::Domain, "cutoff time needs n >= 2");
  require(ell0 >= 1, ErrorKind::Domain, "leading mode must be >= 1");
  const double l2 = kPi * kPi * ell0 * ell0;
  const double t = std::log(n) / (2.0 * l2) + b / l2;
  if (t < 0.0) return {0.0, true};
  return {t, false};
}

}  // namespace ssep
