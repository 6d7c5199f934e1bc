#include "ssep/profile.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

#include "ssep/error.hpp"

namespace ssep {
namespace {

constexpr int kDenseGrid = 8192;
constexpr double kValueSlack = 1e-12;
constexpr double kSlopeSlack = 1e-9;

void check_rho(double rho) {
  require(rho > 0.0 && rho < 1.0, ErrorKind::Config, "reservoir density rho must lie in (0,1)");
}

}  // namespace

ProfileSpec ProfileSpec::constant(double rho, ClassBounds bounds) {
  check_rho(rho);
  ProfileSpec p;
  p.kind_ = ProfileKind::Constant;
  p.rho_ = rho;
  p.finalize(bounds);
  return p;
}

ProfileSpec ProfileSpec::single_sine(double rho, double amplitude, int mode, ClassBounds bounds) {
  check_rho(rho);
  require(mode >= 1, ErrorKind::Config, "sine mode must be >= 1");
  ProfileSpec p;
  p.kind_ = ProfileKind::SingleSine;
  p.rho_ = rho;
  p.amplitudes_.assign(static_cast<std::size_t>(mode), 0.0);
  p.amplitudes_.back() = amplitude;
  p.finalize(bounds);
  return p;
}

ProfileSpec ProfileSpec::sine_mixture(double rho, std::vector<double> amplitudes,
                                      ClassBounds bounds) {
  check_rho(rho);
  require(!amplitudes.empty(), ErrorKind::Config, "sine mixture needs at least one amplitude");
  ProfileSpec p;
  p.kind_ = ProfileKind::SineMixture;
  p.rho_ = rho;
  p.amplitudes_ = std::move(amplitudes);
  p.finalize(bounds);
  return p;
}

ProfileSpec ProfileSpec::tabulated(double rho, std::vector<double> values, ClassBounds bounds) {
  check_rho(rho);
  require(values.size() >= 2, ErrorKind::Config, "tabulated profile needs at least two knots");
  require(std::abs(values.front() - rho) <= kValueSlack && std::abs(values.back() - rho) <= kValueSlack,
          ErrorKind::Config, "tabulated profile must equal rho at x = 0 and x = 1");
  ProfileSpec p;
  p.kind_ = ProfileKind::Tabulated;
  p.rho_ = rho;
  p.table_ = std::move(values);
  p.table_.front() = rho;
  p.table_.back() = rho;
  p.finalize(bounds);
  return p;
}

double ProfileSpec::operator()(double x) const {
  switch (kind_) {
    case ProfileKind::Constant:
      return rho_;
    case ProfileKind::SingleSine:
    case ProfileKind::SineMixture: {
      double v = rho_;
      for (std::size_t k = 0; k < amplitudes_.size(); ++k)
        if (amplitudes_[k] != 0.0)
          v += amplitudes_[k] * std::sin(std::numbers::pi * static_cast<double>(k + 1) * x);
      return v;
    }
    case ProfileKind::Tabulated: {
      const double segments = static_cast<double>(table_.size() - 1);
      const double pos = std::clamp(x, 0.0, 1.0) * segments;
      const auto i = std::min(static_cast<std::size_t>(pos), table_.size() - 2);
      const double w = pos - static_cast<double>(i);
      return (1.0 - w) * table_[i] + w * table_[i + 1];
    }
  }
  return rho_;
}

double ProfileSpec::derivative(double x) const {
  switch (kind_) {
    case ProfileKind::Constant:
      return 0.0;
    case ProfileKind::SingleSine:
    case ProfileKind::SineMixture: {
      double d = 0.0;
      for (std::size_t k = 0; k < amplitudes_.size(); ++k) {
        const double w = std::numbers::pi * static_cast<double>(k + 1);
        d += amplitudes_[k] * w * std::cos(w * x);
      }
      return d;
    }
    case ProfileKind::Tabulated: {
      const double segments = static_cast<double>(table_.size() - 1);
      const auto i = std::min(static_cast<std::size_t>(std::clamp(x, 0.0, 1.0) * segments),
                              table_.size() - 2);
      return (table_[i + 1] - table_[i]) * segments;
    }
  }
  return 0.0;
}

double ProfileSpec::slope_sup() const {
  if (kind_ == ProfileKind::Tabulated) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < table_.size(); ++i) s = std::max(s, std::abs(table_[i + 1] - table_[i]));
    return s * static_cast<double>(table_.size() - 1);
  }
  double s = 0.0;
  for (int i = 0; i <= kDenseGrid; ++i) s = std::max(s, std::abs(derivative(double(i) / kDenseGrid)));
  return s;
}

double ProfileSpec::distance_to_walls() const {
  double d = std::min(rho_, 1.0 - rho_);
  if (kind_ == ProfileKind::Tabulated) {
    for (double v : table_) d = std::min({d, v, 1.0 - v});
    return d;
  }
  for (int i = 0; i <= kDenseGrid; ++i) {
    const double v = (*this)(double(i) / kDenseGrid);
    d = std::min({d, v, 1.0 - v});
  }
  return d;
}

void ProfileSpec::finalize(ClassBounds bounds) {
  const double walls = distance_to_walls();
  const double slope = slope_sup();
  require(walls > 0.0, ErrorKind::Config, "profile " + describe() + " leaves (0,1)");

  eps0_ = std::isnan(bounds.eps0) ? walls : bounds.eps0;
  kappa_ = std::isnan(bounds.kappa) ? (slope > 0.0 ? slope * (1.0 + kSlopeSlack) : 1.0) : bounds.kappa;

  std::ostringstream msg;
  if (!(eps0_ > 0.0 && eps0_ <= std::min(rho_, 1.0 - rho_) + kValueSlack)) {
    msg << "eps0 = " << eps0_ << " must lie in (0, min(rho, 1-rho)]";
    fail(ErrorKind::Config, msg.str());
  }
  if (!(kappa_ > 0.0)) fail(ErrorKind::Config, "kappa must be positive");
  if (walls + kValueSlack < eps0_) {
    msg << "profile " << describe() << " violates eps0 = " << eps0_ << " (reaches within " << walls
        << " of 0 or 1)";
    fail(ErrorKind::Config, msg.str());
  }
  if (slope > kappa_ * (1.0 + kSlopeSlack)) {
    msg << "profile " << describe() << " has slope " << slope << " > kappa = " << kappa_;
    fail(ErrorKind::Config, msg.str());
  }
}

std::string ProfileSpec::describe() const {
  std::ostringstream out;
  out.precision(6);
  switch (kind_) {
    case ProfileKind::Constant:
      out << "constant(rho=" << rho_ << ")";
      break;
    case ProfileKind::SingleSine:
      out << "sine(rho=" << rho_ << ", a=" << amplitudes_.back() << ", mode=" << amplitudes_.size() << ")";
      break;
    case ProfileKind::SineMixture:
      out << "mixture(rho=" << rho_ << ", a=[";
      for (std::size_t k = 0; k < amplitudes_.size(); ++k) out << (k ? "," : "") << amplitudes_[k];
      out << "])";
      break;
    case ProfileKind::Tabulated:
      out << "tabulated(rho=" << rho_ << ", knots=" << table_.size() << ")";
      break;
  }
  return out.str();
}

}  // namespace ssep
