#include "ssep/product_measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ssep/error.hpp"
#include "ssep/parallel.hpp"
#include "ssep/quadrature.hpp"
#include "ssep/rng.hpp"

namespace ssep {
namespace {

constexpr int kMaxEnumSites = 22;
constexpr std::uint64_t kMcChunk = 1 << 13;

void check_rho(double rho) {
  require(rho > 0.0 && rho < 1.0, ErrorKind::Domain, "reference density rho must lie in (0,1)");
}

double enum_tv(std::span<const double> p, double rho, int i, double pu, double pr) {
  if (i == static_cast<int>(p.size())) return std::abs(pu - pr);
  return enum_tv(p, rho, i + 1, pu * (1 - p[i]), pr * (1 - rho)) +
         enum_tv(p, rho, i + 1, pu * p[i], pr * rho);
}

// Joint sliding-window DP for the laws of S = sum k_x eta_x under nu_u and nu_rho.
struct LatticeLaw {
  double h = 0.0;
  long long offset = 0;  // S value of cell 0
  std::vector<double> pu, pr;
  double lost_u = 0.0, lost_r = 0.0;
  double sum_delta = 0.0, sum_delta_abs = 0.0, sum_delta_sq = 0.0;
};

LatticeLaw lattice_law(const BernoulliField& u, double rho, const LLRCoefficients& c, int bins,
                       bool with_u) {
  const int m = u.sites();
  double mean_gap = 0.0, var_u = 0.0, var_r = 0.0, range = 0.0;
  for (int i = 0; i < m; ++i) {
    const double a = c.a[i];
    mean_gap += a * (u[i] - rho);
    var_u += a * a * u[i] * (1 - u[i]);
    var_r += a * a * rho * (1 - rho);
    range += std::abs(a);
  }
  const double sd = std::sqrt(std::max(var_u, var_r));
  LatticeLaw law;
  law.h = std::min(std::abs(mean_gap) + 24.0 * sd, range) / bins;

  std::vector<long long> k(static_cast<std::size_t>(m));
  long long smin = 0, smax = 0;
  for (int i = 0; i < m; ++i) {
    k[i] = std::llround(c.a[i] / law.h);
    const double delta = c.a[i] - double(k[i]) * law.h;
    law.sum_delta += delta;
    law.sum_delta_abs += std::abs(delta);
    law.sum_delta_sq += delta * delta;
    (k[i] < 0 ? smin : smax) += k[i];
  }

  const bool sliding = smax - smin + 1 > bins + 1;
  const long long width = sliding ? bins + 1 : smax - smin + 1;
  const auto w = static_cast<std::size_t>(width);
  std::vector<double> pu(w, 0.0), pr(w, 0.0), nu(w), nr(w);
  long long offset = sliding ? -width / 2 : smin;
  pu[static_cast<std::size_t>(-offset)] = 1.0;
  pr[static_cast<std::size_t>(-offset)] = 1.0;

  // Adds q * old[j] to out[j - shift] for every j whose target lies in the window;
  // returns the mass that falls outside.
  auto shifted_add = [width](const std::vector<double>& old, std::vector<double>& out, long long shift,
                             double q) {
    const long long lo = std::max<long long>(0, shift), hi = std::min<long long>(width, width + shift);
    double lost = 0.0;
    for (long long j = 0; j < std::min(lo, width); ++j) lost += old[j];
    for (long long j = std::max(hi, 0LL); j < width; ++j) lost += old[j];
    for (long long j = lo; j < hi; ++j) out[j - shift] += q * old[j];
    return q * lost;
  };

  double mid = 0.0;
  for (int i = 0; i < m; ++i) {
    mid += double(k[i]) * 0.5 * (u[i] + rho);
    const long long next = sliding ? std::llround(mid) - width / 2 : offset;
    const long long d = next - offset;
    std::fill(nr.begin(), nr.end(), 0.0);
    law.lost_r += shifted_add(pr, nr, d, 1 - rho) + shifted_add(pr, nr, d - k[i], rho);
    pr.swap(nr);
    if (with_u) {
      std::fill(nu.begin(), nu.end(), 0.0);
      law.lost_u += shifted_add(pu, nu, d, 1 - u[i]) + shifted_add(pu, nu, d - k[i], u[i]);
      pu.swap(nu);
    }
    offset = next;
  }
  law.offset = offset;
  law.pr = std::move(pr);
  if (with_u) law.pu = std::move(pu);
  return law;
}

// Second-order remainder E[(e^{|D|} - 1) 1{|L_grid| <= |D|}] under nu_rho, where D is the
// rounding residual, minimised over the split level r.
double rounding_remainder(const LatticeLaw& law, double rho, double c0) {
  const double sigma = std::sqrt(law.sum_delta_sq / 4.0);
  const double dmax = law.sum_delta_abs * std::max(rho, 1 - rho);
  if (dmax == 0.0) return 0.0;
  const double base = law.h * double(law.offset) + rho * law.sum_delta - c0;
  std::vector<double> prefix(law.pr.size() + 1, 0.0);
  for (std::size_t i = 0; i < law.pr.size(); ++i) prefix[i + 1] = prefix[i] + law.pr[i];
  const auto cells = static_cast<long long>(law.pr.size());
  auto near_zero_mass = [&](double r) {
    const long long lo = std::max<long long>(0, static_cast<long long>(std::ceil((-r - base) / law.h)));
    const long long hi = std::min<long long>(cells - 1, static_cast<long long>(std::floor((r - base) / law.h)));
    return hi < lo ? 0.0 : prefix[hi + 1] - prefix[lo];
  };
  auto tail = [&](double r) {
    if (r >= dmax) return 0.0;
    const double p = std::min(1.0, 2.0 * std::exp(-r * r / (2 * sigma * sigma)));
    const double integral = 2.0 * std::exp(sigma * sigma / 2) * sigma * std::sqrt(std::numbers::pi / 2) *
                            std::erfc((r - sigma * sigma) / (sigma * std::numbers::sqrt2));
    return std::expm1(r) * p + integral;
  };
  auto bound = [&](double r) { return std::expm1(r) * (near_zero_mass(r) + law.lost_r) + tail(r); };
  double best = bound(dmax);
  for (int j = 1; j <= 64 && sigma * j / 4.0 < dmax; ++j) best = std::min(best, bound(sigma * j / 4.0));
  return best;
}

}  // namespace

BernoulliField::BernoulliField(LatticeSize n, std::vector<double> p) : n_(n), p_(std::move(p)) {
  require(p_.size() == static_cast<std::size_t>(n.bulk()), ErrorKind::Domain,
          "Bernoulli field needs one density per bulk site");
  for (double v : p_)
    require(v > 0.0 && v < 1.0, ErrorKind::Domain, "Bernoulli densities must lie strictly inside (0,1)");
}

BernoulliField BernoulliField::constant(LatticeSize n, double rho) {
  return BernoulliField(n, std::vector<double>(static_cast<std::size_t>(n.bulk()), rho));
}

BernoulliField BernoulliField::from_field(const DiscreteField& u) {
  const auto bulk = u.bulk();
  return BernoulliField(u.size(), std::vector<double>(bulk.begin(), bulk.end()));
}

bool BernoulliField::is_constant(double rho) const {
  return std::all_of(p_.begin(), p_.end(), [rho](double v) { return v == rho; });
}

double BernoulliField::mass(std::uint64_t state) const {
  require(sites() <= 63, ErrorKind::Size, "configuration mass needs at most 63 sites");
  double prob = 1.0;
  for (int i = 0; i < sites(); ++i) prob *= (state >> i) & 1 ? p_[i] : 1 - p_[i];
  return prob;
}

LLRCoefficients llr_coefficients(const BernoulliField& u, double rho) {
  check_rho(rho);
  LLRCoefficients c;
  c.a.resize(static_cast<std::size_t>(u.sites()));
  double sq = 0.0;
  for (int i = 0; i < u.sites(); ++i) {
    if (u[i] == rho) {
      c.a[i] = 0.0;
      continue;
    }
    const double lu = std::log(u[i] / rho), lv = std::log1p(-u[i]) - std::log1p(-rho);
    c.a[i] = lu - lv;
    c.bsum += -rho * lu - (1 - rho) * lv;
    sq += c.a[i] * c.a[i];
  }
  c.s = std::sqrt(rho * (1 - rho) * sq);
  return c;
}

double gaussian_profile(double m) {
  require(std::isfinite(m), ErrorKind::Domain, "Gaussian profile argument must be finite");
  m = std::abs(m);
  if (m == 0.0) return 0.0;
  const double inv = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  // (1/2)|e^{mx - m^2/2} - 1| phi(x) = (1/2)|phi(x - m) - phi(x)|; integrate on unit pieces,
  // with a breakpoint at the kink x = m/2.
  auto f = [m, inv](double x) {
    return 0.5 * inv * std::abs(std::exp(-0.5 * (x - m) * (x - m)) - std::exp(-0.5 * x * x));
  };
  const double lo = -40.0, hi = m + 40.0;
  std::vector<double> cuts;
  for (double x = lo; x < hi; x += 1.0) cuts.push_back(x);
  cuts.push_back(hi);
  cuts.push_back(m / 2);
  std::sort(cuts.begin(), cuts.end());
  const double piece_tol = 1e-10 / double(cuts.size());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) total += adaptive_simpson(f, cuts[i], cuts[i + 1], piece_tol);
  return std::clamp(total, 0.0, 1.0);
}

double tv_exact_enum(const BernoulliField& u, double rho) {
  check_rho(rho);
  if (u.sites() > kMaxEnumSites) {
    std::ostringstream msg;
    msg << "exact enumeration is limited to " << kMaxEnumSites << " sites (got " << u.sites()
        << "); use tv_grid_dp";
    fail(ErrorKind::Size, msg.str());
  }
  if (u.is_constant(rho)) return 0.0;
  return 0.5 * enum_tv(u.values(), rho, 0, 1.0, 1.0);
}

GridDistribution llr_distribution(const BernoulliField& u, double rho, int bins) {
  require(bins >= 16, ErrorKind::Domain, "grid resolution must be at least 16 bins");
  const auto c = llr_coefficients(u, rho);
  GridDistribution g;
  if (u.is_constant(rho)) {
    g.spacing = 1.0;
    g.mass = {1.0};
    return g;
  }
  auto law = lattice_law(u, rho, c, bins, false);
  double suma = std::accumulate(c.a.begin(), c.a.end(), 0.0);
  g.spacing = law.h;
  g.origin = law.h * double(law.offset) + rho * law.sum_delta - rho * suma - c.bsum;
  g.lost_mass = law.lost_r;
  g.rounding_bound = law.sum_delta_abs * std::max(rho, 1 - rho);
  g.mass = std::move(law.pr);
  return g;
}

TvEstimate tv_grid_dp(const BernoulliField& u, double rho, int bins, double tol, int max_bins) {
  require(bins >= 16, ErrorKind::Domain, "grid resolution must be at least 16 bins");
  const auto c = llr_coefficients(u, rho);
  if (u.is_constant(rho)) return {0.0, 0.0, bins};
  const double c0 = rho * std::accumulate(c.a.begin(), c.a.end(), 0.0) + c.bsum;
  TvEstimate best{0.0, std::numeric_limits<double>::infinity(), bins};
  for (int res = bins;; res *= 2) {
    const auto law = lattice_law(u, rho, c, res, true);
    double tv = 0.0;
    for (std::size_t i = 0; i < law.pr.size(); ++i) tv += std::abs(law.pu[i] - law.pr[i]);
    tv *= 0.5;
    const double err = 0.5 * (law.lost_u + law.lost_r) + rounding_remainder(law, rho, c0);
    if (err < best.error_bound) best = {tv, err, res};
    if (err <= tol) return best;
    if (res > max_bins / 2) break;
  }
  std::ostringstream msg;
  msg << "grid DP cannot reach tolerance " << tol << " within " << max_bins
      << " bins; achievable bound " << best.error_bound << " at " << best.bins << " bins";
  fail(ErrorKind::Numerical, msg.str());
}

McEstimate tv_monte_carlo(const BernoulliField& u, double rho, std::uint64_t samples, std::uint64_t seed,
                          int workers) {
  require(samples >= 1000, ErrorKind::Domain, "Monte Carlo TV needs at least 1000 samples");
  const auto c = llr_coefficients(u, rho);
  McEstimate est;
  est.samples = samples;
  if (u.is_constant(rho)) return est;
  const double c0 = rho * std::accumulate(c.a.begin(), c.a.end(), 0.0) + c.bsum;
  double sup_l = -c0;
  for (double a : c.a) sup_l += std::max(a, 0.0);
  est.psi_cap = std::exp(sup_l);

  struct Moments {
    double count = 0, mean = 0, m2 = 0;
  };
  const std::uint64_t chunks = (samples + kMcChunk - 1) / kMcChunk;
  std::vector<Moments> parts(chunks);
  parallel_for(chunks, workers, [&](std::size_t ci) {
    Rng rng(seed, ci);
    const std::uint64_t count = std::min<std::uint64_t>(kMcChunk, samples - ci * kMcChunk);
    Moments mo;
    for (std::uint64_t s = 0; s < count; ++s) {
      double l = -c0;
      for (double a : c.a)
        if (rng.uniform() < rho) l += a;
      const double v = 0.5 * std::abs(std::expm1(l));
      mo.count += 1;
      const double d = v - mo.mean;
      mo.mean += d / mo.count;
      mo.m2 += d * (v - mo.mean);
    }
    parts[ci] = mo;
  });
  Moments tot;
  for (const auto& p : parts) {
    const double n = tot.count + p.count, d = p.mean - tot.mean;
    tot.mean += d * p.count / n;
    tot.m2 += p.m2 + d * d * tot.count * p.count / n;
    tot.count = n;
  }
  est.value = tot.mean;
  est.ci95 = 1.959963984540054 * std::sqrt(tot.m2 / (tot.count - 1) / tot.count);
  return est;
}

double product_relative_entropy(const BernoulliField& u, const BernoulliField& v) {
  require(u.sites() == v.sites(), ErrorKind::Domain, "relative entropy needs fields of equal size");
  double h = 0.0;
  for (int i = 0; i < u.sites(); ++i) {
    const double p = u[i], q = v[i];
    if (p == q) continue;
    h += p * std::log(p / q) + (1 - p) * (std::log1p(-p) - std::log1p(-q));
  }
  return std::max(h, 0.0);
}

double gamma_const(const ProfileSpec& profile) {
  const int l0 = find_leading_mode(profile);
  return std::abs(continuum_fourier_coeff(profile, l0)) / std::sqrt(profile.rho() * (1 - profile.rho()));
}

bool pinsker_gap(double tv, double entropy) { return 2.0 * tv * tv <= entropy + 1e-12; }

double lyapunov_ratio(const LLRCoefficients& c) {
  require(c.s > 0.0, ErrorKind::Domain, "Lyapunov ratio needs a non-degenerate statistic");
  double q = 0.0;
  for (double a : c.a) q += a * a * a * a;
  return q / std::pow(c.s, 4);
}

}  // namespace ssep
