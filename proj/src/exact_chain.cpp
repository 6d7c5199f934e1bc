#include "ssep/exact_chain.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ssep/error.hpp"
#include "ssep/rng.hpp"

namespace ssep {
namespace {

using State = std::uint32_t;

double compensated_sum(std::span<const double> v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

// (1 + r) log(1 + r) - r, accurate for tiny r.
double entropy_kernel(double r) {
  if (r == -1.0) return 1.0;
  if (std::abs(r) < 1e-2) {
    double term = r * r, sum = 0.0;
    for (int k = 2; k < 14; ++k) {
      sum += term / (double(k) * (k - 1));
      term *= -r;
    }
    return sum;
  }
  return (1 + r) * std::log1p(r) - r;
}

void check_same_space(const StateSpace& a, const StateSpace& b) {
  require(a == b, ErrorKind::Domain, "distributions live on different state spaces");
}

void check_size(const StateSpace& space, std::size_t len, const char* what) {
  if (len != space.size()) {
    std::ostringstream msg;
    msg << what << " has " << len << " entries, expected " << space.size();
    fail(ErrorKind::Domain, msg.str());
  }
}

// Flip rate at boundary site with bit b in state s: rho into a hole, 1 - rho out of a particle.
inline double flip_rate(State s, int b, double rho) { return (s >> b) & 1 ? 1 - rho : rho; }

// Boundary bits {0, m-1}; for n = 3 these are the two distinct sites.
inline std::array<int, 2> boundary_bits(int m) { return {0, m - 1}; }

// Sum over states of log psi_t = log(nu_t / nu_bar), from the density deviation dev = u - rho.
std::vector<double> log_likelihood(int m, double rho, std::span<const double> dev) {
  std::vector<double> l(std::size_t{1} << m, 0.0);
  for (int i = 0; i < m; ++i) {
    const double l1 = std::log1p(dev[i] / rho), l0 = std::log1p(-dev[i] / (1 - rho));
    const std::size_t half = std::size_t{1} << i;
    for (std::size_t s = 0; s < half; ++s) {
      l[s | half] = l[s] + l1;
      l[s] += l0;
    }
  }
  return l;
}

// omega_x(s) for all states and sites, row-major by state.
std::vector<double> omega_table(int m, std::span<const double> u) {
  const std::size_t size = std::size_t{1} << m;
  std::vector<double> w(size * m);
  for (std::size_t s = 0; s < size; ++s)
    for (int i = 0; i < m; ++i) {
      const double eta = (s >> i) & 1;
      w[s * m + i] = (eta - u[i]) / (u[i] * (1 - u[i]));
    }
  return w;
}

// Move-sum form of integral Gamma h d nu; differences of h are taken directly.
double gamma_sum(const GeneratorSpec& g, std::span<const double> h, std::span<const double> nu) {
  const int m = g.n.bulk();
  const auto [b0, b1] = boundary_bits(m);
  double total = 0.0;
  for (State s = 0; s < nu.size(); ++s) {
    double acc = 0.0;
    for (int e = 0; e + 1 < m; ++e)
      if (((s >> e) ^ (s >> (e + 1))) & 1) {
        const double d = h[s ^ (State{3} << e)] - h[s];
        acc += d * d;
      }
    for (int b : {b0, b1}) {
      const double d = h[s ^ (State{1} << b)] - h[s];
      acc += flip_rate(s, b, g.rho) * d * d;
    }
    total += nu[s] * acc;
  }
  return g.speed() * total;
}

double omega_term(const GeneratorSpec& g, std::span<const double> mu, std::span<const double> u) {
  const int m = g.n.bulk();
  const auto w = omega_table(m, u);
  double total = 0.0;
  for (int i = 0; i + 1 < m; ++i) {
    double corr = 0.0;
    for (std::size_t s = 0; s < mu.size(); ++s) corr += mu[s] * w[s * m + i] * w[s * m + i + 1];
    total += (u[i + 1] - u[i]) * (u[i + 1] - u[i]) * corr;
  }
  return g.speed() * total;
}

YauTerms yau_from_deviation(const GeneratorSpec& g, std::span<const double> mu, std::span<const double> nu,
                            std::span<const double> r, std::span<const double> u) {
  std::vector<double> h(r.size());
  for (std::size_t s = 0; s < r.size(); ++s) h[s] = r[s] / (std::sqrt(1 + r[s]) + 1);  // sqrt(f) - 1
  YauTerms y;
  y.gamma = gamma_sum(g, h, nu);
  y.omega = omega_term(g, mu, u);
  y.rhs = -y.gamma - y.omega;
  return y;
}

}  // namespace

StateSpace::StateSpace(LatticeSize n) : n_(n) {
  require(n.value() >= 3, ErrorKind::Domain,
          "the exact chain needs n >= 3 (for n = 2 the boundary set {1, n-1} is a single site)");
  if (n.bulk() > kMaxChainSites) {
    std::ostringstream msg;
    msg << "state space 2^" << n.bulk() << " exceeds the cap of 2^" << kMaxChainSites;
    fail(ErrorKind::Size, msg.str());
  }
}

DistributionVector::DistributionVector(StateSpace space, std::vector<double> mass)
    : space_(space), mass_(std::move(mass)) {
  check_size(space_, mass_.size(), "distribution");
  for (double v : mass_)
    require(v >= 0.0 && std::isfinite(v), ErrorKind::Domain, "distribution has a negative or non-finite mass");
  const double total = compensated_sum(mass_);
  require(std::abs(total - 1.0) <= 1e-12, ErrorKind::Domain, "distribution does not sum to 1");
}

double DistributionVector::marginal(int x) const {
  require(x >= 1 && x <= space_.sites(), ErrorKind::Domain, "site outside the bulk");
  double p = 0.0;
  for (std::size_t s = 0; s < mass_.size(); ++s)
    if ((s >> (x - 1)) & 1) p += mass_[s];
  return p;
}

GeneratorSpec::GeneratorSpec(LatticeSize n_, double rho_) : n(n_), rho(rho_) {
  require(n.value() >= 3, ErrorKind::Domain,
          "the generator needs n >= 3 (for n = 2 the boundary sum is ambiguous)");
  require(rho > 0.0 && rho < 1.0, ErrorKind::Domain, "reservoir density must lie in (0,1)");
}

double GeneratorSpec::dominating_rate() const {
  return speed() * (n.value() - 2) + 2 * speed() * std::max(rho, 1 - rho);
}

std::vector<double> generator_apply(const GeneratorSpec& g, std::span<const double> f) {
  const StateSpace space(g.n);
  check_size(space, f.size(), "function");
  const int m = space.sites();
  const auto [b0, b1] = boundary_bits(m);
  std::vector<double> out(f.size());
  for (State s = 0; s < f.size(); ++s) {
    double acc = 0.0;
    for (int e = 0; e + 1 < m; ++e)
      if (((s >> e) ^ (s >> (e + 1))) & 1) acc += f[s ^ (State{3} << e)] - f[s];
    for (int b : {b0, b1}) acc += flip_rate(s, b, g.rho) * (f[s ^ (State{1} << b)] - f[s]);
    out[s] = g.speed() * acc;
  }
  return out;
}

std::vector<double> generator_forward_apply(const GeneratorSpec& g, std::span<const double> mu) {
  const StateSpace space(g.n);
  check_size(space, mu.size(), "measure");
  const int m = space.sites();
  const auto [b0, b1] = boundary_bits(m);
  std::vector<double> out(mu.size());
  for (State s = 0; s < mu.size(); ++s) {
    double acc = 0.0;
    for (int e = 0; e + 1 < m; ++e)
      if (((s >> e) ^ (s >> (e + 1))) & 1) acc += mu[s ^ (State{3} << e)] - mu[s];
    for (int b : {b0, b1}) {
      const State t = s ^ (State{1} << b);
      acc += flip_rate(t, b, g.rho) * mu[t] - flip_rate(s, b, g.rho) * mu[s];
    }
    out[s] = g.speed() * acc;
  }
  return out;
}

std::vector<double> evolve_signed(const GeneratorSpec& g, std::span<const double> v, double t, EvolveOptions opts,
                                  double* truncation) {
  require(t >= 0.0 && std::isfinite(t), ErrorKind::Domain, "evolution time must be finite and nonnegative");
  const StateSpace space(g.n);
  check_size(space, v.size(), "vector");
  std::vector<double> cur(v.begin(), v.end());
  if (truncation) *truncation = 0.0;
  if (t == 0.0) return cur;

  const double rate = g.dominating_rate(), mean = rate * t, log_mean = std::log(mean);
  const double l1 = std::accumulate(v.begin(), v.end(), 0.0, [](double a, double x) { return a + std::abs(x); });
  std::vector<double> acc(v.size(), 0.0);
  double weight_sum = 0.0, tail = 0.0;
  for (long long k = 0;; ++k) {
    const double logw = -mean + double(k) * log_mean - std::lgamma(double(k) + 1);
    const double w = std::exp(logw);
    if (w > 0.0) {
      weight_sum += w;
      for (std::size_t s = 0; s < acc.size(); ++s) acc[s] += w * cur[s];
    }
    if (double(k) + 2 > mean) {
      const double log_next = logw + log_mean - std::log(double(k) + 1);
      const double log_tail = log_next - std::log1p(-mean / (double(k) + 2));
      if (log_tail < std::log(opts.tail_tol)) {
        tail = std::exp(log_tail);
        break;
      }
    }
    const auto step = generator_forward_apply(g, cur);
    for (std::size_t s = 0; s < cur.size(); ++s) cur[s] += step[s] / rate;
  }
  for (auto& x : acc) x /= weight_sum;
  if (truncation) *truncation = 2 * tail * l1;
  return acc;
}

DistributionVector forward_evolve(const GeneratorSpec& g, const DistributionVector& mu0, double t,
                                  double* truncation) {
  require(mu0.space() == StateSpace(g.n), ErrorKind::Domain, "initial law lives on a different state space");
  auto out = evolve_signed(g, mu0.mass(), t, {}, truncation);
  for (auto& x : out) x = std::max(x, 0.0);
  return DistributionVector(mu0.space(), std::move(out));
}

DistributionVector product_distribution(const BernoulliField& u) {
  const StateSpace space(u.size());
  std::vector<double> mass(space.size(), 0.0);
  mass[0] = 1.0;
  for (int i = 0; i < space.sites(); ++i) {
    const std::size_t half = std::size_t{1} << i;
    for (std::size_t s = 0; s < half; ++s) {
      mass[s | half] = mass[s] * u[i];
      mass[s] *= 1 - u[i];
    }
  }
  return DistributionVector(space, std::move(mass));
}

double tv_distance(const DistributionVector& mu, const DistributionVector& nu) {
  check_same_space(mu.space(), nu.space());
  double sum = 0.0;
  for (std::size_t s = 0; s < mu.mass().size(); ++s) sum += std::abs(mu[s] - nu[s]);
  return std::min(0.5 * sum, 1.0);
}

double relative_entropy_from_deviation(std::span<const double> nu, std::span<const double> r) {
  require(nu.size() == r.size(), ErrorKind::Domain, "entropy inputs differ in length");
  double h = 0.0;
  for (std::size_t s = 0; s < nu.size(); ++s) h += nu[s] * entropy_kernel(r[s]);
  return std::max(h, 0.0);
}

double relative_entropy_H(const DistributionVector& mu, const DistributionVector& nu) {
  check_same_space(mu.space(), nu.space());
  std::vector<double> r(nu.mass().size());
  for (std::size_t s = 0; s < r.size(); ++s) {
    require(nu[s] > 0.0, ErrorKind::Domain, "reference measure has a zero mass");
    r[s] = (mu[s] - nu[s]) / nu[s];
  }
  return relative_entropy_from_deviation(nu.mass(), r);
}

double gamma_integral(const GeneratorSpec& g, std::span<const double> h, const DistributionVector& nu) {
  require(nu.space() == StateSpace(g.n), ErrorKind::Domain, "measure lives on a different state space");
  check_size(nu.space(), h.size(), "function");
  return gamma_sum(g, h, nu.mass());
}

double gamma_integral_generator(const GeneratorSpec& g, std::span<const double> h, const DistributionVector& nu) {
  require(nu.space() == StateSpace(g.n), ErrorKind::Domain, "measure lives on a different state space");
  std::vector<double> h2(h.size());
  for (std::size_t s = 0; s < h.size(); ++s) h2[s] = h[s] * h[s];
  const auto lh2 = generator_apply(g, h2), lh = generator_apply(g, h);
  double total = 0.0;
  for (std::size_t s = 0; s < h.size(); ++s) total += nu[s] * (lh2[s] - 2 * h[s] * lh[s]);
  return total;
}

double carre_du_champ_integral(const GeneratorSpec& g, std::span<const double> f, const DistributionVector& nu) {
  std::vector<double> root(f.size());
  for (std::size_t s = 0; s < f.size(); ++s) {
    require(f[s] >= 0.0, ErrorKind::Domain, "carre du champ of sqrt(f) needs f >= 0");
    root[s] = std::sqrt(f[s]);
  }
  return gamma_integral(g, root, nu);
}

double default_theta(LatticeSize n, double rho) { return n.value() * std::min(rho, 1 - rho); }

DirichletForms dirichlet_forms(std::span<const double> f, const DistributionVector& nu, double theta) {
  check_size(nu.space(), f.size(), "function");
  const int m = nu.space().sites();
  const int n = nu.space().lattice().value();
  DirichletForms d;
  d.site.assign(static_cast<std::size_t>(m), 0.0);
  d.edge.assign(static_cast<std::size_t>(std::max(m - 1, 0)), 0.0);
  for (State s = 0; s < f.size(); ++s) {
    for (int i = 0; i < m; ++i) {
      const double diff = f[s ^ (State{1} << i)] - f[s];
      d.site[i] += nu[s] * diff * diff;
    }
    for (int e = 0; e + 1 < m; ++e)
      if (((s >> e) ^ (s >> (e + 1))) & 1) {
        const double diff = f[s ^ (State{3} << e)] - f[s];
        d.edge[e] += nu[s] * diff * diff;
      }
  }
  d.total = theta / n * d.site[0] + std::accumulate(d.edge.begin(), d.edge.end(), 0.0);
  return d;
}

std::vector<double> omega_correlations(const DistributionVector& mu, const DiscreteField& u) {
  const int m = mu.space().sites();
  require(u.size() == mu.space().lattice(), ErrorKind::Domain, "density field and law differ in size");
  const auto bulk = u.bulk();
  for (double v : bulk) require(v > 0.0 && v < 1.0, ErrorKind::Domain, "omega needs densities in (0,1)");
  const auto w = omega_table(m, bulk);
  std::vector<double> corr(static_cast<std::size_t>(m - 1), 0.0);
  for (std::size_t s = 0; s < mu.mass().size(); ++s)
    for (int i = 0; i + 1 < m; ++i) corr[i] += mu[s] * w[s * m + i] * w[s * m + i + 1];
  return corr;
}

YauTerms yau_rhs(const GeneratorSpec& g, const DistributionVector& mu, const DiscreteField& u_t) {
  const auto nu = product_distribution(BernoulliField::from_field(u_t));
  check_same_space(mu.space(), nu.space());
  std::vector<double> r(mu.mass().size());
  for (std::size_t s = 0; s < r.size(); ++s) r[s] = (mu[s] - nu[s]) / nu[s];
  return yau_from_deviation(g, mu.mass(), nu.mass(), r, u_t.bulk());
}

std::vector<double> adjoint_apply(const GeneratorSpec& g, const DistributionVector& nu_t, std::span<const double> h) {
  require(nu_t.space() == StateSpace(g.n), ErrorKind::Domain, "measure lives on a different state space");
  check_size(nu_t.space(), h.size(), "function");
  const int m = nu_t.space().sites();
  const auto [b0, b1] = boundary_bits(m);
  std::vector<double> out(h.size());
  for (State s = 0; s < h.size(); ++s) {
    const double ns = nu_t[s];
    require(ns > 0.0, ErrorKind::Domain, "reference measure has a zero mass");
    double acc = 0.0;
    for (int e = 0; e + 1 < m; ++e)
      if (((s >> e) ^ (s >> (e + 1))) & 1) {
        const State t = s ^ (State{3} << e);
        acc += h[t] * nu_t[t] / ns - h[s];
      }
    for (int b : {b0, b1}) {
      const State t = s ^ (State{1} << b);
      acc += flip_rate(t, b, g.rho) * h[t] * nu_t[t] / ns - flip_rate(s, b, g.rho) * h[s];
    }
    out[s] = g.speed() * acc;
  }
  return out;
}

double adjoint_identity_check(const GeneratorSpec& g, const DiscreteField& u_t, const DiscreteField& du_dt) {
  require(u_t.size() == g.n && du_dt.size() == g.n, ErrorKind::Domain, "fields must match the generator size");
  const auto nu = product_distribution(BernoulliField::from_field(u_t));
  const int m = g.n.bulk();
  const auto u = u_t.bulk(), du = du_dt.bulk();
  const std::vector<double> one(nu.mass().size(), 1.0);
  const auto lstar = adjoint_apply(g, nu, one);
  const auto w = omega_table(m, u);
  double worst = 0.0;
  for (std::size_t s = 0; s < one.size(); ++s) {
    double dlogpsi = 0.0, rhs = 0.0;
    for (int i = 0; i < m; ++i) dlogpsi += du[i] * w[s * m + i];
    for (int i = 0; i + 1 < m; ++i) rhs -= g.speed() * (u[i + 1] - u[i]) * (u[i + 1] - u[i]) * w[s * m + i] * w[s * m + i + 1];
    worst = std::max(worst, std::abs(lstar[s] - dlogpsi - rhs));
  }
  return worst;
}

double ls_quotient(const GeneratorSpec& g, std::span<const double> f, const DistributionVector& nu) {
  const DistributionVector mu = [&] {
    std::vector<double> m(f.size());
    for (std::size_t s = 0; s < f.size(); ++s) m[s] = f[s] * nu[s];
    return DistributionVector(nu.space(), std::move(m));
  }();
  return relative_entropy_H(mu, nu) / carre_du_champ_integral(g, f, nu);
}

// ---- log-Sobolev search ------------------------------------------------------------

namespace {

struct LsProblem {
  int m = 0, n = 0;
  double theta = 0.0;
  std::vector<double> nu;

  // D(g) and its gradient.
  double dirichlet(std::span<const double> g, std::vector<double>* grad) const {
    const double c1 = theta / n;
    double d = 0.0;
    if (grad) grad->assign(g.size(), 0.0);
    for (State s = 0; s < g.size(); ++s) {
      const State t1 = s ^ 1u;
      const double diff1 = g[t1] - g[s];
      d += c1 * nu[s] * diff1 * diff1;
      if (grad) (*grad)[s] += 2 * c1 * (nu[s] + nu[t1]) * (g[s] - g[t1]);
      for (int e = 0; e + 1 < m; ++e)
        if (((s >> e) ^ (s >> (e + 1))) & 1) {
          const State t = s ^ (State{3} << e);
          const double diff = g[t] - g[s];
          d += nu[s] * diff * diff;
          if (grad) (*grad)[s] += 2 * (nu[s] + nu[t]) * (g[s] - g[t]);
        }
    }
    return d;
  }

  // Ent_nu(g^2) and its gradient.
  double entropy(std::span<const double> g, std::vector<double>* grad) const {
    double z = 0.0, a = 0.0;
    for (std::size_t s = 0; s < g.size(); ++s) {
      const double g2 = g[s] * g[s];
      z += nu[s] * g2;
      if (g2 > 0) a += nu[s] * g2 * std::log(g2);
    }
    const double logz = std::log(z);
    if (grad) {
      grad->resize(g.size());
      for (std::size_t s = 0; s < g.size(); ++s) {
        const double g2 = g[s] * g[s];
        (*grad)[s] = g2 > 0 ? 2 * nu[s] * g[s] * (std::log(g2) - logz) : 0.0;
      }
    }
    return a - z * logz;
  }

  void normalise(std::vector<double>& g) const {
    double z = 0.0;
    for (std::size_t s = 0; s < g.size(); ++s) z += nu[s] * g[s] * g[s];
    const double k = 1.0 / std::sqrt(z);
    for (auto& x : g) x *= k;
  }
};

struct LsRun {
  double ratio = std::numeric_limits<double>::infinity();
  std::vector<double> g;
  bool converged = false;
};

LsRun descend(const LsProblem& p, std::vector<double> g, const LsOptions& opts) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  p.normalise(g);
  std::vector<double> gd, ge, dir(g.size()), trial(g.size());
  auto ratio_of = [&](std::span<const double> x) {
    const double ent = p.entropy(x, nullptr);
    return ent < opts.min_entropy ? kInf : p.dirichlet(x, nullptr) / ent;
  };
  LsRun run;
  run.g = g;
  run.ratio = ratio_of(g);
  if (!std::isfinite(run.ratio)) return run;
  double step = -1.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const double d = p.dirichlet(g, &gd), ent = p.entropy(g, &ge);
    const double r = d / ent;
    double slope = 0.0, dmax = 0.0;
    for (std::size_t s = 0; s < g.size(); ++s) {
      const double grad = (gd[s] - r * ge[s]) / ent;
      dir[s] = -grad / p.nu[s];
      slope += grad * dir[s];
      dmax = std::max(dmax, std::abs(dir[s]));
    }
    if (dmax == 0.0) {
      run.converged = true;
      break;
    }
    if (step < 0) step = 0.1 / dmax;
    bool accepted = false;
    double r_new = kInf;
    for (int bt = 0; bt < 50; ++bt) {
      for (std::size_t s = 0; s < g.size(); ++s) trial[s] = std::max(0.0, g[s] + step * dir[s]);
      p.normalise(trial);
      r_new = ratio_of(trial);
      if (r_new <= r + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      run.converged = true;
      break;
    }
    g.swap(trial);
    const bool small = r - r_new <= opts.rel_tol * r;
    if (r_new < run.ratio) {
      run.ratio = r_new;
      run.g = g;
    }
    if (small) {
      run.converged = true;
      break;
    }
    step *= 2.0;
  }
  return run;
}

}  // namespace

LsResult ls_ratio_minimize(const BernoulliField& u, double theta, int restarts, std::uint64_t seed, LsOptions opts) {
  require(u.sites() <= 12, ErrorKind::Size, "log-Sobolev search is limited to n - 1 <= 12");
  require(theta > 0.0, ErrorKind::Domain, "theta must be positive");
  require(restarts >= 0, ErrorKind::Domain, "restart count must be nonnegative");
  const StateSpace space(u.size());
  const auto nu = product_distribution(u);
  LsProblem p;
  p.m = space.sites();
  p.n = space.lattice().value();
  p.theta = theta;
  p.nu.assign(nu.mass().begin(), nu.mass().end());
  const std::size_t size = space.size();

  std::vector<std::vector<double>> starts;
  auto spike = [&](std::initializer_list<std::size_t> states) {
    std::vector<double> g(size, 0.0);
    for (auto s : states) g[s] = 1.0;
    starts.push_back(std::move(g));
  };
  const auto [min_it, max_it] = std::minmax_element(p.nu.begin(), p.nu.end());
  const std::size_t smin = min_it - p.nu.begin(), smax = max_it - p.nu.begin(), full = size - 1;
  for (std::size_t s : {std::size_t{0}, full, smin, smax}) spike({s});
  spike({0, full});
  spike({smin, smax});
  // Small perturbations f = 1 + eps phi along centred linear statistics.
  auto linear = [&](const std::vector<double>& w) {
    std::vector<double> phi(size, 0.0);
    double sup = 0.0;
    for (std::size_t s = 0; s < size; ++s) {
      for (int i = 0; i < p.m; ++i) phi[s] += w[i] * (double((s >> i) & 1) - u[i]) / std::sqrt(u[i] * (1 - u[i]));
      sup = std::max(sup, std::abs(phi[s]));
    }
    if (sup == 0.0) return;
    std::vector<double> g(size);
    for (std::size_t s = 0; s < size; ++s) g[s] = std::sqrt(1 + 0.2 * phi[s] / sup);
    starts.push_back(std::move(g));
  };
  for (int i = 0; i < p.m; ++i) {
    std::vector<double> w(p.m, 0.0);
    w[i] = 1.0;
    linear(w);
  }
  {
    std::vector<double> w(p.m);
    for (int i = 0; i < p.m; ++i) w[i] = std::sin(std::numbers::pi * (i + 1) / p.n);
    linear(w);
    std::fill(w.begin(), w.end(), 1.0);
    linear(w);
  }
  for (int k = 0; k < restarts; ++k) {
    Rng rng(seed, static_cast<std::uint64_t>(k));
    std::vector<double> g(size);
    const bool sparse = k % 2 == 1;
    for (auto& x : g) x = sparse ? (rng.uniform() < 0.2 ? rng.uniform() : 0.0) : rng.uniform();
    if (std::all_of(g.begin(), g.end(), [](double x) { return x == 0.0; })) g[rng.below(size)] = 1.0;
    starts.push_back(std::move(g));
  }

  LsResult res;
  res.ratio = std::numeric_limits<double>::infinity();
  res.converged = true;
  std::vector<double> best;
  for (auto& g0 : starts) {
    const auto run = descend(p, std::move(g0), opts);
    res.start_ratios.push_back(run.ratio);
    res.converged = res.converged && run.converged;
    if (run.ratio < res.ratio) {
      res.ratio = run.ratio;
      best = run.g;
    }
  }
  require(std::isfinite(res.ratio), ErrorKind::Numerical, "log-Sobolev search found no admissible density");
  res.scaled = double(p.n) * p.n * res.ratio;
  res.density.resize(size);
  for (std::size_t s = 0; s < size; ++s) res.density[s] = best[s] * best[s];  // best has integral g^2 d nu = 1
  return res;
}

// ---- trajectories ------------------------------------------------------------------

std::vector<TrajectoryPoint> entropy_trajectory(const GeneratorSpec& g, const ProfileSpec& profile,
                                                std::span<const double> times) {
  require(std::abs(profile.rho() - g.rho) <= 1e-15, ErrorKind::Config,
          "profile boundary density differs from the reservoir density");
  require(g.n.value() <= 13, ErrorKind::Size, "entropy trajectories are limited to n <= 12 sites");
  require(std::is_sorted(times.begin(), times.end()), ErrorKind::Domain, "times must be sorted");
  const StateSpace space(g.n);
  const int m = space.sites();
  const double rho = g.rho;
  const HeatSolution heat(profile, g.n);
  const auto nubar = product_distribution(BernoulliField::constant(g.n, rho));
  const std::size_t size = space.size();

  auto deviation_of = [&](double t) {  // nu_t - nu_bar, and nu_t
    const auto dev = heat.deviation(t);
    const auto l = log_likelihood(m, rho, dev.bulk());
    std::vector<double> d(size), nu(size);
    for (std::size_t s = 0; s < size; ++s) {
      d[s] = nubar[s] * std::expm1(l[s]);
      nu[s] = nubar[s] + d[s];
    }
    return std::pair{d, nu};
  };

  auto e = deviation_of(0.0).first;  // mu_0 - nu_bar
  double now = 0.0, truncation = 0.0;
  std::vector<TrajectoryPoint> out;
  for (double t : times) {
    require(t >= 0.0, ErrorKind::Domain, "times must be nonnegative");
    double tr = 0.0;
    e = evolve_signed(g, e, t - now, {1e-30}, &tr);
    truncation += tr;
    now = t;
    const auto [d, nu] = deviation_of(t);
    const auto u = heat.at(t);
    const auto du = heat.time_derivative(t);
    std::vector<double> r(size), mu(size);
    for (std::size_t s = 0; s < size; ++s) {
      r[s] = (e[s] - d[s]) / nu[s];
      mu[s] = nubar[s] + e[s];
    }
    TrajectoryPoint p;
    p.t = t;
    p.entropy = relative_entropy_from_deviation(nu, r);
    p.tv_chain = 0.5 * std::accumulate(e.begin(), e.end(), 0.0, [](double a, double x) { return a + std::abs(x); });
    p.tv_product = 0.5 * std::accumulate(d.begin(), d.end(), 0.0, [](double a, double x) { return a + std::abs(x); });
    p.yau = yau_from_deviation(g, mu, nu, r, u.bulk());
    const auto le = generator_forward_apply(g, e);
    const auto w = omega_table(m, u.bulk());
    double dh = 0.0;
    for (std::size_t s = 0; s < size; ++s) {
      double dlogpsi = 0.0;
      for (int i = 0; i < m; ++i) dlogpsi += du[i + 1] * w[s * m + i];
      dh += le[s] * std::log1p(r[s]) - nu[s] * r[s] * dlogpsi;
    }
    p.dHdt = dh;
    p.truncation = truncation;
    p.triangle_ok = std::abs(p.tv_chain - p.tv_product) <= std::sqrt(p.entropy / 2) + 1e-10;
    out.push_back(p);
  }
  return out;
}

std::vector<FdCheck> entropy_derivative_fd(const GeneratorSpec& g, const ProfileSpec& profile,
                                           std::span<const double> times, double step, double tol) {
  require(step > 0.0, ErrorKind::Domain, "finite-difference step must be positive");
  std::vector<double> grid;
  for (double t : times) {
    require(t > step, ErrorKind::Domain, "finite-difference times must exceed the step");
    for (double k : {-1.0, -0.5, 0.0, 0.5, 1.0}) grid.push_back(t + k * step);
  }
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return grid[a] < grid[b]; });
  std::vector<double> sorted(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = grid[order[i]];
  const auto traj = entropy_trajectory(g, profile, sorted);
  std::vector<TrajectoryPoint> at(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) at[order[i]] = traj[i];

  std::vector<FdCheck> out;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const auto* q = &at[5 * j];
    FdCheck c;
    c.t = times[j];
    const double coarse = (q[4].entropy - q[0].entropy) / (2 * step);
    const double fine = (q[3].entropy - q[1].entropy) / step;
    c.fd.value = (4 * fine - coarse) / 3;
    c.fd.mismatch = std::abs(coarse - fine);
    c.fd.reliable = c.fd.mismatch <= 10 * tol;
    c.point = q[2];
    out.push_back(c);
  }
  return out;
}

}  // namespace ssep
