#include "ssep/monte_carlo.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ssep/error.hpp"
#include "ssep/parallel.hpp"

namespace ssep {
namespace {

constexpr std::uint64_t kChunk = 128;
constexpr std::uint64_t kReferenceStream = std::uint64_t{1} << 62;
constexpr double kMinPerBin = 10.0;

void sample_bytes(const ProfileSpec& profile, int n, Rng& rng, std::vector<std::uint8_t>& eta) {
  eta.resize(static_cast<std::size_t>(n - 1));
  for (int x = 1; x < n; ++x) eta[x - 1] = rng.uniform() < profile(double(x) / n);
}

// Applies `count` events of the uniformised chain on the byte configuration.
void run_events(std::uint8_t* eta, int m, double rho, std::uint64_t count, Rng& rng) {
  const auto slots = static_cast<std::uint64_t>(m + 1);  // m-1 edges, then sites 1 and n-1
  const auto edges = static_cast<std::uint64_t>(m - 1);
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::uint64_t j = rng.below(slots);
    if (j < edges) {
      std::swap(eta[j], eta[j + 1]);
    } else {
      eta[j == edges ? 0 : m - 1] = rng.uniform() < rho;
    }
  }
}

std::uint64_t advance(std::vector<std::uint8_t>& eta, double rate, double rho, double dt, Rng& rng) {
  const std::uint64_t count = rng.poisson(rate * dt);
  run_events(eta.data(), static_cast<int>(eta.size()), rho, count, rng);
  return count;
}

}  // namespace

SimConfig::SimConfig(LatticeSize n_, ProfileSpec profile_, double horizon_, std::uint64_t replicas_,
                     std::uint64_t seed_, int workers_)
    : n(n_), profile(std::move(profile_)), rho(profile.rho()), horizon(horizon_), replicas(replicas_),
      seed(seed_), workers(workers_) {
  require(n.value() >= 3, ErrorKind::Domain, "simulation needs n >= 3");
  require(replicas >= 1, ErrorKind::Domain, "simulation needs at least one replica");
  require(horizon >= 0.0 && std::isfinite(horizon), ErrorKind::Domain, "horizon must be finite and nonnegative");
  require(workers >= 1, ErrorKind::Domain, "worker count must be positive");
}

double SimConfig::clock_rate() const {
  const double n2 = double(n.value()) * n.value();
  return n2 * (n.value() - 2) + 2 * n2;
}

Configuration sample_initial(const ProfileSpec& profile, LatticeSize n, Rng& rng) {
  Configuration c(n.bulk());
  for (int x = 1; x < n.value(); ++x) c.set(x, rng.uniform() < profile(double(x) / n.value()));
  return c;
}

Configuration sample_initial(const ProfileSpec& profile, LatticeSize n, std::uint64_t seed) {
  Rng rng(seed, 0);
  return sample_initial(profile, n, rng);
}

std::uint64_t simulate_to(Configuration& eta, double rho, double t, Rng& rng) {
  require(t >= 0.0 && std::isfinite(t), ErrorKind::Domain, "simulation time must be finite and nonnegative");
  require(rho > 0.0 && rho < 1.0, ErrorKind::Domain, "reservoir density must lie in (0,1)");
  const int m = eta.sites();
  require(m >= 2, ErrorKind::Domain, "simulation needs n >= 3");
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(m));
  for (int x = 1; x <= m; ++x) bytes[x - 1] = eta[x];
  const double n = m + 1;
  const std::uint64_t events = advance(bytes, n * n * n, rho, t, rng);
  for (int x = 1; x <= m; ++x) eta.set(x, bytes[x - 1]);
  return events;
}

double OccupationStats::mean_se(int i) const { return std::sqrt(variance[i] / double(replicas)); }

std::vector<OccupationStats> estimate_occupation(const SimConfig& cfg, std::span<const double> times) {
  require(std::is_sorted(times.begin(), times.end()), ErrorKind::Domain, "times must be sorted");
  for (double t : times)
    require(t >= 0.0 && t <= cfg.horizon, ErrorKind::Domain, "observation time outside [0, horizon]");
  const int n = cfg.n.value(), m = n - 1;
  const std::size_t nt = times.size();
  const HeatSolution heat(cfg.profile, cfg.n);
  std::vector<std::vector<double>> u(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    const auto f = heat.at(times[k]);
    u[k].assign(f.bulk().begin(), f.bulk().end());
  }

  struct Sums {
    std::vector<double> eta, w, w2;
    double events = 0;
  };
  const std::uint64_t chunks = (cfg.replicas + kChunk - 1) / kChunk;
  std::vector<Sums> parts(chunks);
  const double rate = cfg.clock_rate();
  parallel_for(chunks, cfg.workers, [&](std::size_t c) {
    Sums s;
    s.eta.assign(nt * m, 0.0);
    s.w.assign(nt * (m - 1), 0.0);
    s.w2.assign(nt * (m - 1), 0.0);
    std::vector<std::uint8_t> eta;
    const std::uint64_t end = std::min<std::uint64_t>(cfg.replicas, (c + 1) * kChunk);
    for (std::uint64_t r = c * kChunk; r < end; ++r) {
      Rng rng(cfg.seed, r);
      sample_bytes(cfg.profile, n, rng, eta);
      double now = 0.0;
      for (std::size_t k = 0; k < nt; ++k) {
        s.events += double(advance(eta, rate, cfg.rho, times[k] - now, rng));
        now = times[k];
        const auto& uk = u[k];
        double prev = 0.0;
        for (int i = 0; i < m; ++i) {
          s.eta[k * m + i] += eta[i];
          const double w = (eta[i] - uk[i]) / (uk[i] * (1 - uk[i]));
          if (i > 0) {
            s.w[k * (m - 1) + i - 1] += prev * w;
            s.w2[k * (m - 1) + i - 1] += prev * w * prev * w;
          }
          prev = w;
        }
      }
    }
    parts[c] = std::move(s);
  });

  const double reps = double(cfg.replicas);
  std::vector<OccupationStats> out(nt);
  double events = 0;
  for (const auto& p : parts) events += p.events;
  for (std::size_t k = 0; k < nt; ++k) {
    auto& o = out[k];
    o.t = times[k];
    o.replicas = cfg.replicas;
    o.events_per_replica = events / reps;
    o.mean.assign(m, 0.0);
    o.variance.assign(m, 0.0);
    o.omega_mean.assign(m - 1, 0.0);
    o.omega_se.assign(m - 1, 0.0);
    std::vector<double> w2(m - 1, 0.0);
    for (const auto& p : parts) {
      for (int i = 0; i < m; ++i) o.mean[i] += p.eta[k * m + i];
      for (int i = 0; i + 1 < m; ++i) {
        o.omega_mean[i] += p.w[k * (m - 1) + i];
        w2[i] += p.w2[k * (m - 1) + i];
      }
    }
    for (int i = 0; i < m; ++i) {
      o.mean[i] /= reps;
      o.variance[i] = reps > 1 ? o.mean[i] * (1 - o.mean[i]) * reps / (reps - 1) : 0.0;
    }
    for (int i = 0; i + 1 < m; ++i) {
      o.omega_mean[i] /= reps;
      const double var = reps > 1 ? std::max(0.0, (w2[i] - reps * o.omega_mean[i] * o.omega_mean[i]) / (reps - 1)) : 0.0;
      o.omega_se[i] = std::sqrt(var / reps);
    }
  }
  return out;
}

StatisticTv tv_lower_bound_statistic(const SimConfig& cfg, double t, int ell0, int bins) {
  require(cfg.replicas >= 1000, ErrorKind::Domain, "the statistic lower bound needs at least 1000 replicas");
  require(t >= 0.0 && t <= cfg.horizon, ErrorKind::Domain, "observation time outside [0, horizon]");
  require(bins >= 0, ErrorKind::Domain, "bin count must be nonnegative");
  const int n = cfg.n.value(), m = n - 1;
  require(ell0 >= 1 && ell0 < n, ErrorKind::Domain, "mode index outside {1, ..., n-1}");
  std::vector<double> phi(m);
  for (int x = 1; x < n; ++x) phi[x - 1] = eigenfunction(cfg.n, ell0, x) / std::sqrt(double(n));
  auto statistic = [&](const std::vector<std::uint8_t>& eta) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += phi[i] * (eta[i] - cfg.rho);
    return s;
  };

  const std::uint64_t reps = cfg.replicas;
  std::vector<double> s_mu(reps), s_ref(reps);
  const std::uint64_t chunks = (reps + kChunk - 1) / kChunk;
  const double rate = cfg.clock_rate();
  const auto flat = ProfileSpec::constant(cfg.rho);
  parallel_for(chunks, cfg.workers, [&](std::size_t c) {
    std::vector<std::uint8_t> eta;
    const std::uint64_t end = std::min<std::uint64_t>(reps, (c + 1) * kChunk);
    for (std::uint64_t r = c * kChunk; r < end; ++r) {
      Rng rng(cfg.seed, r);
      sample_bytes(cfg.profile, n, rng, eta);
      advance(eta, rate, cfg.rho, t, rng);
      s_mu[r] = statistic(eta);
      Rng ref(cfg.seed, kReferenceStream + r);
      sample_bytes(flat, n, ref, eta);
      s_ref[r] = statistic(eta);
    }
  });

  const auto [lo_mu, hi_mu] = std::minmax_element(s_mu.begin(), s_mu.end());
  const auto [lo_ref, hi_ref] = std::minmax_element(s_ref.begin(), s_ref.end());
  const double lo = std::min(*lo_mu, *lo_ref), hi = std::max(*hi_mu, *hi_ref);
  StatisticTv out;
  int count = bins;
  if (count == 0) {
    std::vector<double> sorted(s_ref);
    std::sort(sorted.begin(), sorted.end());
    const double iqr = sorted[3 * reps / 4] - sorted[reps / 4];
    const double width = 2.0 * iqr / std::cbrt(double(reps));
    count = width > 0 ? static_cast<int>(std::ceil((hi - lo) / width)) : 1;
  }
  const int cap = std::max(1, static_cast<int>(double(reps) / kMinPerBin));
  if (count > cap) {
    count = cap;
    out.widened = true;
  }
  count = std::max(count, 1);
  out.bins = count;
  const double width = hi > lo ? (hi - lo) / count : 1.0;
  std::vector<double> cm(count, 0.0), cr(count, 0.0);
  auto cell = [&](double s) { return std::clamp(static_cast<int>((s - lo) / width), 0, count - 1); };
  for (double s : s_mu) cm[cell(s)] += 1;
  for (double s : s_ref) cr[cell(s)] += 1;

  const double nn = double(reps);
  double raw = 0.0, bias = 0.0, sp = 0.0, sq = 0.0, ap = 0.0, aq = 0.0;
  for (int i = 0; i < count; ++i) {
    const double p = cm[i] / nn, q = cr[i] / nn;
    raw += std::abs(p - q);
    const double pooled = (cm[i] + cr[i]) / (2 * nn);
    bias += std::sqrt(2.0 / std::numbers::pi) * std::sqrt(pooled * (1 - pooled) * 2.0 / nn);
    const double sign = p > q ? 1.0 : (p < q ? -1.0 : 0.0);
    sp += sign * p, sq += sign * q;
    ap += sign * sign * p, aq += sign * sign * q;
  }
  out.raw = 0.5 * raw;
  out.estimate = out.raw - 0.5 * bias;
  const double var = 0.25 * ((ap - sp * sp) / nn + (aq - sq * sq) / nn);
  out.se = std::sqrt(std::max(var, 0.0));
  return out;
}

std::vector<double> resampling_rate_matrix(LatticeSize n, double rho) {
  const int m = n.bulk();
  require(n.value() >= 3 && m <= 10, ErrorKind::Size, "rate matrix needs 3 <= n and n-1 <= 10");
  const std::size_t size = std::size_t{1} << m;
  const double n2 = double(n.value()) * n.value();
  std::vector<double> q(size * size, 0.0);
  for (std::size_t s = 0; s < size; ++s) {
    for (int e = 0; e + 1 < m; ++e)  // exchange slot: swap, a self-loop when the bits agree
      if (((s >> e) ^ (s >> (e + 1))) & 1) q[s * size + (s ^ (std::size_t{3} << e))] += n2;
    for (int b : {0, m - 1}) {  // resampling slot: set to 1 w.p. rho, to 0 w.p. 1 - rho
      const std::size_t bit = std::size_t{1} << b;
      if (s & bit)
        q[s * size + (s & ~bit)] += n2 * (1 - rho);
      else
        q[s * size + (s | bit)] += n2 * rho;
    }
  }
  return q;
}

ChiSquare chi_square_gof(std::span<const double> counts, std::span<const double> probs, double min_expected) {
  require(counts.size() == probs.size() && !counts.empty(), ErrorKind::Domain, "chi-square inputs differ in length");
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<std::pair<double, double>> cells;  // (observed, expected)
  double obs = 0.0, exp = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    obs += counts[i];
    exp += probs[i] * total;
    if (exp >= min_expected) {
      cells.emplace_back(obs, exp);
      obs = exp = 0.0;
    }
  }
  if (exp > 0.0 || obs > 0.0) {
    if (cells.empty())
      cells.emplace_back(obs, exp);
    else
      cells.back().first += obs, cells.back().second += exp;
  }
  ChiSquare out;
  for (const auto& [o, e] : cells) out.statistic += e > 0 ? (o - e) * (o - e) / e : (o > 0 ? INFINITY : 0.0);
  out.dof = static_cast<int>(cells.size()) - 1;
  if (out.dof >= 1 && std::isfinite(out.statistic))
    out.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(out.dof), out.statistic));
  else if (!std::isfinite(out.statistic))
    out.p_value = 0.0;
  return out;
}

}  // namespace ssep
