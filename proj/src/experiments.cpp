#include "ssep/experiments.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "ssep/chain_checks.hpp"
#include "ssep/error.hpp"
#include "ssep/exact_chain.hpp"
#include "ssep/heat_lemmas.hpp"
#include "ssep/monte_carlo.hpp"
#include "ssep/parallel.hpp"
#include "ssep/rng.hpp"
#include "ssep/spectral_heat.hpp"

namespace ssep {
namespace {

// ---- settings parsing ----

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  fail(ErrorKind::Config, "setting " + key + " = '" + value + "': " + why);
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(out)) bad_value(key, raw, "expected a finite number");
  return out;
}

long long parse_int(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  long long out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) bad_value(key, raw, "expected an integer");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  std::uint64_t out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size()) bad_value(key, raw, "expected an unsigned integer");
  return out;
}

int parse_positive(const std::string& key, const std::string& raw) {
  const long long v = parse_int(key, raw);
  if (v < 1 || v > (1LL << 30)) bad_value(key, raw, "expected a positive integer");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  bad_value(key, raw, "expected true or false");
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  for (const auto& s : split_list(raw)) out.push_back(parse_double(key, s));
  return out;
}

std::vector<int> parse_ints(const std::string& key, const std::string& raw) {
  std::vector<int> out;
  for (const auto& s : split_list(raw)) out.push_back(static_cast<int>(parse_int(key, s)));
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "experiment.id",          "experiment.seed",        "experiment.workers",     "experiment.timing",
      "profile.kind",           "profile.rho",            "profile.amplitude",      "profile.mode",
      "profile.amplitudes",     "profile.values",         "profile.eps0",           "profile.kappa",
      "grid.n",                 "grid.b",                 "grid.t",                 "grid.t_range",
      "methods.tv",             "methods.enum_max_sites", "methods.chain_max_n",    "methods.grid_max_n",
      "methods.grid_bins",      "methods.grid_tol",       "methods.mc_samples",     "methods.replicas",
      "methods.ls_restarts",    "acceptance.gap_monotone", "acceptance.gap_max",    "acceptance.chain_band",
      "acceptance.chain_band_n", "acceptance.envelope_slack", "acceptance.fit_from", "acceptance.fit_to",
      "acceptance.sigma"};
  return keys;
}

ProfileSpec build_profile(const Settings& s) {
  auto get = [&](const std::string& key, const std::string& fallback) {
    const auto it = s.find(key);
    return it == s.end() ? fallback : it->second;
  };
  ClassBounds bounds;
  if (s.count("profile.eps0")) bounds.eps0 = parse_double("profile.eps0", s.at("profile.eps0"));
  if (s.count("profile.kappa")) bounds.kappa = parse_double("profile.kappa", s.at("profile.kappa"));
  const std::string kind = trim(get("profile.kind", "sine"));
  const double rho = parse_double("profile.rho", get("profile.rho", "0.5"));
  if (kind == "sine") {
    const double amp = parse_double("profile.amplitude", get("profile.amplitude", "0.2"));
    const long long mode = parse_int("profile.mode", get("profile.mode", "1"));
    if (mode < 1 || mode > 1000) bad_value("profile.mode", get("profile.mode", ""), "expected 1..1000");
    return ProfileSpec::single_sine(rho, amp, static_cast<int>(mode), bounds);
  }
  if (kind == "mixture") return ProfileSpec::sine_mixture(rho, parse_doubles("profile.amplitudes", get("profile.amplitudes", "")), bounds);
  if (kind == "constant") return ProfileSpec::constant(rho, bounds);
  if (kind == "tabulated") return ProfileSpec::tabulated(rho, parse_doubles("profile.values", get("profile.values", "")), bounds);
  bad_value("profile.kind", kind, "expected sine, mixture, constant or tabulated");
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
  return v;
}

// ---- shared helpers ----

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::uint64_t cell_seed(std::uint64_t master, int n, std::size_t k) {
  SplitMix64 mix(master ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(n)));
  std::uint64_t s = mix.next();
  for (std::size_t i = 0; i <= k; ++i) s = mix.next();
  return s;
}

struct RowMaker {
  const ExperimentConfig& cfg;
  ResultRow operator()(int n, double b, double t, std::string quantity, double value, double unc,
                       std::string method, bool stochastic = false) const {
    ResultRow r;
    r.experiment = cfg.id;
    r.n = n;
    r.b = b;
    r.t = t;
    r.quantity = std::move(quantity);
    r.value = value;
    r.uncertainty = unc;
    r.method = std::move(method);
    r.stochastic = stochastic;
    r.seed = cfg.seed;
    return r;
  }
};

// Runs independent jobs over the worker pool; each job fills its own slot, so the
// merged result does not depend on completion order.
template <class Job>
std::vector<RunOutput> run_jobs(const ExperimentConfig& cfg, std::vector<Job>& jobs) {
  std::vector<RunOutput> parts(jobs.size());
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
    const auto start = Clock::now();
    parts[i] = jobs[i]();
    if (cfg.timing) {
      const double ms = elapsed_ms(start);
      for (auto& r : parts[i].rows) r.walltime_ms = ms;
    }
  });
  return parts;
}

void absorb(RunOutput& into, RunOutput&& part) {
  for (auto& r : part.rows) into.rows.push_back(std::move(r));
  for (auto& p : part.plots) into.plots.push_back(std::move(p));
  for (auto& c : part.checks) into.checks.push_back(std::move(c));
}

int leading_mode_or_config_error(const ProfileSpec& p, const std::string& experiment) {
  try {
    return find_leading_mode(p);
  } catch (const Error& e) {
    fail(ErrorKind::Config, experiment + " needs a profile with a nonzero mode: " + e.what());
  }
}

struct TvValue {
  double value = 0.0;
  double uncertainty = 0.0;
  bool stochastic = false;
};

std::string auto_method(int n, const MethodLimits& m) {
  if (n - 1 <= m.enum_max_sites) return "enum";
  if (n <= m.grid_max_n) return "grid";
  return "mc";
}

TvValue product_tv(const std::string& method, const BernoulliField& u, double rho, const MethodLimits& m,
                   std::uint64_t seed) {
  if (method == "enum") return {tv_exact_enum(u, rho), 0.0, false};
  if (method == "grid") {
    const auto e = tv_grid_dp(u, rho, m.grid_bins, m.grid_tol);
    return {e.value, e.error_bound, false};
  }
  const auto e = tv_monte_carlo(u, rho, m.mc_samples, seed);
  return {e.value, e.ci95, true};
}

std::string fmt(double v) {
  char buf[64];
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? end : buf);
}

std::string padded(int x, int width) {
  std::string s = std::to_string(x);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

CheckResult make_check(std::string name, bool pass, double margin, std::string detail) {
  return CheckResult{std::move(name), pass, margin, std::move(detail)};
}

void check_rows(RunOutput& out, const RowMaker& row, int n = 0) {
  for (const auto& c : out.checks) {
    out.rows.push_back(row(n, kUnset, kUnset, c.name + ".pass", c.pass ? 1.0 : 0.0, 0.0, "check"));
    out.rows.push_back(row(n, kUnset, kUnset, c.name + ".margin", c.margin, 0.0, "check"));
  }
}

}  // namespace

// ---- configuration ----

Settings read_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file " + path);
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    fail(ErrorKind::Config, "config file " + path + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  Settings out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) fail(ErrorKind::Config, "config file " + path + ": key '" + section + "' outside a section");
    for (const auto& [key, value] : body) out[section + "." + key] = trim(value.data());
  }
  return out;
}

void apply_setting(Settings& settings, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) fail(ErrorKind::Config, "override '" + assignment + "' is not of the form section.key=value");
  const std::string key = trim(assignment.substr(0, eq));
  if (key.find('.') == std::string::npos) fail(ErrorKind::Config, "override key '" + key + "' needs a section prefix");
  settings[key] = trim(assignment.substr(eq + 1));
}

ExperimentConfig build_config(const std::string& experiment, const Settings& s) {
  static const std::set<std::string> ids{"cutoff", "entropy", "lemmas", "heat", "tv", "mc"};
  if (!ids.count(experiment)) fail(ErrorKind::Config, "unknown experiment '" + experiment + "'");
  for (const auto& [key, value] : s)
    if (!known_keys().count(key)) fail(ErrorKind::Config, "unknown setting " + key);
  if (s.count("experiment.id") && trim(s.at("experiment.id")) != experiment)
    fail(ErrorKind::Config, "config is for experiment '" + s.at("experiment.id") + "', not '" + experiment + "'");

  ExperimentConfig cfg;
  cfg.id = experiment;
  const std::vector<double> b_default{-2, -1, 0, 1, 2};
  if (experiment == "cutoff") {
    cfg.ns = {8, 10, 12, 256, 1024};
    cfg.bs = b_default;
  } else if (experiment == "entropy") {
    cfg.ns = {8};
    cfg.times = linspace(0.1, 1.5, 15);
  } else if (experiment == "lemmas") {
    cfg.times = {0.0, 0.001, 0.01, 0.05, 0.1, 0.3, 1.0};
  } else if (experiment == "heat") {
    cfg.ns = {64};
    cfg.times = {0.0, 0.01, 0.05, 0.1, 0.2};
  } else if (experiment == "tv") {
    cfg.ns = {256, 1024};
    cfg.bs = b_default;
  } else {
    cfg.ns = {64};
    cfg.times = {0.05, 0.1, 0.2};
    cfg.bs = {0.0};
  }

  auto has = [&](const char* k) { return s.count(k) > 0; };
  auto at = [&](const char* k) { return s.at(k); };
  if (has("experiment.seed")) cfg.seed = parse_u64("experiment.seed", at("experiment.seed"));
  if (has("experiment.workers")) cfg.workers = parse_positive("experiment.workers", at("experiment.workers"));
  if (has("experiment.timing")) cfg.timing = parse_bool("experiment.timing", at("experiment.timing"));
  cfg.profile = build_profile(s);
  if (has("grid.n")) cfg.ns = parse_ints("grid.n", at("grid.n"));
  if (has("grid.b")) cfg.bs = parse_doubles("grid.b", at("grid.b"));
  if (has("grid.t") && has("grid.t_range")) fail(ErrorKind::Config, "grid.t and grid.t_range are exclusive");
  if (has("grid.t")) cfg.times = parse_doubles("grid.t", at("grid.t"));
  if (has("grid.t_range")) {
    const auto r = parse_doubles("grid.t_range", at("grid.t_range"));
    if (r.size() != 3 || r[2] < 1 || r[2] != std::floor(r[2]) || r[1] < r[0])
      bad_value("grid.t_range", at("grid.t_range"), "expected start, stop, count");
    cfg.times = linspace(r[0], r[1], static_cast<int>(r[2]));
  }

  auto& m = cfg.methods;
  if (has("methods.tv")) m.tv = trim(at("methods.tv"));
  if (has("methods.enum_max_sites")) m.enum_max_sites = parse_positive("methods.enum_max_sites", at("methods.enum_max_sites"));
  if (has("methods.chain_max_n")) m.chain_max_n = static_cast<int>(parse_int("methods.chain_max_n", at("methods.chain_max_n")));
  if (has("methods.grid_max_n")) m.grid_max_n = parse_positive("methods.grid_max_n", at("methods.grid_max_n"));
  if (has("methods.grid_bins")) m.grid_bins = parse_positive("methods.grid_bins", at("methods.grid_bins"));
  if (has("methods.grid_tol")) m.grid_tol = parse_double("methods.grid_tol", at("methods.grid_tol"));
  if (has("methods.mc_samples")) m.mc_samples = parse_u64("methods.mc_samples", at("methods.mc_samples"));
  if (has("methods.replicas")) m.replicas = parse_u64("methods.replicas", at("methods.replicas"));
  if (has("methods.ls_restarts")) m.ls_restarts = static_cast<int>(parse_int("methods.ls_restarts", at("methods.ls_restarts")));

  auto& a = cfg.accept;
  if (has("acceptance.gap_monotone")) a.gap_monotone = parse_bool("acceptance.gap_monotone", at("acceptance.gap_monotone"));
  if (has("acceptance.gap_max")) a.gap_max = parse_double("acceptance.gap_max", at("acceptance.gap_max"));
  if (has("acceptance.chain_band")) a.chain_band = parse_double("acceptance.chain_band", at("acceptance.chain_band"));
  if (has("acceptance.chain_band_n")) a.chain_band_n = static_cast<int>(parse_int("acceptance.chain_band_n", at("acceptance.chain_band_n")));
  if (has("acceptance.envelope_slack")) a.envelope_slack = parse_double("acceptance.envelope_slack", at("acceptance.envelope_slack"));
  if (has("acceptance.fit_from")) a.fit_from = parse_double("acceptance.fit_from", at("acceptance.fit_from"));
  if (has("acceptance.fit_to")) a.fit_to = parse_double("acceptance.fit_to", at("acceptance.fit_to"));
  if (has("acceptance.sigma")) a.sigma = parse_double("acceptance.sigma", at("acceptance.sigma"));

  // validation
  std::sort(cfg.ns.begin(), cfg.ns.end());
  cfg.ns.erase(std::unique(cfg.ns.begin(), cfg.ns.end()), cfg.ns.end());
  std::sort(cfg.bs.begin(), cfg.bs.end());
  cfg.bs.erase(std::unique(cfg.bs.begin(), cfg.bs.end()), cfg.bs.end());
  std::sort(cfg.times.begin(), cfg.times.end());
  cfg.times.erase(std::unique(cfg.times.begin(), cfg.times.end()), cfg.times.end());
  if (experiment != "lemmas" && cfg.ns.empty()) fail(ErrorKind::Config, "grid.n is empty");
  for (int n : cfg.ns) {
    if (n < 3) fail(ErrorKind::Config, "n = " + std::to_string(n) + " is below 3 (the boundary set degenerates at n = 2)");
    if (n > (1 << 20)) fail(ErrorKind::Config, "n = " + std::to_string(n) + " exceeds 2^20");
  }
  for (double t : cfg.times)
    if (t < 0.0) fail(ErrorKind::Config, "grid.t has a negative time");
  if ((experiment == "cutoff" || experiment == "tv") && cfg.bs.empty()) fail(ErrorKind::Config, "grid.b is empty");
  if ((experiment == "entropy" || experiment == "heat" || experiment == "mc") && cfg.times.empty())
    fail(ErrorKind::Config, "grid.t is empty");
  if (experiment == "entropy")
    for (int n : cfg.ns)
      if (n > 13) fail(ErrorKind::Config, "entropy decay runs on the exact chain: n <= 13, got " + std::to_string(n));
  if (m.chain_max_n > 13) fail(ErrorKind::Config, "methods.chain_max_n is capped at 13");
  if (m.enum_max_sites > 22) fail(ErrorKind::Config, "methods.enum_max_sites is capped at 22");
  if (!(m.grid_tol > 0.0)) fail(ErrorKind::Config, "methods.grid_tol must be positive");
  if (m.mc_samples < 1000) fail(ErrorKind::Config, "methods.mc_samples must be >= 1000");
  if (m.replicas < 1000) fail(ErrorKind::Config, "methods.replicas must be >= 1000");
  if (m.ls_restarts < 0) fail(ErrorKind::Config, "methods.ls_restarts must be >= 0");
  if (!(a.sigma > 0.0)) fail(ErrorKind::Config, "acceptance.sigma must be positive");
  static const std::set<std::string> tv_methods{"auto", "enum", "grid", "mc"};
  const auto tv_list = split_list(m.tv);
  if (tv_list.empty()) fail(ErrorKind::Config, "methods.tv is empty");
  for (const auto& t : tv_list)
    if (!tv_methods.count(t)) bad_value("methods.tv", m.tv, "expected auto, enum, grid or mc");
  if (experiment == "cutoff" && tv_list.size() != 1) fail(ErrorKind::Config, "cutoff takes a single methods.tv");
  for (const auto& t : tv_list)
    if (t == "enum")
      for (int n : cfg.ns)
        if (n - 1 > 22) fail(ErrorKind::Config, "enumeration needs n - 1 <= 22, got n = " + std::to_string(n));
  return cfg;
}

bool RunOutput::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

// ---- experiments ----

RunOutput run_cutoff_curve(const ExperimentConfig& cfg) {
  const RowMaker row{cfg};
  const ProfileSpec& p = cfg.profile;
  const double rho = p.rho();
  const int ell0 = leading_mode_or_config_error(p, "cutoff");
  const double gamma = gamma_const(p);
  const std::string tv_choice = split_list(cfg.methods.tv).front();

  std::vector<std::function<RunOutput()>> jobs;
  for (int n : cfg.ns) {
    for (std::size_t k = 0; k < cfg.bs.size(); ++k) {
      jobs.emplace_back([&, n, k] {
        RunOutput out;
        const double b = cfg.bs[k];
        const auto ct = cutoff_time(n, ell0, b);
        const auto u = BernoulliField::from_field(HeatSolution(p, LatticeSize(n)).at(ct.t));
        const std::string method = tv_choice == "auto" ? auto_method(n, cfg.methods) : tv_choice;
        const auto tv = product_tv(method, u, rho, cfg.methods, cell_seed(cfg.seed, n, k));
        const double g = gaussian_profile(gamma * std::exp(-b));
        out.rows.push_back(row(n, b, ct.t, "tv_product", tv.value, tv.uncertainty, method, tv.stochastic));
        out.rows.push_back(row(n, b, ct.t, "target_G", g, 0.0, "closed_form"));
        out.rows.push_back(row(n, b, ct.t, "gap", std::abs(tv.value - g), tv.uncertainty, method, tv.stochastic));
        if (ct.clamped) out.rows.push_back(row(n, b, ct.t, "clamped", 1.0, 0.0, "formula"));
        return out;
      });
    }
    if (n <= cfg.methods.chain_max_n) {
      jobs.emplace_back([&, n] {
        RunOutput out;
        std::vector<double> times;
        for (double b : cfg.bs) times.push_back(cutoff_time(n, ell0, b).t);
        std::vector<double> unique = times;
        unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
        const auto traj = entropy_trajectory(GeneratorSpec(LatticeSize(n), rho), p, unique);
        double worst = INFINITY, band_worst = 0.0;
        bool banded = false;
        for (std::size_t k = 0; k < cfg.bs.size(); ++k) {
          const auto it = std::find(unique.begin(), unique.end(), times[k]);
          const auto& pt = traj[static_cast<std::size_t>(it - unique.begin())];
          const double b = cfg.bs[k];
          const double slack = std::sqrt(pt.entropy / 2) + 1e-10 - std::abs(pt.tv_chain - pt.tv_product);
          worst = std::min(worst, slack);
          out.rows.push_back(row(n, b, pt.t, "tv_chain", pt.tv_chain, pt.truncation, "exact_chain"));
          out.rows.push_back(row(n, b, pt.t, "entropy", pt.entropy, 0.0, "exact_chain"));
          out.rows.push_back(row(n, b, pt.t, "triangle_slack", slack, 0.0, "exact_chain"));
          if (n == cfg.accept.chain_band_n && !std::isnan(cfg.accept.chain_band) && !cutoff_time(n, ell0, b).clamped) {
            banded = true;
            band_worst = std::max(band_worst, std::abs(pt.tv_chain - gaussian_profile(gamma * std::exp(-b))));
          }
        }
        std::ostringstream d;
        d << "n = " << n << ": min sqrt(H/2) - |D - TV| = " << worst;
        out.checks.push_back(make_check("triangle_n" + std::to_string(n), worst >= 0.0, worst, d.str()));
        if (banded) {
          std::ostringstream e;
          e << "n = " << n << ": max |D - G| over unclamped b = " << band_worst;
          out.checks.push_back(make_check("chain_band_n" + std::to_string(n), band_worst <= cfg.accept.chain_band,
                                          cfg.accept.chain_band - band_worst, e.str()));
        }
        return out;
      });
    }
  }
  RunOutput out;
  for (auto& part : run_jobs(cfg, jobs)) absorb(out, std::move(part));

  // per-n gap and plot curves
  std::vector<double> gaps;
  for (int n : cfg.ns) {
    double gap = 0.0;
    PlotSeries tv{"cutoff_n" + std::to_string(n) + "_tv.dat", "cutoff n=" + std::to_string(n), "b", "tv_product", {}};
    PlotSeries target{"cutoff_n" + std::to_string(n) + "_target.dat", "cutoff n=" + std::to_string(n), "b", "target_G", {}};
    PlotSeries chain{"cutoff_n" + std::to_string(n) + "_chain.dat", "cutoff n=" + std::to_string(n), "b", "tv_chain", {}};
    for (const auto& r : out.rows) {
      if (r.n != n) continue;
      if (r.quantity == "gap") gap = std::max(gap, r.value);
      if (r.quantity == "tv_product") tv.points.emplace_back(r.b, r.value);
      if (r.quantity == "target_G") target.points.emplace_back(r.b, r.value);
      if (r.quantity == "tv_chain") chain.points.emplace_back(r.b, r.value);
    }
    gaps.push_back(gap);
    out.rows.push_back(row(n, kUnset, kUnset, "max_gap", gap, 0.0, "derived"));
    for (auto* s : {&tv, &target, &chain}) {
      std::sort(s->points.begin(), s->points.end());
      if (!s->points.empty()) out.plots.push_back(std::move(*s));
    }
  }
  if (cfg.accept.gap_monotone) {
    bool ok = true;
    double margin = INFINITY;
    std::ostringstream d;
    d << "max_b gaps:";
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      d << ' ' << gaps[i];
      if (i) {
        ok = ok && gaps[i] < gaps[i - 1];
        margin = std::min(margin, gaps[i - 1] - gaps[i]);
      }
    }
    out.checks.push_back(make_check("gap_monotone", ok, gaps.size() > 1 ? margin : 0.0, d.str()));
  }
  if (!std::isnan(cfg.accept.gap_max)) {
    std::ostringstream d;
    d << "max_b gap at n = " << cfg.ns.back() << ": " << gaps.back();
    out.checks.push_back(make_check("gap_max", gaps.back() <= cfg.accept.gap_max, cfg.accept.gap_max - gaps.back(), d.str()));
  }
  out.rows.push_back(row(0, kUnset, kUnset, "gamma", gamma, 0.0, "closed_form"));
  check_rows(out, row);
  return out;
}

std::pair<double, double> fit_exponential(const std::vector<double>& t, const std::vector<double>& h) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(h[i] > 0.0)) continue;
    const double y = std::log(h[i]);
    sx += t[i], sy += y, sxx += t[i] * t[i], sxy += t[i] * y;
    ++m;
  }
  require(m >= 2, ErrorKind::Numerical, "exponential fit needs two positive points");
  const double denom = m * sxx - sx * sx;
  require(denom > 0.0, ErrorKind::Numerical, "exponential fit needs two distinct times");
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;
  return {-slope, std::exp(intercept)};
}

RunOutput run_entropy_decay(const ExperimentConfig& cfg) {
  const RowMaker row{cfg};
  const ProfileSpec& p = cfg.profile;
  std::vector<std::function<RunOutput()>> jobs;
  for (int n : cfg.ns) {
    jobs.emplace_back([&, n] {
      RunOutput out;
      const auto traj = entropy_trajectory(GeneratorSpec(LatticeSize(n), p.rho()), p, cfg.times);
      PlotSeries hs{"entropy_n" + std::to_string(n) + "_H.dat", "entropy n=" + std::to_string(n), "t", "entropy", {}};
      PlotSeries ds{"entropy_n" + std::to_string(n) + "_D.dat", "entropy n=" + std::to_string(n), "t", "tv_chain", {}};
      double yau_margin = INFINITY;
      std::vector<double> ft, fh;
      for (const auto& pt : traj) {
        out.rows.push_back(row(n, kUnset, pt.t, "entropy", pt.entropy, 0.0, "exact_chain"));
        out.rows.push_back(row(n, kUnset, pt.t, "tv_chain", pt.tv_chain, pt.truncation, "exact_chain"));
        out.rows.push_back(row(n, kUnset, pt.t, "tv_product", pt.tv_product, 0.0, "exact_chain"));
        out.rows.push_back(row(n, kUnset, pt.t, "dHdt", pt.dHdt, 0.0, "exact_chain"));
        out.rows.push_back(row(n, kUnset, pt.t, "yau_rhs", pt.yau.rhs, 0.0, "exact_chain"));
        out.rows.push_back(row(n, kUnset, pt.t, "yau_gamma", pt.yau.gamma, 0.0, "exact_chain"));
        out.rows.push_back(row(n, kUnset, pt.t, "yau_omega", pt.yau.omega, 0.0, "exact_chain"));
        hs.points.emplace_back(pt.t, pt.entropy);
        ds.points.emplace_back(pt.t, pt.tv_chain);
        yau_margin = std::min(yau_margin, pt.yau.rhs + 1e-6 - pt.dHdt);
        const bool in_range = (std::isnan(cfg.accept.fit_from) || pt.t >= cfg.accept.fit_from) &&
                              (std::isnan(cfg.accept.fit_to) || pt.t <= cfg.accept.fit_to);
        if (in_range && pt.entropy > 0.0) {
          ft.push_back(pt.t);
          fh.push_back(pt.entropy);
        }
      }
      const std::string tag = "_n" + std::to_string(n);
      out.checks.push_back(make_check("yau" + tag, yau_margin >= 0.0, yau_margin, "dH/dt <= rhs + 1e-6 on the grid"));
      if (ft.size() >= 2) {
        const auto [rate, c] = fit_exponential(ft, fh);
        double worst = 0.0;
        for (std::size_t i = 0; i < ft.size(); ++i) worst = std::max(worst, fh[i] / (c * std::exp(-rate * ft[i])));
        out.rows.push_back(row(n, kUnset, kUnset, "fit_rate", rate, 0.0, "least_squares_log"));
        out.rows.push_back(row(n, kUnset, kUnset, "fit_C", c, 0.0, "least_squares_log"));
        out.rows.push_back(row(n, kUnset, kUnset, "envelope_ratio", worst, 0.0, "least_squares_log"));
        std::ostringstream d;
        d << "fitted rate " << rate << " over " << ft.size() << " points";
        out.checks.push_back(make_check("fit_rate" + tag, rate > 0.0, rate, d.str()));
        if (!std::isnan(cfg.accept.envelope_slack)) {
          std::ostringstream e;
          e << "max H / (C exp(-rate t)) = " << worst << " against " << cfg.accept.envelope_slack;
          out.checks.push_back(make_check("envelope" + tag, worst <= cfg.accept.envelope_slack,
                                          cfg.accept.envelope_slack - worst, e.str()));
        }
      }
      out.plots.push_back(std::move(hs));
      out.plots.push_back(std::move(ds));
      return out;
    });
  }
  RunOutput out;
  for (auto& part : run_jobs(cfg, jobs)) absorb(out, std::move(part));
  check_rows(out, row);
  return out;
}

RunOutput run_lemma_suite(const ExperimentConfig& cfg) {
  const RowMaker row{cfg};
  const ProfileSpec& p = cfg.profile;
  bool has_mode = true;
  try {
    find_leading_mode(p);
  } catch (const Error&) {
    has_mode = false;
  }
  const std::vector<int> gradient_ns{16, 64, 256};
  const std::vector<int> riemann_ns{32, 64, 128, 256, 512, 1024, 2048, 4096};
  const std::vector<int> leading_ns{64, 256, 1024, 4096};
  const std::vector<double> leading_bs = linspace(-2.0, 2.0, 9);
  const std::vector<int> max_ns{8, 64, 512};
  const std::vector<int> comparison_ns{4, 5, 6, 7, 8, 9, 10};
  const std::vector<int> chain_ns{3, 4, 5, 6, 7, 8, 9, 10};
  const std::vector<int> small_ns{3, 4, 5, 6, 7, 8};
  std::vector<double> yau_times;
  for (int i = 1; i <= 20; ++i) yau_times.push_back(0.005 + 0.0025 * i * i);
  const std::vector<ProfileSpec> one{p};

  double riemann_c = kUnset;
  std::vector<double> leading_errors;
  checks::ComparisonScan scan;
  checks::LsFloor floor;
  std::vector<std::function<CheckResult()>> tasks{
      [] { return lemmas::eigenvalue_ratio(4, 512); },
      [] { return lemmas::eigenvalue_bounds(4, 512); },
      [&] { return lemmas::gradient_decay(p, gradient_ns, 8); },
      [&] { return lemmas::maximum_principle(p, max_ns, cfg.times); },
      [&] { return checks::comparison_lemma(p, comparison_ns, 200, cfg.seed, &scan); },
      [&] { return checks::correlation_bound(p, chain_ns, cfg.times); },
      [&] { return checks::adjoint_identity(one, chain_ns, cfg.times); },
      [&] { return checks::yau_inequality(p, small_ns, yau_times); },
      [&] { return checks::ls_floor(one, small_ns, cfg.methods.ls_restarts, cfg.seed, 0.5, &floor); },
  };
  if (has_mode) {
    tasks.emplace_back([&] { return lemmas::riemann_error(p, riemann_ns, 3, &riemann_c); });
    tasks.emplace_back([&] { return lemmas::leading_mode_asymptotics(p, leading_ns, leading_bs, &leading_errors); });
  }
  std::vector<CheckResult> results(tasks.size());
  std::vector<double> times(tasks.size(), 0.0);
  parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
    const auto start = Clock::now();
    results[i] = tasks[i]();
    times[i] = cfg.timing ? elapsed_ms(start) : 0.0;
  });

  RunOutput out;
  out.checks = results;
  check_rows(out, row);
  for (std::size_t i = 0; i < out.rows.size(); ++i) out.rows[i].walltime_ms = times[i / 2];
  if (has_mode) out.rows.push_back(row(0, kUnset, kUnset, "riemann_error.fitted_C", riemann_c, 0.0, "fit"));
  for (std::size_t i = 0; i < leading_errors.size(); ++i)
    out.rows.push_back(row(leading_ns[i], kUnset, kUnset, "leading_mode.sup_error", leading_errors[i], 0.0, "spectral"));
  for (std::size_t i = 0; i < scan.ns.size(); ++i)
    out.rows.push_back(row(scan.ns[i], kUnset, kUnset, "comparison.max_ratio", scan.max_ratio[i], 0.0, "random_search"));
  if (!floor.scaled.empty())
    for (std::size_t i = 0; i < floor.ns.size(); ++i)
      out.rows.push_back(row(floor.ns[i], kUnset, kUnset, "ls.scaled_ratio", floor.scaled[0][i], 0.0,
                             floor.converged[0][i] ? "upper_bound_converged" : "upper_bound"));
  return out;
}

RunOutput run_heat(const ExperimentConfig& cfg) {
  const RowMaker row{cfg};
  const ProfileSpec& p = cfg.profile;
  std::vector<std::function<RunOutput()>> jobs;
  for (int n : cfg.ns) {
    jobs.emplace_back([&, n] {
      RunOutput out;
      const LatticeSize size(n);
      const HeatSolution heat(p, size);
      const int width = static_cast<int>(std::to_string(n).size());
      const double lambda1 = eigenvalue(size, 1);
      const auto coeffs = heat.coeffs();
      for (int ell = 1; ell <= std::min(3, n - 1); ++ell) {
        out.rows.push_back(row(n, kUnset, kUnset, "c_" + std::to_string(ell), coeffs[ell - 1], 0.0, "discrete"));
        out.rows.push_back(row(n, kUnset, kUnset, "c_" + std::to_string(ell) + "_continuum",
                               continuum_fourier_coeff(p, ell), 0.0, "quadrature"));
      }
      for (std::size_t k = 0; k < cfg.times.size(); ++k) {
        const double t = cfg.times[k];
        const auto u = heat.at(t);
        PlotSeries s{"heat_n" + std::to_string(n) + "_t" + std::to_string(k) + ".dat",
                     "heat n=" + std::to_string(n) + " t=" + fmt(t), "x/n", "u", {}};
        double dev = 0.0;
        for (int x = 1; x < n; ++x) {
          out.rows.push_back(row(n, kUnset, t, "u[" + padded(x, width) + "]", u[x], 0.0, "spectral"));
          s.points.emplace_back(double(x) / n, u[x]);
          dev = std::max(dev, std::abs(u[x] - p.rho()));
        }
        out.rows.push_back(row(n, kUnset, t, "max_deviation", dev, 0.0, "spectral"));
        out.rows.push_back(row(n, kUnset, t, "grad_sup", discrete_gradient_sup(u), 0.0, "spectral"));
        if (t >= std::log(2.0) / lambda1)
          out.rows.push_back(row(n, kUnset, t, "grad_bound", 8 * std::numbers::pi * std::exp(-lambda1 * t), 0.0, "closed_form"));
        out.plots.push_back(std::move(s));
      }
      const std::vector<int> one{n};
      out.checks.push_back(lemmas::maximum_principle(p, one, cfg.times));
      out.checks.back().name += "_n" + std::to_string(n);
      out.checks.push_back(lemmas::gradient_decay(p, one, 8));
      out.checks.back().name += "_n" + std::to_string(n);
      return out;
    });
  }
  RunOutput out;
  for (auto& part : run_jobs(cfg, jobs)) absorb(out, std::move(part));
  check_rows(out, row);
  return out;
}

RunOutput run_tv(const ExperimentConfig& cfg) {
  const RowMaker row{cfg};
  const ProfileSpec& p = cfg.profile;
  const double rho = p.rho();
  const int ell0 = leading_mode_or_config_error(p, "tv");
  const double gamma = gamma_const(p);
  const auto methods = split_list(cfg.methods.tv);
  std::vector<std::function<RunOutput()>> jobs;
  for (int n : cfg.ns) {
    for (std::size_t k = 0; k < cfg.bs.size(); ++k) {
      jobs.emplace_back([&, n, k] {
        RunOutput out;
        const double b = cfg.bs[k];
        const double t = cutoff_time(n, ell0, b).t;
        const auto u = BernoulliField::from_field(HeatSolution(p, LatticeSize(n)).at(t));
        const auto c = llr_coefficients(u, rho);
        const double kl = product_relative_entropy(u, BernoulliField::constant(LatticeSize(n), rho));
        out.rows.push_back(row(n, b, t, "target_G", gaussian_profile(gamma * std::exp(-b)), 0.0, "closed_form"));
        out.rows.push_back(row(n, b, t, "gamma_e-b", gamma * std::exp(-b), 0.0, "closed_form"));
        out.rows.push_back(row(n, b, t, "s", c.s, 0.0, "llr"));
        out.rows.push_back(row(n, b, t, "bsum", c.bsum, 0.0, "llr"));
        out.rows.push_back(row(n, b, t, "lyapunov_n", n * lyapunov_ratio(c), 0.0, "llr"));
        out.rows.push_back(row(n, b, t, "kl", kl, 0.0, "closed_form"));
        out.rows.push_back(row(n, b, t, "pinsker_bound", std::sqrt(kl / 2), 0.0, "closed_form"));
        std::vector<std::pair<std::string, TvValue>> values;
        for (const auto& m : methods) {
          const std::string method = m == "auto" ? auto_method(n, cfg.methods) : m;
          const auto tv = product_tv(method, u, rho, cfg.methods, cell_seed(cfg.seed, n, k));
          out.rows.push_back(row(n, b, t, "tv_product", tv.value, tv.uncertainty, method, tv.stochastic));
          values.emplace_back(method, tv);
        }
        // certified values count with their error bound, sampled ones with 3 CI half-widths
        auto slack = [](const TvValue& v) { return v.stochastic ? 3.0 * v.uncertainty : v.uncertainty; };
        const std::string tag = "_n" + std::to_string(n) + "_b" + fmt(b);
        bool pinsker_ok = true;
        double pinsker = INFINITY;
        for (const auto& [m, v] : values) {
          const double low = std::max(0.0, v.value - slack(v));
          pinsker_ok = pinsker_ok && pinsker_gap(low, kl);
          pinsker = std::min(pinsker, kl + 1e-12 - 2 * low * low);
        }
        out.checks.push_back(make_check("pinsker" + tag, pinsker_ok, pinsker, "2 TV^2 <= KL"));
        for (std::size_t i = 0; i < values.size(); ++i) {
          for (std::size_t j = i + 1; j < values.size(); ++j) {
            const auto& [mi, vi] = values[i];
            const auto& [mj, vj] = values[j];
            const double allowed = slack(vi) + slack(vj);
            const double diff = std::abs(vi.value - vj.value);
            std::ostringstream d;
            d << mi << " " << vi.value << " vs " << mj << " " << vj.value;
            out.checks.push_back(make_check("agree_" + mi + "_" + mj + tag, diff <= allowed, allowed - diff, d.str()));
          }
        }
        return out;
      });
    }
  }
  RunOutput out;
  for (auto& part : run_jobs(cfg, jobs)) absorb(out, std::move(part));
  for (int n : cfg.ns) {
    std::map<std::string, PlotSeries> curves;
    for (const auto& r : out.rows) {
      if (r.n != n || r.quantity != "tv_product") continue;
      auto& s = curves[r.method];
      if (s.file.empty()) s = {"tv_n" + std::to_string(n) + "_" + r.method + ".dat", "tv n=" + std::to_string(n), "b", "tv_product", {}};
      s.points.emplace_back(r.b, r.value);
    }
    for (auto& [m, s] : curves) {
      std::sort(s.points.begin(), s.points.end());
      out.plots.push_back(std::move(s));
    }
  }
  check_rows(out, row);
  return out;
}

RunOutput run_mc(const ExperimentConfig& cfg) {
  const RowMaker row{cfg};
  const ProfileSpec& p = cfg.profile;
  const double sigma = cfg.accept.sigma;
  int ell0 = 0;
  double gamma = 0.0;
  try {
    ell0 = find_leading_mode(p);
    gamma = gamma_const(p);
  } catch (const Error&) {
    ell0 = 0;  // flat profile: no statistic rows
  }
  RunOutput out;
  for (int n : cfg.ns) {
    const auto start = Clock::now();
    const LatticeSize size(n);
    double horizon = cfg.times.back();
    if (ell0)
      for (double b : cfg.bs) horizon = std::max(horizon, cutoff_time(n, ell0, b).t);
    const SimConfig sim(size, p, horizon, cfg.methods.replicas, cfg.seed, cfg.workers);
    const auto stats = estimate_occupation(sim, cfg.times);
    const HeatSolution heat(p, size);
    const int width = static_cast<int>(std::to_string(n).size());
    const double bound = p.kappa() * p.kappa() / (p.eps0() * p.eps0() * n);
    int outside = 0, checked = 0;
    double zmax = 0.0, omega_margin = INFINITY, omega_max = 0.0;
    const std::size_t first_row = out.rows.size();
    for (std::size_t k = 0; k < stats.size(); ++k) {
      const auto& st = stats[k];
      const auto u = heat.at(st.t);
      PlotSeries ms{"mc_n" + std::to_string(n) + "_t" + std::to_string(k) + "_mean.dat",
                    "mc n=" + std::to_string(n) + " t=" + fmt(st.t), "x/n", "mean", {}};
      PlotSeries hs{"mc_n" + std::to_string(n) + "_t" + std::to_string(k) + "_heat.dat",
                    "mc n=" + std::to_string(n) + " t=" + fmt(st.t), "x/n", "heat", {}};
      for (int x = 1; x < n; ++x) {
        const double se = st.mean_se(x - 1);
        const double diff = std::abs(st.mean[x - 1] - u[x]);
        const double z = se > 0 ? diff / se : (diff > 0 ? INFINITY : 0.0);
        zmax = std::max(zmax, z);
        outside += z > sigma;
        ++checked;
        out.rows.push_back(row(n, kUnset, st.t, "mean[" + padded(x, width) + "]", st.mean[x - 1], se, "monte_carlo", true));
        ms.points.emplace_back(double(x) / n, st.mean[x - 1]);
        hs.points.emplace_back(double(x) / n, u[x]);
      }
      for (int x = 1; x + 1 < n; ++x) {
        const double w = st.omega_mean[x - 1], se = st.omega_se[x - 1];
        omega_margin = std::min(omega_margin, bound + sigma * se - std::abs(w));
        omega_max = std::max(omega_max, std::abs(w));
        out.rows.push_back(row(n, kUnset, st.t, "omega[" + padded(x, width) + "]", w, se, "monte_carlo", true));
      }
      out.plots.push_back(std::move(ms));
      out.plots.push_back(std::move(hs));
    }
    const double events = stats.front().events_per_replica * double(cfg.methods.replicas);
    const double expected = sim.clock_rate() * cfg.times.back() * double(cfg.methods.replicas);
    out.rows.push_back(row(n, kUnset, cfg.times.back(), "events_per_replica", stats.front().events_per_replica,
                           std::sqrt(expected) / double(cfg.methods.replicas), "monte_carlo", true));
    out.rows.push_back(row(n, kUnset, kUnset, "omega_bound", bound, 0.0, "closed_form"));
    const std::string tag = "_n" + std::to_string(n);
    std::ostringstream d;
    d << outside << " of " << checked << " site means beyond " << sigma << " SE (max z " << zmax
      << "; about " << checked * std::erfc(sigma / std::numbers::sqrt2) << " expected by chance)";
    out.checks.push_back(make_check("occupation" + tag, outside == 0, sigma - zmax, d.str()));
    std::ostringstream e;
    e << "max |E[omega omega]| = " << omega_max << ", bound " << bound;
    out.checks.push_back(make_check("omega_bound" + tag, omega_margin >= 0.0, omega_margin, e.str()));
    const double dev = std::abs(events - expected) / std::sqrt(expected);
    std::ostringstream f;
    f << "event count " << dev << " Poisson SD from R t";
    out.checks.push_back(make_check("event_count" + tag, dev <= 5.0, 5.0 - dev, f.str()));

    if (ell0) {
      for (double b : cfg.bs) {
        const auto ct = cutoff_time(n, ell0, b);
        const auto st = tv_lower_bound_statistic(sim, ct.t, ell0);
        const std::string method = st.widened ? "statistic_lower_bound_nonrigorous_widened" : "statistic_lower_bound_nonrigorous";
        out.rows.push_back(row(n, b, ct.t, "statistic_tv", st.estimate, st.se, method, true));
        out.rows.push_back(row(n, b, ct.t, "statistic_bins", st.bins, 0.0, "freedman_diaconis"));
        out.rows.push_back(row(n, b, ct.t, "target_G", gaussian_profile(gamma * std::exp(-b)), 0.0, "closed_form"));
      }
    }
    if (cfg.timing) {
      const double ms = elapsed_ms(start);
      for (std::size_t i = first_row; i < out.rows.size(); ++i) out.rows[i].walltime_ms = ms;
    }
  }
  check_rows(out, row);
  return out;
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
  if (cfg.id == "cutoff") return run_cutoff_curve(cfg);
  if (cfg.id == "entropy") return run_entropy_decay(cfg);
  if (cfg.id == "lemmas") return run_lemma_suite(cfg);
  if (cfg.id == "heat") return run_heat(cfg);
  if (cfg.id == "tv") return run_tv(cfg);
  if (cfg.id == "mc") return run_mc(cfg);
  fail(ErrorKind::Config, "unknown experiment '" + cfg.id + "'");
}

// ---- output ----

std::string format_csv(std::vector<ResultRow> rows) {
  auto key = [](double v) { return std::pair<bool, double>(!std::isnan(v), std::isnan(v) ? 0.0 : v); };
  std::stable_sort(rows.begin(), rows.end(), [&](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.experiment, a.n) < std::tie(b.experiment, b.n) ||
           (std::tie(a.experiment, a.n) == std::tie(b.experiment, b.n) &&
            std::make_tuple(key(a.b), key(a.t), a.quantity, a.method) <
                std::make_tuple(key(b.b), key(b.t), b.quantity, b.method));
  });
  std::string out = std::string(kCsvHeader) + "\n";
  auto opt = [](double v) { return std::isnan(v) ? std::string() : fmt(v); };
  for (const auto& r : rows) {
    out += r.experiment + ',' + std::to_string(r.n) + ',' + opt(r.b) + ',' + opt(r.t) + ',' + r.quantity + ',' +
           fmt(r.value) + ',' + fmt(r.uncertainty) + ',' + r.method + ',' +
           (r.stochastic ? std::to_string(r.seed) : std::string()) + ',' + fmt(r.walltime_ms) + '\n';
  }
  return out;
}

std::string format_plot(const PlotSeries& s) {
  std::string out = "# " + s.title + " quantity=" + s.y_label + "\n# " + s.x_label + ' ' + s.y_label + '\n';
  for (const auto& [x, y] : s.points) out += fmt(x) + ' ' + fmt(y) + '\n';
  return out;
}

std::vector<std::string> emit(const RunOutput& out, const std::string& experiment, const std::string& dir,
                              const std::string& format) {
  if (format != "csv" && format != "plot") fail(ErrorKind::Config, "format must be csv or plot, got '" + format + "'");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir + ": " + ec.message());
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& text) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::Io, "cannot write " + path);
    f << text;
    f.close();
    if (!f) fail(ErrorKind::Io, "write failed for " + path);
    written.push_back(path);
  };
  write(experiment + ".csv", format_csv(out.rows));
  if (format == "plot")
    for (const auto& s : out.plots) write(s.file, format_plot(s));
  return written;
}

}  // namespace ssep
