#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "ssep/check.hpp"
#include "ssep/product_measures.hpp"
#include "ssep/profile.hpp"

// Experiment drivers: configuration, runs and deterministic output.
namespace ssep {

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

/// Flattened "section.key" -> value settings, as read from an INI file and
/// overridden by command-line assignments.
using Settings = std::map<std::string, std::string>;

/// Reads an INI file (sections, key = value, ';' or '#' comments).
Settings read_settings(const std::string& path);
/// Applies "section.key=value".
void apply_setting(Settings& settings, const std::string& assignment);

struct MethodLimits {
  std::string tv = "auto";  // auto | enum | grid | mc, or a comma list for the tv experiment
  int enum_max_sites = 22;
  int chain_max_n = 12;     // exact chain distance rows in the cutoff curve
  int grid_max_n = 8192;
  int grid_bins = kDefaultGridBins;
  double grid_tol = kDefaultGridTol;
  std::uint64_t mc_samples = 200000;
  std::uint64_t replicas = 10000;
  int ls_restarts = 4;
};

/// Optional predicates. NaN (or false) leaves a predicate undeclared.
struct AcceptanceSpec {
  bool gap_monotone = false;     // cutoff: max_b |TV - G| strictly decreasing along n
  double gap_max = kUnset;       // cutoff: bound on that gap at the largest n
  double chain_band = kUnset;    // cutoff: |D_n - G| at n = chain_band_n, unclamped b
  int chain_band_n = 12;
  double envelope_slack = kUnset;  // entropy: H <= slack * C exp(-delta t) on the fit range
  double fit_from = kUnset;
  double fit_to = kUnset;
  double sigma = 3.0;            // mc: per-site and per-edge z threshold
};

struct ExperimentConfig {
  std::string id;  // cutoff | entropy | lemmas | heat | tv | mc
  ProfileSpec profile = ProfileSpec::single_sine(0.5, 0.2, 1);
  std::vector<int> ns;
  std::vector<double> bs;
  std::vector<double> times;
  std::uint64_t seed = 1;
  int workers = 1;
  bool timing = false;  // fill walltime_ms (otherwise 0, keeping files byte-stable)
  MethodLimits methods;
  AcceptanceSpec accept;
};

/// Defaults for the experiment overlaid with `settings`; unknown keys and invalid
/// values throw ErrorKind::Config.
ExperimentConfig build_config(const std::string& experiment, const Settings& settings);

struct ResultRow {
  std::string experiment;
  int n = 0;
  double b = kUnset;
  double t = kUnset;
  std::string quantity;
  double value = 0.0;
  double uncertainty = 0.0;
  std::string method;
  bool stochastic = false;  // prints the seed column
  std::uint64_t seed = 0;
  double walltime_ms = 0.0;
};

struct PlotSeries {
  std::string file;  // file name inside the output directory
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
};

struct RunOutput {
  std::vector<ResultRow> rows;
  std::vector<PlotSeries> plots;
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

RunOutput run_cutoff_curve(const ExperimentConfig& cfg);
RunOutput run_entropy_decay(const ExperimentConfig& cfg);
RunOutput run_lemma_suite(const ExperimentConfig& cfg);
RunOutput run_heat(const ExperimentConfig& cfg);
RunOutput run_tv(const ExperimentConfig& cfg);
RunOutput run_mc(const ExperimentConfig& cfg);
/// Dispatches on cfg.id.
RunOutput run_experiment(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader = "experiment,n,b,t,quantity,value,uncertainty,method,seed,walltime_ms";

/// Rows sorted by (experiment, n, b, t, quantity, method), shortest round-trip numbers.
std::string format_csv(std::vector<ResultRow> rows);
std::string format_plot(const PlotSeries& series);

/// Writes <dir>/<experiment>.csv, and with format "plot" also every plot series.
/// Returns the written paths.
std::vector<std::string> emit(const RunOutput& out, const std::string& experiment, const std::string& dir,
                              const std::string& format);

/// Least-squares line through (t, log H) over positive H; returns {rate, C} with
/// H ~ C exp(-rate t).
std::pair<double, double> fit_exponential(const std::vector<double>& t, const std::vector<double>& h);

}  // namespace ssep
