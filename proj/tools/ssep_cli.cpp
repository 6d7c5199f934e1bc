// Command-line driver for the experiments; talks to the library through its C interface.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssep/ssep.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitPredicate = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::string out = "results";
  std::string format = "csv";
  std::vector<std::string> sets;
  unsigned long long seed = 0;
  int workers = 0;
  bool timing = false;
  bool quiet = false;
};

int report(ssep_status s, const char* stage) {
  std::fprintf(stderr, "ssep-experiments: %s failed (%s): %s\n", stage, ssep_status_name(s), ssep_last_error());
  return kExitConfig;
}

class ConfigHandle {
 public:
  ~ConfigHandle() { ssep_config_destroy(cfg_); }
  ssep_config** out() { return &cfg_; }
  ssep_config* get() const { return cfg_; }

 private:
  ssep_config* cfg_ = nullptr;
};

class ResultHandle {
 public:
  ~ResultHandle() { ssep_result_destroy(res_); }
  ssep_result** out() { return &res_; }
  const ssep_result* get() const { return res_; }

 private:
  ssep_result* res_ = nullptr;
};

int run(const std::string& experiment, const Options& opt, const CLI::App& app) {
  ConfigHandle cfg;
  if (auto s = ssep_config_create(experiment.c_str(), cfg.out())) return report(s, "configuration");
  if (!opt.config.empty())
    if (auto s = ssep_config_load(cfg.get(), opt.config.c_str())) return report(s, "reading the config file");
  for (const auto& a : opt.sets) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "ssep-experiments: --set expects section.key=value, got '%s'\n", a.c_str());
      return kExitConfig;
    }
    if (auto s = ssep_config_set(cfg.get(), a.substr(0, eq).c_str(), a.substr(eq + 1).c_str()))
      return report(s, "--set");
  }
  // flags override file values
  if (app.count("--seed") && ssep_config_set(cfg.get(), "experiment.seed", std::to_string(opt.seed).c_str()))
    return report(SSEP_ERR_CONFIG, "--seed");
  if (app.count("--workers") && ssep_config_set(cfg.get(), "experiment.workers", std::to_string(opt.workers).c_str()))
    return report(SSEP_ERR_CONFIG, "--workers");
  if (opt.timing && ssep_config_set(cfg.get(), "experiment.timing", "true")) return report(SSEP_ERR_CONFIG, "--timing");
  if (auto s = ssep_config_validate(cfg.get())) return report(s, "validation");

  ResultHandle res;
  if (auto s = ssep_run(cfg.get(), res.out())) return report(s, experiment.c_str());
  if (auto s = ssep_result_write(res.get(), opt.out.c_str(), opt.format.c_str())) return report(s, "writing output");

  const size_t checks = ssep_result_check_count(res.get());
  size_t failed = 0;
  for (size_t i = 0; i < checks; ++i) {
    ssep_check c;
    ssep_result_check(res.get(), i, &c);
    failed += !c.pass;
    if (!opt.quiet || !c.pass)
      std::printf("%s %s margin=%.6g %s\n", c.pass ? "PASS" : "FAIL", c.name, c.margin, c.detail);
  }
  if (!opt.quiet)
    std::printf("%s: %zu rows, %zu checks, %zu failed; output in %s\n", experiment.c_str(),
                ssep_result_row_count(res.get()), checks, failed, opt.out.c_str());
  return ssep_result_all_pass(res.get()) ? kExitPass : kExitPredicate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exclusion process with reservoirs: cutoff, entropy and simulation experiments"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config, "INI file with [experiment], [profile], [grid], [methods], [acceptance]")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", opt.seed, "master seed (overrides experiment.seed)");
  app.add_option("--out", opt.out, "output directory")->capture_default_str();
  app.add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", opt.format, "csv: table only; plot: table and plot-data files")
      ->check(CLI::IsMember({"csv", "plot"}))
      ->capture_default_str();
  app.add_option("--set", opt.sets, "override a setting, section.key=value (repeatable)");
  app.add_flag("--timing", opt.timing, "record wall times (outputs are then not byte-stable)");
  app.add_flag("--quiet", opt.quiet, "print failing checks only");

  const std::vector<std::pair<const char*, const char*>> commands{
      {"cutoff", "TV distance along the cutoff window against the Gaussian profile"},
      {"entropy", "exact relative entropy decay, Yau terms and tail fit"},
      {"lemmas", "heat-equation estimates, comparison lemma, correlation bound, log-Sobolev floor"},
      {"heat", "spectral solution of the discrete heat equation"},
      {"tv", "product-measure TV by enumeration, grid and sampling"},
      {"mc", "Monte Carlo occupations, correlations and statistic TV"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }
  return run(app.get_subcommands().front()->get_name(), opt, app);
}
