#include "ssep/ssep.h"

#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "ssep/error.hpp"
#include "ssep/experiments.hpp"
#include "ssep/product_measures.hpp"
#include "ssep/spectral_heat.hpp"

struct ssep_config {
  std::string experiment;
  ssep::Settings settings;
};

struct ssep_result {
  ssep::RunOutput output;
  std::string experiment;
};

namespace {

thread_local std::string last_error;

ssep_status status_of(ssep::ErrorKind kind) {
  switch (kind) {
    case ssep::ErrorKind::Domain: return SSEP_ERR_DOMAIN;
    case ssep::ErrorKind::Size: return SSEP_ERR_SIZE;
    case ssep::ErrorKind::Numerical: return SSEP_ERR_NUMERICAL;
    case ssep::ErrorKind::Config: return SSEP_ERR_CONFIG;
    case ssep::ErrorKind::Io: return SSEP_ERR_IO;
  }
  return SSEP_ERR_INTERNAL;
}

ssep_status set_error(ssep_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

// Runs body, translating exceptions into status codes.
template <class F>
ssep_status guarded(F&& body) {
  try {
    body();
    return SSEP_OK;
  } catch (const ssep::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SSEP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SSEP_ERR_INTERNAL, e.what());
  }
}

ssep_status null_argument(const char* what) { return set_error(SSEP_ERR_ARGUMENT, std::string("null ") + what); }

}  // namespace

extern "C" {

const char* ssep_version(void) { return "1.0.0"; }

const char* ssep_last_error(void) { return last_error.c_str(); }

const char* ssep_status_name(ssep_status status) {
  switch (status) {
    case SSEP_OK: return "ok";
    case SSEP_ERR_DOMAIN: return "domain error";
    case SSEP_ERR_SIZE: return "size error";
    case SSEP_ERR_NUMERICAL: return "numerical error";
    case SSEP_ERR_CONFIG: return "configuration error";
    case SSEP_ERR_IO: return "i/o error";
    case SSEP_ERR_ARGUMENT: return "invalid argument";
    case SSEP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

ssep_status ssep_config_create(const char* experiment, ssep_config** out) {
  if (!experiment) return null_argument("experiment");
  if (!out) return null_argument("output handle");
  *out = nullptr;
  return guarded([&] {
    ssep::build_config(experiment, {});  // rejects unknown experiments early
    *out = new ssep_config{experiment, {}};
  });
}

void ssep_config_destroy(ssep_config* cfg) { delete cfg; }

ssep_status ssep_config_load(ssep_config* cfg, const char* path) {
  if (!cfg) return null_argument("config");
  if (!path) return null_argument("path");
  return guarded([&] {
    for (auto& [k, v] : ssep::read_settings(path)) cfg->settings[k] = v;
  });
}

ssep_status ssep_config_set(ssep_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_argument("config");
  if (!key || !value) return null_argument("key or value");
  return guarded([&] { ssep::apply_setting(cfg->settings, std::string(key) + "=" + value); });
}

ssep_status ssep_config_validate(const ssep_config* cfg) {
  if (!cfg) return null_argument("config");
  return guarded([&] { ssep::build_config(cfg->experiment, cfg->settings); });
}

ssep_status ssep_run(const ssep_config* cfg, ssep_result** out) {
  if (!cfg) return null_argument("config");
  if (!out) return null_argument("output handle");
  *out = nullptr;
  return guarded([&] {
    const auto config = ssep::build_config(cfg->experiment, cfg->settings);
    auto result = std::make_unique<ssep_result>();
    result->experiment = cfg->experiment;
    result->output = ssep::run_experiment(config);
    *out = result.release();
  });
}

void ssep_result_destroy(ssep_result* result) { delete result; }

size_t ssep_result_row_count(const ssep_result* result) { return result ? result->output.rows.size() : 0; }

ssep_status ssep_result_row(const ssep_result* result, size_t index, ssep_row* out) {
  if (!result) return null_argument("result");
  if (!out) return null_argument("row");
  if (index >= result->output.rows.size()) return set_error(SSEP_ERR_ARGUMENT, "row index out of range");
  const auto& r = result->output.rows[index];
  *out = ssep_row{r.experiment.c_str(), r.n,          r.b,           r.t,    r.quantity.c_str(), r.value,
                  r.uncertainty,       r.method.c_str(), r.stochastic, r.seed, r.walltime_ms};
  return SSEP_OK;
}

size_t ssep_result_check_count(const ssep_result* result) { return result ? result->output.checks.size() : 0; }

ssep_status ssep_result_check(const ssep_result* result, size_t index, ssep_check* out) {
  if (!result) return null_argument("result");
  if (!out) return null_argument("check");
  if (index >= result->output.checks.size()) return set_error(SSEP_ERR_ARGUMENT, "check index out of range");
  const auto& c = result->output.checks[index];
  *out = ssep_check{c.name.c_str(), c.pass, c.margin, c.detail.c_str()};
  return SSEP_OK;
}

int ssep_result_all_pass(const ssep_result* result) { return result && result->output.all_pass() ? 1 : 0; }

ssep_status ssep_result_write(const ssep_result* result, const char* dir, const char* format) {
  if (!result) return null_argument("result");
  if (!dir || !format) return null_argument("directory or format");
  return guarded([&] { ssep::emit(result->output, result->experiment, dir, format); });
}

ssep_status ssep_eigenvalue(int n, int ell, double* out) {
  if (!out) return null_argument("output");
  return guarded([&] { *out = ssep::eigenvalue(ssep::LatticeSize(n), ell); });
}

ssep_status ssep_cutoff_time(double n, int ell0, double b, double* t, int* clamped) {
  if (!t) return null_argument("output");
  return guarded([&] {
    const auto c = ssep::cutoff_time(n, ell0, b);
    *t = c.t;
    if (clamped) *clamped = c.clamped;
  });
}

ssep_status ssep_gaussian_profile(double m, double* out) {
  if (!out) return null_argument("output");
  return guarded([&] { *out = ssep::gaussian_profile(m); });
}

ssep_status ssep_product_tv(int n, const double* u, double rho, double* tv, double* error_bound) {
  if (!u || !tv) return null_argument("field or output");
  return guarded([&] {
    const ssep::LatticeSize size(n);
    ssep::require(n >= 2, ssep::ErrorKind::Domain, "n must be >= 2");
    const ssep::BernoulliField field(size, std::vector<double>(u, u + (n - 1)));
    if (n - 1 <= 22) {
      *tv = ssep::tv_exact_enum(field, rho);
      if (error_bound) *error_bound = 0.0;
    } else {
      const auto e = ssep::tv_grid_dp(field, rho);
      *tv = e.value;
      if (error_bound) *error_bound = e.error_bound;
    }
  });
}

}  // extern "C"
