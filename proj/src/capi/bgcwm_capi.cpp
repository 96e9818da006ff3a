#include "bgcwm/bgcwm.h"

#include <cstring>
#include <new>
#include <string>

#include "bgcwm/config.hpp"
#include "bgcwm/dataset_io.hpp"
#include "bgcwm/error.hpp"
#include "bgcwm/pipeline.hpp"
#include "bgcwm/postprocess.hpp"
#include "bgcwm/simulate.hpp"

struct bgcwm_config {
  bgcwm::RunConfig cfg;
};

struct bgcwm_dataset {
  bgcwm::Dataset data;
};

namespace {

thread_local std::string g_last_error;

int status_of(bgcwm::ErrorKind kind) {
  switch (kind) {
    case bgcwm::ErrorKind::InvalidArgument:
      return BGCWM_ERR_INVALID_ARGUMENT;
    case bgcwm::ErrorKind::Domain:
      return BGCWM_ERR_DOMAIN;
    case bgcwm::ErrorKind::Factorization:
      return BGCWM_ERR_FACTORIZATION;
    case bgcwm::ErrorKind::Io:
      return BGCWM_ERR_IO;
    case bgcwm::ErrorKind::Config:
      return BGCWM_ERR_CONFIG;
    case bgcwm::ErrorKind::Numerical:
      return BGCWM_ERR_NUMERICAL;
  }
  return BGCWM_ERR_INTERNAL;
}

template <typename F>
int guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return BGCWM_OK;
  } catch (const bgcwm::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BGCWM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BGCWM_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* what) {
  if (!ptr) bgcwm::throw_invalid(std::string(what) + " must not be null");
}

std::vector<std::string> to_strings(const char* const* items, size_t n) {
  if (n == 0) bgcwm::throw_invalid("at least one input is required");
  require(items, "inputs");
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) {
    require(items[i], "input path");
    out.emplace_back(items[i]);
  }
  return out;
}

}  // namespace

extern "C" {

const char* bgcwm_last_error(void) { return g_last_error.c_str(); }

const char* bgcwm_status_name(int status) {
  switch (status) {
    case BGCWM_OK:
      return "ok";
    case BGCWM_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case BGCWM_ERR_DOMAIN:
      return "domain";
    case BGCWM_ERR_FACTORIZATION:
      return "factorization";
    case BGCWM_ERR_IO:
      return "io";
    case BGCWM_ERR_CONFIG:
      return "config";
    case BGCWM_ERR_NUMERICAL:
      return "numerical";
    default:
      return "internal";
  }
}

const char* bgcwm_version(void) { return "0.1.0"; }

int bgcwm_config_create(bgcwm_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new bgcwm_config{};
  });
}

void bgcwm_config_destroy(bgcwm_config* config) { delete config; }

int bgcwm_config_load(bgcwm_config* config, const char* path) {
  return guarded([&] {
    require(config, "config");
    require(path, "path");
    config->cfg = bgcwm::load_config_file(path);
  });
}

int bgcwm_config_set(bgcwm_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    bgcwm::apply_override(config->cfg, key, value);
  });
}

int bgcwm_config_preset(bgcwm_config* config, const char* name) {
  return guarded([&] {
    require(config, "config");
    require(name, "name");
    bgcwm::apply_preset(config->cfg, name);
  });
}

int bgcwm_config_to_json(const bgcwm_config* config, char* buf, size_t size, size_t* needed) {
  return guarded([&] {
    require(config, "config");
    const std::string s = bgcwm::to_json(config->cfg).dump(2);
    if (needed) *needed = s.size() + 1;
    if (buf && size > 0) {
      const size_t n = std::min(size - 1, s.size());
      std::memcpy(buf, s.data(), n);
      buf[n] = '\0';
    }
  });
}

int bgcwm_dataset_load(const char* path, bgcwm_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new bgcwm_dataset{bgcwm::read_dataset_csv(path)};
  });
}

void bgcwm_dataset_destroy(bgcwm_dataset* data) { delete data; }

size_t bgcwm_dataset_n(const bgcwm_dataset* data) { return data ? data->data.n() : 0; }

size_t bgcwm_dataset_p(const bgcwm_dataset* data) { return data ? data->data.p() : 0; }

void bgcwm_sim_spec_default(bgcwm_sim_spec* spec) {
  if (!spec) return;
  const bgcwm::SimSpec d;
  spec->K = static_cast<uint32_t>(d.K);
  spec->p = static_cast<uint32_t>(d.p);
  spec->n = static_cast<uint32_t>(d.n);
  spec->scenario = d.scenario;
  spec->p0 = d.p0;
  spec->seed = d.seed;
}

int bgcwm_sim_spec_load(const char* path, bgcwm_sim_spec* spec) {
  return guarded([&] {
    require(path, "path");
    require(spec, "spec");
    const bgcwm::SimSpec s = bgcwm::sim_spec_from_json(bgcwm::read_json_file(path));
    spec->K = static_cast<uint32_t>(s.K);
    spec->p = static_cast<uint32_t>(s.p);
    spec->n = static_cast<uint32_t>(s.n);
    spec->scenario = s.scenario;
    spec->p0 = s.p0;
    spec->seed = s.seed;
  });
}

int bgcwm_simulate(const bgcwm_sim_spec* spec, const char* data_csv, const char* truth_json) {
  return guarded([&] {
    require(spec, "spec");
    require(data_csv, "data_csv");
    require(truth_json, "truth_json");
    bgcwm::SimSpec s;
    s.K = spec->K;
    s.p = spec->p;
    s.n = spec->n;
    s.scenario = spec->scenario;
    s.p0 = spec->p0;
    s.seed = spec->seed;
    s.validate();
    bgcwm::simulate_to_files(s, data_csv, truth_json);
  });
}

int bgcwm_fit(const char* data_csv, const bgcwm_config* config, const char* out_dir) {
  return guarded([&] {
    require(data_csv, "data_csv");
    require(config, "config");
    require(out_dir, "out_dir");
    bgcwm::fit_to_dir(data_csv, config->cfg, out_dir);
  });
}

int bgcwm_postprocess(const char* const* inputs, size_t n_inputs, const char* data_csv, double level,
                      const char* out_dir) {
  return guarded([&] {
    require(data_csv, "data_csv");
    require(out_dir, "out_dir");
    bgcwm::postprocess_to_dir(to_strings(inputs, n_inputs), data_csv, level, out_dir);
  });
}

int bgcwm_criteria(const char* const* inputs, size_t n_inputs, const char* data_csv, const char* out_csv) {
  return guarded([&] {
    require(data_csv, "data_csv");
    require(out_csv, "out_csv");
    bgcwm::criteria_to_file(to_strings(inputs, n_inputs), data_csv, out_csv);
  });
}

int bgcwm_score(const char* truth_json, const char* summary_json, const char* out_json) {
  return guarded([&] {
    require(truth_json, "truth_json");
    require(summary_json, "summary_json");
    require(out_json, "out_json");
    bgcwm::score_files(truth_json, summary_json, out_json);
  });
}

int bgcwm_ari_from_contingency(const double* table, size_t rows, size_t cols, double* out) {
  return guarded([&] {
    require(table, "table");
    require(out, "out");
    arma::mat t(rows, cols);
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < cols; ++c) t(r, c) = table[r * cols + c];
    *out = bgcwm::ari_from_contingency(t);
  });
}

int bgcwm_adjusted_rand_index(const int32_t* a, const int32_t* b, size_t n, double* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = bgcwm::adjusted_rand_index(std::vector<int>(a, a + n), std::vector<int>(b, b + n));
  });
}

}  // extern "C"
