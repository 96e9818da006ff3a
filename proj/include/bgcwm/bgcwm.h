#ifndef BGCWM_H
#define BGCWM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(BGCWM_BUILDING_LIBRARY)
#define BGCWM_API __declspec(dllexport)
#else
#define BGCWM_API __declspec(dllimport)
#endif
#else
#define BGCWM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bgcwm_status {
  BGCWM_OK = 0,
  BGCWM_ERR_INVALID_ARGUMENT = 1,
  BGCWM_ERR_DOMAIN = 2,
  BGCWM_ERR_FACTORIZATION = 3,
  BGCWM_ERR_IO = 4,
  BGCWM_ERR_CONFIG = 5,
  BGCWM_ERR_NUMERICAL = 6,
  BGCWM_ERR_INTERNAL = 7
} bgcwm_status;

typedef struct bgcwm_config bgcwm_config;
typedef struct bgcwm_dataset bgcwm_dataset;

typedef struct bgcwm_sim_spec {
  uint32_t K;
  uint32_t p;
  uint32_t n;
  int32_t scenario;
  double p0;
  uint64_t seed;
} bgcwm_sim_spec;

/* Message of the last failure on the calling thread ("" when none). */
BGCWM_API const char* bgcwm_last_error(void);
BGCWM_API const char* bgcwm_status_name(int status);
BGCWM_API const char* bgcwm_version(void);

BGCWM_API int bgcwm_config_create(bgcwm_config** out);
BGCWM_API void bgcwm_config_destroy(bgcwm_config* config);
/* Replaces the configuration with the content of a JSON file. */
BGCWM_API int bgcwm_config_load(bgcwm_config* config, const char* path);
/* Dotted key such as "iterations" or "hyper.a"; value is JSON or a bare string. */
BGCWM_API int bgcwm_config_set(bgcwm_config* config, const char* key, const char* value);
BGCWM_API int bgcwm_config_preset(bgcwm_config* config, const char* name);
/* Writes the configuration as JSON into buf (NUL-terminated). *needed receives
   the required size including the terminator. */
BGCWM_API int bgcwm_config_to_json(const bgcwm_config* config, char* buf, size_t size, size_t* needed);

BGCWM_API int bgcwm_dataset_load(const char* path, bgcwm_dataset** out);
BGCWM_API void bgcwm_dataset_destroy(bgcwm_dataset* data);
BGCWM_API size_t bgcwm_dataset_n(const bgcwm_dataset* data);
BGCWM_API size_t bgcwm_dataset_p(const bgcwm_dataset* data);

BGCWM_API void bgcwm_sim_spec_default(bgcwm_sim_spec* spec);
BGCWM_API int bgcwm_sim_spec_load(const char* path, bgcwm_sim_spec* spec);
BGCWM_API int bgcwm_simulate(const bgcwm_sim_spec* spec, const char* data_csv, const char* truth_json);

BGCWM_API int bgcwm_fit(const char* data_csv, const bgcwm_config* config, const char* out_dir);
BGCWM_API int bgcwm_postprocess(const char* const* inputs, size_t n_inputs, const char* data_csv,
                                double level, const char* out_dir);
BGCWM_API int bgcwm_criteria(const char* const* inputs, size_t n_inputs, const char* data_csv,
                             const char* out_csv);
BGCWM_API int bgcwm_score(const char* truth_json, const char* summary_json, const char* out_json);

/* table is row-major rows x cols. */
BGCWM_API int bgcwm_ari_from_contingency(const double* table, size_t rows, size_t cols, double* out);
BGCWM_API int bgcwm_adjusted_rand_index(const int32_t* a, const int32_t* b, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* BGCWM_H */
