/* C interface to the faircomp library.
 *
 * Objects are opaque handles created by *_create / *_load / *_parse calls
 * and released with the matching *_free call. Every fallible function
 * returns a fc_status; on failure a description is available from
 * fc_last_error() on the same thread until the next failing call.
 */
#ifndef FAIRCOMP_H
#define FAIRCOMP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FAIRCOMP_BUILDING_LIBRARY)
#    define FC_API __declspec(dllexport)
#  else
#    define FC_API __declspec(dllimport)
#  endif
#else
#  define FC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fc_status {
    FC_OK = 0,
    FC_ERR_INVALID_ARGUMENT = 1, /* null handle, bad dimensions or settings */
    FC_ERR_PARSE = 2,            /* malformed JSON / CSV */
    FC_ERR_INFEASIBLE = 3,       /* antenna constraints cannot be met */
    FC_ERR_NUMERICAL = 4,        /* singular system, non-finite result */
    FC_ERR_IO = 5,
    FC_ERR_INTERNAL = 6
} fc_status;

typedef enum fc_scheme {
    FC_SCHEME_PROPOSED = 0,
    FC_SCHEME_IGNORE_CSI = 1,
    FC_SCHEME_FIXED_POSITION = 2
} fc_scheme;

typedef struct fc_config fc_config;
typedef struct fc_solve_result fc_solve_result;
typedef struct fc_sweep_spec fc_sweep_spec;
typedef struct fc_sweep_results fc_sweep_results;

/* Plain-data solver settings; initialise with fc_settings_default. */
typedef struct fc_settings {
    double outer_tolerance;
    int max_outer_iters;
    double barrier_mu_init;
    double barrier_mu_shrink;
    double barrier_mu_floor;
    double grad_tolerance;
    double step_tolerance;
    int max_bfgs_iters;
} fc_settings;

typedef struct fc_mse {
    double misalignment;
    double csi_error;
    double noise;
    double total;
} fc_mse;

typedef struct fc_sweep_row {
    fc_scheme scheme;
    double theta0;
    double snr_db;
    size_t num_antennas;
    size_t num_users;
    double aperture_length;
    double mse_mean;
    double mse_std;
    int num_geometries;
    uint64_t rng_seed;
} fc_sweep_row;

typedef struct fc_check {
    const char* name;
    int passed;
    const char* detail;
} fc_check;

typedef void (*fc_check_callback)(const fc_check* check, void* user_data);

FC_API const char* fc_version(void);
FC_API const char* fc_last_error(void);
FC_API const char* fc_status_name(fc_status status);

FC_API void fc_settings_default(fc_settings* out);

/* ---- scenario config ---- */
FC_API fc_status fc_config_parse(const char* json_text, fc_config** out);
FC_API fc_status fc_config_load(const char* path, fc_config** out);
FC_API void fc_config_free(fc_config* config);
FC_API fc_status fc_config_num_users(const fc_config* config, size_t* out);
FC_API fc_status fc_config_num_antennas(const fc_config* config, size_t* out);
/* Reads the optional "settings" object of a config or sweep document. */
FC_API fc_status fc_settings_load(const char* path, fc_settings* out);

/* ---- single solve ---- */
FC_API fc_status fc_solve(const fc_config* config, const fc_settings* settings, fc_solve_result** out);
FC_API fc_status fc_solve_scheme(const fc_config* config, const fc_settings* settings, fc_scheme scheme,
                                 fc_solve_result** out);
FC_API void fc_solve_result_free(fc_solve_result* result);
FC_API fc_status fc_solve_result_mse(const fc_solve_result* result, fc_mse* out);
FC_API fc_status fc_solve_result_iterations(const fc_solve_result* result, size_t* iterations, int* converged);
/* Copies N positions into `out` (capacity must be >= N). */
FC_API fc_status fc_solve_result_positions(const fc_solve_result* result, double* out, size_t capacity);
/* Full JSON report; release with fc_string_free. */
FC_API fc_status fc_solve_result_json(const fc_solve_result* result, char** out_json);
FC_API fc_status fc_solve_result_write(const fc_solve_result* result, const char* path);

/* ---- sweeps ---- */
FC_API fc_status fc_sweep_spec_parse(const char* json_text, fc_sweep_spec** out);
FC_API fc_status fc_sweep_spec_load(const char* path, fc_sweep_spec** out);
FC_API void fc_sweep_spec_free(fc_sweep_spec* spec);
FC_API fc_status fc_sweep_spec_set_seed(fc_sweep_spec* spec, uint64_t seed);
FC_API fc_status fc_sweep_spec_set_geometries(fc_sweep_spec* spec, int num_geometries);
/* workers == 0 selects the hardware concurrency. */
FC_API fc_status fc_sweep_run(const fc_sweep_spec* spec, const fc_settings* settings, unsigned workers,
                              fc_sweep_results** out);
FC_API void fc_sweep_results_free(fc_sweep_results* results);
FC_API fc_status fc_sweep_results_count(const fc_sweep_results* results, size_t* out);
FC_API fc_status fc_sweep_results_row(const fc_sweep_results* results, size_t index, fc_sweep_row* out);
FC_API fc_status fc_sweep_results_write_csv(const fc_sweep_results* results, const char* path);

/* ---- oracle suite ---- */
/* Runs every check, reporting each through `callback` (may be NULL).
 * `failed` receives the number of failing checks. */
FC_API fc_status fc_validate(uint64_t seed, fc_check_callback callback, void* user_data, int* failed);

FC_API void fc_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* FAIRCOMP_H */
