/*
 * msense: multi-static OFDM radar sensing simulator, C interface.
 *
 * All functions return an msense_status. On failure, msense_last_error()
 * returns a message for the calling thread until its next msense_* call.
 * Handles are opaque; every *_create / *_run has a matching *_destroy.
 * Strings returned through char** are owned by the caller and released
 * with msense_string_free().
 */
#ifndef MSENSE_MSENSE_H
#define MSENSE_MSENSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(MSENSE_BUILD_SHARED)
#define MSENSE_API __attribute__((visibility("default")))
#else
#define MSENSE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum msense_status {
  MSENSE_OK = 0,
  MSENSE_ERR_INVALID_ARGUMENT = 1,
  MSENSE_ERR_CONTRACT = 2,
  MSENSE_ERR_IO = 3,
  MSENSE_ERR_INTERNAL = 4
} msense_status;

typedef struct msense_config msense_config;
typedef struct msense_drop msense_drop;

typedef struct msense_metrics {
  double p_det;
  double precision;
  double f1;
  double p_occ;
  size_t n_truth;
  size_t n_detected;
  size_t n_true_positive;
} msense_metrics;

/* Bit flags for msense_sweep_options.filters. */
#define MSENSE_FILTER_OFF 1
#define MSENSE_FILTER_ON 2

typedef struct msense_sweep_options {
  const char* axis; /* noise_power_dBm | n_saps | n_antennas | bandwidth | n_targets | room_side */
  const double* values;
  size_t n_values;
  int drops_per_point;  /* <= 0: use run.drops of the config */
  const int* sap_counts; /* NULL: 1, 2, 3, 4 */
  size_t n_sap_counts;
  int filters;  /* MSENSE_FILTER_* mask; 0 means both */
  int baseline; /* nonzero: single impulsive target, max-peak estimator */
} msense_sweep_options;

/* Called after each completed sweep point. */
typedef void (*msense_progress_fn)(double axis_value, size_t point_index, size_t n_points, void* user);

MSENSE_API const char* msense_version(void);
MSENSE_API const char* msense_last_error(void);
MSENSE_API void msense_string_free(char* s);

/* Configuration */
MSENSE_API msense_status msense_config_create(msense_config** out);
MSENSE_API msense_status msense_config_load(const char* path, msense_config** out);
MSENSE_API void msense_config_destroy(msense_config* cfg);
/* key is "section.key"; value is JSON text or a bare string. */
MSENSE_API msense_status msense_config_set(msense_config* cfg, const char* key, const char* value);
MSENSE_API msense_status msense_config_to_json(const msense_config* cfg, char** out_json);

MSENSE_API msense_status msense_thermal_noise_dbm(double bandwidth_hz, double noise_figure_db, double* out_dbm);

/* Single drop */
MSENSE_API msense_status msense_drop_run(const msense_config* cfg, uint64_t seed, int keep_periodograms,
                                         msense_drop** out);
MSENSE_API void msense_drop_destroy(msense_drop* drop);
MSENSE_API msense_status msense_drop_metrics(const msense_drop* drop, msense_metrics* out);
MSENSE_API msense_status msense_drop_counts(const msense_drop* drop, size_t* n_saps, size_t* n_peaks_total,
                                            size_t* n_fused);
/* Scene, per-SAP paths and peaks, fused estimates and metrics. */
MSENSE_API msense_status msense_drop_to_json(const msense_drop* drop, char** out_json);
/* Peak reports of every SAP as JSON lines, the SAP-to-fusion wire content. */
MSENSE_API msense_status msense_drop_write_peaks(const msense_drop* drop, const char* path);
MSENSE_API msense_status msense_drop_write_fused(const msense_drop* drop, const char* path);
/* Requires keep_periodograms. Writes <prefix>.f32 and <prefix>.json. */
MSENSE_API msense_status msense_drop_write_periodogram(const msense_drop* drop, size_t sap_index, const char* prefix);

/* Fuses a peak-report JSON lines file with the config's room and SAP layout. */
MSENSE_API msense_status msense_fuse_peaks_file(const msense_config* cfg, const char* peaks_path,
                                                const char* out_json_path, size_t* n_fused);

/* Sweeps: CSV with one header row plus a JSON manifest. Rows are flushed per point. */
MSENSE_API msense_status msense_sweep_run(const msense_config* cfg, const msense_sweep_options* options,
                                          const char* csv_path, const char* manifest_path,
                                          msense_progress_fn progress, void* user);

/* Self-checks; the report is a JSON array of {name, passed, measured, expected, tolerance, detail}. */
MSENSE_API msense_status msense_validate(const msense_config* cfg, int quick, char** out_report_json,
                                         int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* MSENSE_MSENSE_H */
