#ifndef QKDRT_H
#define QKDRT_H

/* C interface to the qkdrt key-rate engine.
 *
 * Every function returns a qkdrt_status. On failure the message is available
 * from qkdrt_last_error() on the calling thread until the next call. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QKDRT_API __declspec(dllexport)
#else
#define QKDRT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qkdrt_status {
  QKDRT_OK = 0,
  QKDRT_ERR_ARGUMENT = 1,
  QKDRT_ERR_CONFIG = 2,
  QKDRT_ERR_IO = 3,
  QKDRT_ERR_COMPUTE = 4
} qkdrt_status;

typedef enum qkdrt_protocol { QKDRT_BB84 = 0, QKDRT_THREE_STATE = 1 } qkdrt_protocol;

typedef struct qkdrt_config qkdrt_config;
typedef struct qkdrt_counts qkdrt_counts;
typedef struct qkdrt_report qkdrt_report;

typedef struct qkdrt_row {
  qkdrt_protocol protocol;
  double loss_db; /* NaN when unknown */
  double epsilon_u;
  double delta;
  double cap_delta;
  uint32_t lc;
  double y_z;
  double e_bit;
  double e_ph_u;
  double rate;
  double f;
  size_t tags; /* per-tag entries, 0 when untagged */
} qkdrt_row;

QKDRT_API const char* qkdrt_version(void);
QKDRT_API const char* qkdrt_last_error(void);
/* Name of the last error kind, e.g. "SingularSystem"; empty after success. */
QKDRT_API const char* qkdrt_last_error_kind(void);

QKDRT_API qkdrt_status qkdrt_g_plus(double y, double z, double* out);
QKDRT_API qkdrt_status qkdrt_g_minus(double y, double z, double* out);
QKDRT_API qkdrt_status qkdrt_binary_entropy(double x, double* out);
QKDRT_API qkdrt_status qkdrt_epsilon_effective(double eps_prime, uint32_t lc, double* out);
QKDRT_API qkdrt_status qkdrt_key_rate(double y_z, double e_ph_u, double e_bit, double f,
                                      double* out);

QKDRT_API qkdrt_status qkdrt_config_create(qkdrt_config** out);
QKDRT_API void qkdrt_config_destroy(qkdrt_config* cfg);
QKDRT_API qkdrt_status qkdrt_config_load_file(qkdrt_config* cfg, const char* path);
QKDRT_API qkdrt_status qkdrt_config_set(qkdrt_config* cfg, const char* key, const char* value);
QKDRT_API qkdrt_status qkdrt_config_validate(const qkdrt_config* cfg);

/* threads = 0 uses the hardware concurrency. */
QKDRT_API qkdrt_status qkdrt_sweep_run(const qkdrt_config* cfg, unsigned threads,
                                       qkdrt_report** out);
QKDRT_API qkdrt_status qkdrt_simulate_run(const qkdrt_config* cfg, qkdrt_counts** out);
QKDRT_API qkdrt_status qkdrt_bound_run(const qkdrt_counts* counts, const qkdrt_config* cfg,
                                       qkdrt_report** out);

QKDRT_API qkdrt_status qkdrt_counts_read(const char* path, qkdrt_counts** out);
/* path NULL writes to stdout. */
QKDRT_API qkdrt_status qkdrt_counts_write(const qkdrt_counts* counts, const char* path);
QKDRT_API void qkdrt_counts_destroy(qkdrt_counts* counts);

QKDRT_API qkdrt_status qkdrt_report_size(const qkdrt_report* report, size_t* out);
QKDRT_API qkdrt_status qkdrt_report_row(const qkdrt_report* report, size_t i, qkdrt_row* out);
QKDRT_API qkdrt_status qkdrt_report_tag(const qkdrt_report* report, size_t i, size_t w,
                                        double* e_ph_u, double* weight);
/* Σ q_w h(e_w), h(Σ q_w e_w), h(e_ph^U) for row i. */
QKDRT_API qkdrt_status qkdrt_report_secret_fraction(const qkdrt_report* report, size_t i,
                                                    double* lhs, double* mid, double* rhs);
/* path NULL writes to stdout. */
QKDRT_API qkdrt_status qkdrt_report_write_csv(const qkdrt_report* report, const char* path);
QKDRT_API void qkdrt_report_destroy(qkdrt_report* report);

#ifdef __cplusplus
}
#endif

#endif
