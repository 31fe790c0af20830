#ifndef MATCHMARKET_MATCHMARKET_H
#define MATCHMARKET_MATCHMARKET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MATCHMARKET_BUILDING)
#    define MM_API __declspec(dllexport)
#  else
#    define MM_API __declspec(dllimport)
#  endif
#else
#  define MM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mm_status {
  MM_OK = 0,
  MM_INVALID_PARAMETER = 1,
  MM_INVALID_INPUT = 2,
  MM_INVALID_RULE = 3,
  MM_DOMAIN = 4,
  MM_DEGENERATE_VARIANCE = 5,
  MM_APPROXIMATION_DOMAIN = 6,
  MM_INVALID_CONFIG = 7,
  MM_IO = 8,
  MM_INTERNAL = 9
} mm_status;

typedef struct mm_config mm_config;
typedef struct mm_table mm_table;
typedef struct mm_market mm_market;

typedef void (*mm_progress_fn)(const char* message, void* user);

MM_API const char* mm_version(void);
MM_API const char* mm_status_name(mm_status status);
/* Message of the last failed call on this thread; "" if none. */
MM_API const char* mm_last_error(void);

MM_API size_t mm_experiment_count(void);
MM_API const char* mm_experiment_name(size_t index);
MM_API const char* mm_experiment_description(size_t index);

/* Experiment configs. Keys and value syntax match the config file format. */
MM_API mm_status mm_config_create(const char* experiment, mm_config** out);
MM_API void mm_config_destroy(mm_config* config);
MM_API mm_status mm_config_set(mm_config* config, const char* key, const char* value);
MM_API mm_status mm_config_load_file(mm_config* config, const char* path);
MM_API mm_status mm_config_validate(const mm_config* config);
MM_API const char* mm_config_experiment(const mm_config* config);
/* "" when no output path is set. */
MM_API const char* mm_config_output_path(const mm_config* config);

/* progress may be NULL. */
MM_API mm_status mm_run(const mm_config* config, mm_progress_fn progress, void* user,
                        mm_table** out);
/* config may be NULL for the default claims settings. */
MM_API mm_status mm_claims(const mm_config* config, mm_progress_fn progress, void* user,
                           mm_table** out);

MM_API void mm_table_destroy(mm_table* table);
MM_API size_t mm_table_rows(const mm_table* table);
MM_API size_t mm_table_columns(const mm_table* table);
MM_API const char* mm_table_column_name(const mm_table* table, size_t column);
MM_API mm_status mm_table_column_index(const mm_table* table, const char* name, size_t* out);
MM_API mm_status mm_table_value(const mm_table* table, size_t row, size_t column, double* out);
/* NULL when the table has no label column. */
MM_API const char* mm_table_label(const mm_table* table, size_t row);
/* NULL when the key is absent. */
MM_API const char* mm_table_meta(const mm_table* table, const char* key);
MM_API mm_status mm_table_write_csv(const mm_table* table, const char* path);
/* Caller releases *out with mm_string_free. */
MM_API mm_status mm_table_to_csv(const mm_table* table, char** out);
MM_API void mm_string_free(char* text);

/* Single market instance: vendor[n], buyers[m * n] row-major by buyer. */
typedef enum mm_rule_kind {
  MM_RULE_LINEAR = 0,
  MM_RULE_KNORM = 1,
  MM_RULE_MIN = 2,
  MM_RULE_MULTI_BUYER_AVERAGE = 3
} mm_rule_kind;

typedef struct mm_rule {
  mm_rule_kind kind;
  double k; /* used by MM_RULE_KNORM */
} mm_rule;

typedef struct mm_outcome {
  int traded;
  size_t chosen_index;
  double total_utility;
  double buyer_utility;
  double vendor_utility;
  int has_inequality;
  double inequality;
} mm_outcome;

MM_API mm_status mm_market_create(const double* vendor, const double* buyers, size_t n,
                                  size_t m, mm_market** out);
MM_API void mm_market_destroy(mm_market* market);
MM_API mm_status mm_matchmaker_select(const mm_market* market, mm_rule rule, mm_outcome* out);
MM_API mm_status mm_vendor_proposes(const mm_market* market, mm_outcome* out);

/* Closed forms and numerics. */
MM_API mm_status mm_u_m_uniform_exact(size_t n, double* out);
MM_API mm_status mm_u_m_uniform_approx(size_t n, double* out);
MM_API mm_status mm_u_m_knorm_approx(size_t n, double k, double* out);
MM_API mm_status mm_solve_u_m_normal(size_t n, double variance, double* out);
MM_API mm_status mm_u_m_normal_approx(size_t n, double correlation, double* out);
MM_API mm_status mm_x_m_powerlaw_approx(size_t n, double gamma, double* out);
MM_API mm_status mm_n_opt_uniform(double beta, double* out);
MM_API mm_status mm_n_opt_normal(double beta, double* out);
MM_API mm_status mm_n_opt_powerlaw(double beta, double gamma, double* out);

#ifdef __cplusplus
}
#endif

#endif
