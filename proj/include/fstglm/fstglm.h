#ifndef FSTGLM_H
#define FSTGLM_H

/* C interface to the fstglm library: Student-t / skew Student-t binary GLMs
 * with sparse MAP-EM fitting, simulation, text features and evaluation.
 *
 * Every function that can fail returns an fst_status. On failure a message is
 * available from fst_last_error() on the same thread until the next call.
 * Objects are opaque and owned by the caller; release them with the matching
 * *_free function (passing NULL is allowed). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FSTGLM_BUILDING)
#    define FST_API __declspec(dllexport)
#  else
#    define FST_API __declspec(dllimport)
#  endif
#else
#  define FST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fst_status {
  FST_OK = 0,
  FST_E_INVALID_ARGUMENT = 1,
  FST_E_IO = 2,
  FST_E_PARSE = 3,
  FST_E_SCHEMA = 4,
  FST_E_NUMERICAL = 5,
  FST_E_DEGENERATE = 6,
  FST_E_INTERNAL = 7
} fst_status;

typedef enum fst_link_family { FST_LINK_SYMMETRIC = 0, FST_LINK_SKEW = 1 } fst_link_family;
typedef enum fst_objective { FST_OBJECTIVE_MISCLASSIFICATION = 0, FST_OBJECTIVE_F1 = 1 } fst_objective;
typedef enum fst_grid_preset { FST_GRID_SIMULATION = 0, FST_GRID_TEXT = 1 } fst_grid_preset;

typedef struct fst_dataset fst_dataset;
typedef struct fst_model fst_model;
typedef struct fst_trace fst_trace;
typedef struct fst_grid_result fst_grid_result;

typedef struct fst_link {
  int family; /* fst_link_family */
  double nu;
  double delta; /* must be 1 for the symmetric family */
} fst_link;

typedef struct fst_fit_config {
  double delta_tol;
  double eps_init;
  int max_iter;
  double zero_threshold;
  int intercept; /* nonzero adds a leading constant column */
} fst_fit_config;

typedef struct fst_grid {
  const double* nu;
  size_t n_nu;
  const double* gamma;
  size_t n_gamma;
  const double* delta;
  size_t n_delta;
} fst_grid;

typedef struct fst_metrics {
  long tp, fp, fn, tn;
  double misclassification;
  double precision;
  double recall;
  double f1;
} fst_metrics;

typedef struct fst_protocol_summary {
  int splits;
  double micro_f1_mean, micro_f1_sd;
  double macro_f1_mean, macro_f1_sd;
} fst_protocol_summary;

FST_API const char* fst_last_error(void);
FST_API const char* fst_version(void);
FST_API const char* fst_status_name(fst_status status);

FST_API void fst_fit_config_default(fst_fit_config* out);
/* Points the grid at static storage; the arrays stay valid for the process lifetime. */
FST_API fst_status fst_grid_default(int preset, fst_grid* out);

/* Datasets: CSV with header "label,<names...>" and 0/1 labels in the first column. */
FST_API fst_status fst_dataset_read(const char* path, fst_dataset** out);
FST_API fst_status fst_dataset_write(const fst_dataset* data, const char* path);
FST_API fst_status fst_dataset_simulate(int example, uint64_t seed, int rows, fst_dataset** out);
FST_API fst_status fst_dataset_split(const fst_dataset* data, uint64_t seed, fst_dataset** train,
                                     fst_dataset** validation, fst_dataset** test);
FST_API size_t fst_dataset_rows(const fst_dataset* data);
FST_API size_t fst_dataset_cols(const fst_dataset* data);
FST_API void fst_dataset_free(fst_dataset* data);

/* Fitting. trace_out may be NULL. */
FST_API fst_status fst_fit(const fst_dataset* data, const fst_link* link, double gamma, const fst_fit_config* config,
                           fst_model** model_out, fst_trace** trace_out);
FST_API fst_status fst_trace_write(const fst_trace* trace, const char* path);
FST_API int fst_trace_iterations(const fst_trace* trace);
FST_API int fst_trace_converged(const fst_trace* trace);
FST_API void fst_trace_free(fst_trace* trace);

/* Models. */
FST_API fst_status fst_model_save(const fst_model* model, const char* path);
FST_API fst_status fst_model_load(const char* path, fst_model** out);
FST_API size_t fst_model_size(const fst_model* model);
FST_API fst_status fst_model_coefficients(const fst_model* model, double* out, size_t n);
FST_API size_t fst_model_zero_count(const fst_model* model);
FST_API fst_status fst_model_link(const fst_model* model, fst_link* out);
FST_API double fst_model_gamma(const fst_model* model);
FST_API int fst_model_converged(const fst_model* model);
FST_API void fst_model_free(fst_model* model);

/* Prediction. Feature names of the data must match the model's. proba and
 * labels may each be NULL; otherwise they hold n = rows entries. */
FST_API fst_status fst_predict(const fst_model* model, const fst_dataset* data, double threshold, double* proba,
                               int* labels, size_t n);
/* CSV columns row,probability,prediction,label. */
FST_API fst_status fst_predict_write(const fst_model* model, const fst_dataset* data, double threshold,
                                     const char* path);
FST_API fst_status fst_evaluate(const fst_model* model, const fst_dataset* data, double threshold, fst_metrics* out);

/* Grid search over (nu, gamma, delta); config may be NULL; threads = 0 uses all cores. */
FST_API fst_status fst_grid_search(const fst_dataset* train, const fst_dataset* validation, int family,
                                   const fst_grid* grid, int objective, const fst_fit_config* config,
                                   unsigned threads, fst_grid_result** out);
FST_API size_t fst_grid_result_rows(const fst_grid_result* result);
/* Returns FST_E_NUMERICAL when no grid point could be fitted. */
FST_API fst_status fst_grid_result_best(const fst_grid_result* result, fst_link* link, double* gamma,
                                        double* objective_value);
/* CSV columns nu,gamma,delta,objective_value,converged. */
FST_API fst_status fst_grid_result_write(const fst_grid_result* result, const char* path);
FST_API void fst_grid_result_free(fst_grid_result* result);

/* Refit on train + validation with the chosen parameters, evaluate on test. */
FST_API fst_status fst_refit_evaluate(const fst_dataset* train, const fst_dataset* validation,
                                      const fst_dataset* test, const fst_link* link, double gamma,
                                      const fst_fit_config* config, double threshold, fst_metrics* out);

/* Repeated 50/25/25 protocols. Both write params.csv, results.csv and
 * summary.csv into out_dir (created if missing). summary may be NULL. */
FST_API fst_status fst_dataset_protocol(const fst_dataset* data, int family, const fst_grid* grid, int objective,
                                        int splits, uint64_t seed, const fst_fit_config* config, double threshold,
                                        unsigned threads, const char* out_dir, fst_protocol_summary* summary);
FST_API fst_status fst_text_protocol(const char* corpus_path, const char* stoplist_path, size_t top_k,
                                     const fst_grid* grid, int splits, uint64_t seed, const fst_fit_config* config,
                                     double threshold, unsigned threads, const char* out_dir,
                                     fst_protocol_summary* summary);

/* Plot tables: kind is link, qq, hyperprior or skewpdf. */
FST_API fst_status fst_curve_write(const char* kind, double nu, double delta, double gamma, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* FSTGLM_H */
