/* C interface to the uplink HARQ coverage library.
 *
 * Objects are opaque handles created and destroyed through this API. Every
 * call that can fail returns an hc_status; hc_last_error() then holds a
 * message for the calling thread. Strings returned through char** outputs
 * are owned by the caller and released with hc_string_free().
 *
 * Units follow the config file: dBm, dB, BSs per km^2.
 */
#ifndef HARQCOV_H
#define HARQCOV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HC_API __declspec(dllexport)
#else
#define HC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  HC_OK = 0,
  HC_ERR_ARGUMENT = 1,     /* null pointer, index, engine, metric or mask */
  HC_ERR_CONFIG = 2,       /* invalid value, name or invariant */
  HC_ERR_OUT_OF_RANGE = 3, /* target coverage outside a curve's range */
  HC_ERR_SAMPLER = 4,      /* network realisation could not be drawn */
  HC_ERR_IO = 5,
  HC_ERR_INTERNAL = 6,
  HC_ERR_CHECK_FAILED = 7  /* selftest finished with failing checks */
} hc_status;

typedef enum { HC_ENGINE_MC = 0, HC_ENGINE_ANALYTIC = 1 } hc_engine;

typedef struct hc_model hc_model;
typedef struct hc_curve hc_curve;

typedef struct {
  double coverage;
  double uncertainty; /* MC standard error or analytic achieved tolerance */
  uint64_t trials;    /* 0 for the analytic engine */
  int valid;          /* 0 when the analytic evaluation did not converge */
} hc_point;

typedef struct {
  double value_db;
  double interval_lo_db; /* -inf when the band edge is unreachable */
  double interval_hi_db; /* +inf when the band edge is unreachable */
  double max_adjustment; /* largest isotonic correction over both curves */
} hc_metric;

typedef enum { HC_METRIC_DIVERSITY_LOSS = 0, HC_METRIC_MRC_GAIN = 1 } hc_metric_kind;

HC_API const char* hc_version(void);
HC_API const char* hc_last_error(void);
HC_API const char* hc_status_name(hc_status s);
HC_API void hc_string_free(char* s);

/* Defaults: 10 BSs/km^2, alpha 4, rho -50 dBm, eps 0.5, no cap, Type-II QSI
 * at 0 dB, theorem constants, 1e5 ExactVoronoi trials with seed 1. */
HC_API hc_status hc_model_create(hc_model** out);
HC_API hc_status hc_model_from_json(const char* json, hc_model** out);
HC_API hc_status hc_model_load(const char* path, hc_model** out);
HC_API void hc_model_destroy(hc_model* m);
HC_API hc_status hc_model_to_json(const hc_model* m, char** out);

HC_API hc_status hc_model_set_network(hc_model* m, double bs_density_per_km2, double alpha);
/* pmax_dbm may be +INFINITY (no cap), pbar_dbm -INFINITY (silence). */
HC_API hc_status hc_model_set_power_control(hc_model* m, double rho_dbm, double epsilon,
                                            double pmax_dbm, double pbar_dbm);
/* interference "qsi" | "fvi"; harq "tx" | "type1" | "type2" */
HC_API hc_status hc_model_set_scenario(hc_model* m, const char* interference, const char* harq,
                                       double tau_db);
HC_API hc_status hc_model_set_constants(hc_model* m, double c1, double c2);
/* "theorem" | "appendix" */
HC_API hc_status hc_model_set_constants_named(hc_model* m, const char* name);
/* threads = 0 uses every core. */
HC_API hc_status hc_model_set_mc(hc_model* m, uint64_t trials, uint64_t seed, unsigned threads);
HC_API hc_status hc_model_get_mc(const hc_model* m, uint64_t* trials, uint64_t* seed,
                                 unsigned* threads);
/* interference: 0 = QSI, 1 = FVI; harq: 0 = tx, 1 = type1, 2 = type2. Any
 * output may be NULL. */
HC_API hc_status hc_model_get_scenario(const hc_model* m, int* interference, int* harq,
                                       double* tau_db);
/* "exact" | "approx" */
HC_API hc_status hc_model_set_sampler(hc_model* m, const char* kind);
HC_API hc_status hc_model_set_tau_grid_db(hc_model* m, const double* tau_db, size_t n);
HC_API hc_status hc_model_get_tau_grid_db(const hc_model* m, double* tau_db, size_t cap,
                                          size_t* n);

/* Coverage at the model's threshold. */
HC_API hc_status hc_coverage(const hc_model* m, hc_engine e, hc_point* out);

/* Coverage over the model's tau grid (-10..20 dB in 1 dB steps when unset). */
HC_API hc_status hc_curve_compute(const hc_model* m, hc_engine e, hc_curve** out);
HC_API void hc_curve_destroy(hc_curve* c);
HC_API size_t hc_curve_size(const hc_curve* c);
HC_API hc_status hc_curve_point(const hc_curve* c, size_t i, double* tau_db, hc_point* out);
HC_API hc_status hc_curve_csv(const hc_curve* c, int header, char** out);
HC_API hc_status hc_curve_sidecar_json(const hc_curve* c, char** out);
HC_API hc_status hc_curve_invert_db(const hc_curve* c, double target, double* tau_db);

/* Loss: a = FVI curve, b = QSI curve. Gain: a = Type-II, b = Type-I. */
HC_API hc_status hc_metric_compute(hc_metric_kind kind, const hc_curve* a, const hc_curve* b,
                                   double target, hc_metric* out);
HC_API hc_status hc_metric_report_json(hc_metric_kind kind, const hc_curve* a,
                                       const hc_curve* b, double target, char** out);

/* figure: "fig2" | "fig3" | "fig4" | "fig6". engines: bit 0 = MC,
 * bit 1 = analytic. axis may be NULL or "name=v1,v2,..." (fig6 only).
 * Network, MC settings, constants and quadrature come from base. */
HC_API hc_status hc_reproduce(const hc_model* base, const char* figure, unsigned engines,
                              const char* axis, const char* out_dir, char** manifest_path);

/* Runs the built-in checks with the model's seed and threads. c1 and c2
 * override the model's constants unless NaN; they are checked by the
 * selftest itself, so invalid values produce a failing report rather than
 * an argument error. smoke_trials = 0 keeps the default. Returns
 * HC_ERR_CHECK_FAILED (with the report still filled) on failure. */
HC_API hc_status hc_selftest(const hc_model* m, double c1, double c2, uint64_t smoke_trials,
                             char** report);

#ifdef __cplusplus
}
#endif

#endif /* HARQCOV_H */
