/*
 * wapsel: cross-layer Wi-Fi Aware parameter selection for cooperative
 * device-to-device links.
 *
 * C interface over the shared library. Every object is an opaque handle
 * created by a *_create/*_load/*_default call and released with the matching
 * *_free. Every fallible call returns a wapsel_status; on failure
 * wapsel_last_error() describes the problem (per calling thread, valid until
 * the next failing call on that thread). Strings returned through char**
 * out-parameters are owned by the caller and released with wapsel_string_free.
 */
#ifndef WAPSEL_H
#define WAPSEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(WAPSEL_BUILDING_LIBRARY)
#    define WAPSEL_API __declspec(dllexport)
#  else
#    define WAPSEL_API __declspec(dllimport)
#  endif
#else
#  define WAPSEL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wapsel_status {
  WAPSEL_OK = 0,
  WAPSEL_ERR_INVALID_ARGUMENT = 1, /* null handle, bad option, failed precondition */
  WAPSEL_ERR_RANGE = 2,            /* index outside its enumeration */
  WAPSEL_ERR_DOMAIN = 3,           /* non-positive battery or energy */
  WAPSEL_ERR_PARSE = 4,            /* malformed file or text */
  WAPSEL_ERR_VALIDATION = 5,       /* well-formed data violating an invariant */
  WAPSEL_ERR_CONFIG = 6,           /* missing or invalid configuration key */
  WAPSEL_ERR_IO = 7,               /* file could not be read or written */
  WAPSEL_ERR_DIVERGED = 8,         /* training loss became non-finite */
  WAPSEL_ERR_MISMATCH = 9,         /* artifacts stamped with another config hash */
  WAPSEL_ERR_INTERNAL = 10
} wapsel_status;

WAPSEL_API const char* wapsel_status_name(wapsel_status status);
WAPSEL_API const char* wapsel_last_error(void);
WAPSEL_API const char* wapsel_version(void);
WAPSEL_API void wapsel_string_free(char* s);

/* ---- enumerations ------------------------------------------------------ */

/* Stable integer codes; names are the lower-camel strings used in files. */
typedef enum wapsel_enum_kind {
  WAPSEL_ENUM_PERFORMANCE_MODE = 0, /* realtime, bulk */
  WAPSEL_ENUM_ACCESS_CATEGORY = 1,  /* bestEffort, background, interactiveVideo, interactiveVoice */
  WAPSEL_ENUM_APP_TYPE = 2,         /* textMessage ... mapSync (8) */
  WAPSEL_ENUM_TIME_OF_DAY = 3,      /* morning, afternoon, evening, night */
  WAPSEL_ENUM_BATTERY_CONFIG = 4,   /* bothHigh, bothMedium, bothLow, pubHighSubLow */
  WAPSEL_ENUM_LOSS = 5,             /* ce, kl, dpo */
  WAPSEL_ENUM_REWARD_MODE = 6       /* contextAware (alias "context"), naive */
} wapsel_enum_kind;

WAPSEL_API wapsel_status wapsel_enum_parse(wapsel_enum_kind kind, const char* text, int* code);
WAPSEL_API wapsel_status wapsel_enum_name(wapsel_enum_kind kind, int code, const char** name);

#define WAPSEL_NUM_ACTIONS 8

/* index = mode * 4 + category */
WAPSEL_API wapsel_status wapsel_action_from_index(int index, int* mode, int* category);
WAPSEL_API wapsel_status wapsel_action_index(int mode, int category, int* index);

/* ---- scoring ----------------------------------------------------------- */

WAPSEL_API wapsel_status wapsel_latency_score(int app, double latency_ms, double* score);
WAPSEL_API wapsel_status wapsel_energy_score(double battery_pct, double energy_pct_per_hour,
                                             double* score);
WAPSEL_API wapsel_status wapsel_soft_labels(const double objective[WAPSEL_NUM_ACTIONS],
                                            double temperature,
                                            double labels[WAPSEL_NUM_ACTIONS]);

/* One decision step. app_history is oldest first, length = configured window. */
typedef struct wapsel_context {
  int time;
  double publisher_battery;
  int has_subscriber;
  double subscriber_battery;
  const int* app_history;
  size_t history_len;
  uint64_t step_index;
} wapsel_context;

typedef struct wapsel_config wapsel_config;

/* Objective, latency and energy scores of all 8 actions under the config's reward. */
WAPSEL_API wapsel_status wapsel_rewards(const wapsel_config* config, const wapsel_context* context,
                                        const double latency_ms[WAPSEL_NUM_ACTIONS],
                                        const double energy_pct_per_hour[WAPSEL_NUM_ACTIONS],
                                        double objective[WAPSEL_NUM_ACTIONS],
                                        double latency_score[WAPSEL_NUM_ACTIONS],
                                        double energy_score[WAPSEL_NUM_ACTIONS]);

/* ---- configuration ----------------------------------------------------- */

WAPSEL_API wapsel_status wapsel_config_default(wapsel_config** out);
WAPSEL_API wapsel_status wapsel_config_load(const char* path, wapsel_config** out);
/* key is dotted ("train.epochs"); value is JSON text or a bare word. */
WAPSEL_API wapsel_status wapsel_config_override(wapsel_config* config, const char* key,
                                                const char* value);
WAPSEL_API wapsel_status wapsel_config_set_seed(wapsel_config* config, uint64_t seed);
WAPSEL_API wapsel_status wapsel_config_hash(const wapsel_config* config, char** hash);
WAPSEL_API wapsel_status wapsel_config_to_json(const wapsel_config* config, char** json);
WAPSEL_API wapsel_status wapsel_config_output_dir(const wapsel_config* config, char** dir);
WAPSEL_API void wapsel_config_free(wapsel_config* config);

/* ---- datasets ---------------------------------------------------------- */

typedef struct wapsel_dataset wapsel_dataset;

typedef enum wapsel_slice { WAPSEL_SLICE_ALL = 0, WAPSEL_SLICE_COOP = 1 } wapsel_slice;

/* Writes train.jsonl, test.jsonl, ood_test.jsonl and manifest.json. */
WAPSEL_API wapsel_status wapsel_gen(const wapsel_config* config, const char* out_dir,
                                    char** manifest_json);
/* path is a dataset file, or a directory holding default_name. */
WAPSEL_API wapsel_status wapsel_dataset_load(const wapsel_config* config, const char* path,
                                             const char* default_name, wapsel_dataset** out);
WAPSEL_API wapsel_status wapsel_dataset_size(const wapsel_dataset* dataset, size_t* size);
WAPSEL_API wapsel_status wapsel_dataset_slice(const wapsel_dataset* dataset, wapsel_slice slice,
                                              wapsel_dataset** out);
WAPSEL_API wapsel_status wapsel_dataset_mask_peer(const wapsel_dataset* dataset,
                                                  wapsel_dataset** out);
WAPSEL_API void wapsel_dataset_free(wapsel_dataset* dataset);

/* ---- models ------------------------------------------------------------ */

typedef struct wapsel_model wapsel_model;

/* Negative / zero fields fall back to the config. */
typedef struct wapsel_train_options {
  int loss;        /* WAPSEL_ENUM_LOSS code, or -1 */
  int layers;      /* 1..3, or 0 */
  int no_peer;     /* train on peer-masked contexts */
  int reward_mode; /* WAPSEL_ENUM_REWARD_MODE code, or -1 */
} wapsel_train_options;

WAPSEL_API wapsel_train_options wapsel_train_options_default(void);

/* reference is required for DPO and ignored otherwise; test may be NULL. */
WAPSEL_API wapsel_status wapsel_train(const wapsel_config* config, const wapsel_dataset* train,
                                      const wapsel_dataset* test,
                                      const wapsel_train_options* options,
                                      const wapsel_model* reference, wapsel_model** out,
                                      char** report_json);
WAPSEL_API wapsel_status wapsel_model_load(const char* path, wapsel_model** out);
WAPSEL_API wapsel_status wapsel_model_save(const wapsel_model* model, const char* path);
WAPSEL_API wapsel_status wapsel_model_metadata(const wapsel_model* model, char** json);
WAPSEL_API void wapsel_model_free(wapsel_model* model);

/* ---- policies ---------------------------------------------------------- */

typedef struct wapsel_policy wapsel_policy;

/* name: oracle | rule | fix-rt-iv | fix-bulk-bg | head (head needs a model). */
WAPSEL_API wapsel_status wapsel_policy_create(const char* name, const wapsel_model* model,
                                              wapsel_policy** out);
WAPSEL_API wapsel_status wapsel_policy_name(const wapsel_policy* policy, char** name);
/* truth (ground-truth objective) may be NULL except for the oracle. */
WAPSEL_API wapsel_status wapsel_policy_decide(const wapsel_policy* policy,
                                              const wapsel_context* context,
                                              const double truth[WAPSEL_NUM_ACTIONS],
                                              int* action_index);
WAPSEL_API void wapsel_policy_free(wapsel_policy* policy);

/* ---- evaluation -------------------------------------------------------- */

typedef enum wapsel_metric {
  WAPSEL_METRIC_CONFIG = 0,       /* the config's reward weights */
  WAPSEL_METRIC_LATENCY_ONLY = 1, /* w_L = 0.1, w_P = 0 */
  WAPSEL_METRIC_ENERGY_ONLY = 2   /* w_L = 0, w_P = 1.0 */
} wapsel_metric;

/* Any of report_json / flat_table may be NULL. */
WAPSEL_API wapsel_status wapsel_evaluate(const wapsel_config* config,
                                         const wapsel_policy* const* policies, size_t count,
                                         const wapsel_dataset* dataset, wapsel_metric metric,
                                         const char* slice_label, char** report_json,
                                         char** flat_table);

/* max_steps 0 uses eval.replay_steps from the config. */
WAPSEL_API wapsel_status wapsel_replay(const wapsel_config* config,
                                       const wapsel_policy* const* policies, size_t count,
                                       const wapsel_dataset* dataset, int time,
                                       int battery_config, size_t max_steps, char** transcript);

/* End-to-end gen -> train -> eval into out_dir, reusing cached artifacts. */
WAPSEL_API wapsel_status wapsel_compare(const wapsel_config* config, const char* out_dir,
                                        char** table);

#ifdef __cplusplus
}
#endif

#endif /* WAPSEL_H */
