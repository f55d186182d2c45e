#ifndef ORCT_ORCT_H
#define ORCT_ORCT_H

/* C interface to the randomized-tree library. All entry points return a
 * status code; on failure a thread-local message is available through
 * orct_last_error(). Strings produced by the library are heap-allocated
 * and must be released with orct_string_free(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ORCT_API __declspec(dllexport)
#else
#define ORCT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum orct_status {
    ORCT_OK = 0,
    ORCT_ERR_INVALID_ARGUMENT = 1,
    ORCT_ERR_IO = 2,
    ORCT_ERR_DATA = 3,
    ORCT_ERR_INFEASIBLE = 4,
    ORCT_ERR_NUMERIC = 5
} orct_status;

typedef struct orct_dataset orct_dataset;
typedef struct orct_model orct_model;

/* Message for the most recent failure on this thread; empty string if none. */
ORCT_API const char* orct_last_error(void);

ORCT_API void orct_string_free(char* s);

/* Loads a CSV file (comma separator, header row). `target_column` may be
 * NULL or empty for unlabeled prediction input. `categorical_columns` is a
 * comma-separated list of column names to force one-hot encoding for, or
 * NULL. Rows with missing values are dropped. */
ORCT_API orct_status orct_dataset_read_csv(const char* path, const char* target_column,
                                           const char* categorical_columns, orct_dataset** out);

ORCT_API void orct_dataset_free(orct_dataset* ds);

/* Number of usable rows, or -1 for a NULL dataset. */
ORCT_API int64_t orct_dataset_rows(const orct_dataset* ds);

/* Training configuration. Initialize with orct_train_options_init before
 * overriding fields; zero-initialization is not a valid configuration. */
typedef struct orct_train_options {
    int depth;                  /* tree depth, 1..10 (default 2) */
    double gamma;               /* smoothing steepness (default 512) */
    double cost_off_diagonal;   /* misclassification cost between distinct classes (default 0.5) */
    int n_starts;               /* random restarts (default 20) */
    int max_iterations;         /* gradient iterations per start (default 500) */
    double tol_rel_objective;   /* relative-improvement stop (default 1e-6) */
    uint64_t seed;              /* base RNG seed (default 0) */
    int enforce_coverage;       /* require every class to own a leaf (default 1) */
    int n_threads;              /* worker threads across starts, 0 = hardware (default 0) */
    int regression_task;        /* 0 = classification, 1 = regression */
    int collect_trace;          /* record per-iteration trace rows (default 0) */
    /* Per-class rate floors as "label=percent" pairs, comma separated,
     * e.g. "1=70" demands an expected true-positive rate of at least 70%
     * on training points of class "1". NULL or empty for none. */
    const char* rho_targets;
    /* Comma-separated increasing smoothing schedule, e.g. "32,128,512".
     * The final training stage always runs at `gamma`. NULL for none. */
    const char* gamma_schedule;
} orct_train_options;

ORCT_API void orct_train_options_init(orct_train_options* opts);

/* Trains on a labeled dataset. The model captures the feature encoding and
 * scaling, so prediction inputs are given in raw (unscaled) form. */
ORCT_API orct_status orct_train(const orct_dataset* ds, const orct_train_options* opts, orct_model** out);

ORCT_API void orct_model_free(orct_model* m);

ORCT_API orct_status orct_model_save(const orct_model* m, const char* path);

ORCT_API orct_status orct_model_load(const char* path, orct_model** out);

/* Canonical JSON form of the model; byte-identical across runs that produce
 * the same parameters. */
ORCT_API orct_status orct_model_to_json(const orct_model* m, char** out);

/* Final training objective (expected misclassification cost, or mean squared
 * error for regression models). NaN for loaded models, which carry no
 * training history. */
ORCT_API double orct_model_objective(const orct_model* m);

/* Per-iteration trace as CSV (columns start, iteration, objective, step,
 * max_violation). Empty trace yields just the header row. */
ORCT_API orct_status orct_model_trace_csv(const orct_model* m, char** out);

/* Predictions for every row of `ds` as CSV. Classification emits the label
 * and one membership-probability column per class; regression emits the
 * predicted value. */
ORCT_API orct_status orct_predict_csv(const orct_model* m, const orct_dataset* ds, char** out);

/* Accuracy and per-class rates of `m` on labeled data, as CSV.
 * `positive_label` selects the class reported as TPR (NULL or empty to skip
 * the binary rates). */
ORCT_API orct_status orct_evaluate_csv(const orct_model* m, const orct_dataset* ds,
                                       const char* positive_label, char** out);

/* Importance of every encoded feature (and of each source feature,
 * aggregated over its dummies) as CSV with columns scope, feature, sim, mim. */
ORCT_API orct_status orct_importance_csv(const orct_model* m, char** out);

/* Class-membership probability over a regular grid in the two raw feature
 * dimensions, as CSV with columns x1, x2, probability. Only valid for
 * 2-feature classification models. `class_index` -1 picks the default
 * (second class of a binary model, first class otherwise). */
ORCT_API orct_status orct_heatmap_csv(const orct_model* m, int resolution, int class_index, char** out);

/* Repeated-split protocol configuration shared by benchmark and sweep. */
typedef struct orct_protocol_options {
    int repetitions;        /* default 10 */
    double train_fraction;  /* default 0.75 */
    uint64_t seed;          /* split seed, also the base of per-repetition training seeds */
    const char* positive_label; /* class reported as TPR; NULL to skip */
} orct_protocol_options;

ORCT_API void orct_protocol_options_init(orct_protocol_options* opts);

/* Repeated stratified train/test protocol; per-repetition and mean accuracy
 * (and TPR/TNR when a positive label is given) as CSV, with phase timings in
 * trailing comment lines. */
ORCT_API orct_status orct_benchmark_csv(const orct_dataset* ds, const orct_train_options* train_opts,
                                        const orct_protocol_options* protocol, char** out);

/* One constrained training per grid value per repetition on a binary task.
 * `rho_grid` is a comma-separated list of percentages for the positive
 * class's training rate floor. Emits the averaged rate table (percent) plus
 * least-squares fits of the TPR columns against the grid. */
ORCT_API orct_status orct_rho_sweep_csv(const orct_dataset* ds, const orct_train_options* train_opts,
                                        const orct_protocol_options* protocol, const char* rho_grid,
                                        char** out);

/* Axis-aligned greedy tree reference under the same protocol. */
ORCT_API orct_status orct_baseline_csv(const orct_dataset* ds, int max_depth,
                                       const orct_protocol_options* protocol, char** out);

#ifdef __cplusplus
}
#endif

#endif /* ORCT_ORCT_H */
