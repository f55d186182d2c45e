#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "data.hpp"
#include "model.hpp"
#include "serialize.hpp"
#include "topology.hpp"
#include "trainer.hpp"
#include "types.hpp"

namespace orct {

// Classification metrics. Rates for classes absent from the evaluated data
// are NaN ("undefined"), never zero.
struct Metrics {
    double accuracy = 0.0;
    std::vector<double> recall;           // per class
    double tpr = std::numeric_limits<double>::quiet_NaN();  // recall of the positive class
    double tnr = std::numeric_limits<double>::quiet_NaN();  // recall of the rest, pooled
    std::vector<std::vector<int>> confusion;  // confusion[truth][predicted]
};

std::vector<int> predict_dataset(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                 const LeafAssignment& assignment, const Dataset& data);

// positive_class < 0 leaves tpr/tnr undefined.
Metrics compute_metrics(const std::vector<int>& predicted, const std::vector<int>& truth, int n_classes,
                        int positive_class);

// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Spearman rank correlation with average ranks on ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Benchmark protocol: repeated stratified splits, one training per split.

struct ProtocolConfig {
    int repetitions = 10;
    double train_fraction = 0.75;
    std::uint64_t seed = 0;
    TrainConfig train;
    std::string positive_label;  // optional; enables TPR/TNR columns
};

struct RepetitionResult {
    int repetition = 0;
    double objective = 0.0;
    Metrics train_metrics;
    Metrics test_metrics;
};

struct PhaseTimings {
    double read_s = 0.0;     // caller-measured CSV ingestion
    double scaling_s = 0.0;  // encoding and min-max scaling
    double init_s = 0.0;     // random initial-cut generation
    double optimize_s = 0.0;
    double evaluate_s = 0.0;
};

struct BenchmarkReport {
    std::vector<RepetitionResult> repetitions;
    double mean_train_accuracy = 0.0;
    double mean_test_accuracy = 0.0;
    PhaseTimings timings;
    std::vector<std::vector<TraceRow>> traces;  // per repetition, when collected
};

// Derives the training seed for one repetition of the protocol.
std::uint64_t repetition_seed(std::uint64_t base_seed, int repetition);

BenchmarkReport run_benchmark(const RawTable& table, const ProtocolConfig& cfg, double read_seconds = 0.0);

std::string benchmark_to_csv(const BenchmarkReport& report, const ProtocolConfig& cfg);

// ---------------------------------------------------------------------------
// Performance-constrained sweep over rho targets for the positive class.

struct SweepRow {
    double rho = 0.0;  // imposed target, percent
    double tpr_train = 0.0, tpr_test = 0.0;
    double tnr_train = 0.0, tnr_test = 0.0;
    double ccr_train = 0.0, ccr_test = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;           // percent units, grid order
    LinearFit fit_tpr_train;              // on rows with rho > 0
    LinearFit fit_tpr_test;
};

// rho_grid entries are percentages (e.g. 62.5). Requires a binary target and
// a designated positive label.
SweepReport run_sweep(const RawTable& table, const ProtocolConfig& cfg, const std::vector<double>& rho_grid);

std::string sweep_to_csv(const SweepReport& report);

// ---------------------------------------------------------------------------
// Variable importance: SIM (sum of |a| over branch nodes) and MIM (max).

struct ImportanceEntry {
    std::string name;
    double sim = 0.0;
    double mim = 0.0;
};

struct ImportanceReport {
    std::vector<ImportanceEntry> per_feature;  // encoded feature space
    std::vector<ImportanceEntry> per_source;   // max over a source's dummies
};

ImportanceReport importance(const StoredModel& model);

std::string importance_to_csv(const ImportanceReport& report);

// ---------------------------------------------------------------------------
// Class-membership probability grid for two-feature models.

// Emits CSV x1,x2,probability over a resolution^2 grid spanning the model's
// training feature ranges (raw units). Throws unless the model has exactly
// two features. class_index < 0 selects class 1 for binary models, else 0.
std::string heatmap_csv(const StoredModel& model, int resolution = 200, int class_index = -1);

// ---------------------------------------------------------------------------
// Greedy axis-aligned baseline: Gini-impurity splits at midpoint thresholds.

struct BaselineNode {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0.0; // x[feature] <= threshold goes left
    int left = -1;
    int right = -1;
    int label = -1;         // majority class at the node
};

struct BaselineTree {
    std::vector<BaselineNode> nodes;  // node 0 is the root
    int n_classes = 0;
};

BaselineTree greedy_baseline(const Dataset& train, int max_depth, int min_node_size = 5);

int baseline_predict(const BaselineTree& tree, const double* x);

std::vector<int> baseline_predict_dataset(const BaselineTree& tree, const Dataset& data);

// The repeated-split protocol applied to the greedy tree. Uses the same
// splits as run_benchmark for the same seed.
struct BaselineReport {
    std::vector<RepetitionResult> repetitions;  // objective fields stay 0
    double mean_train_accuracy = 0.0;
    double mean_test_accuracy = 0.0;
};

BaselineReport run_baseline(const RawTable& table, int max_depth, const ProtocolConfig& cfg);

std::string baseline_to_csv(const BaselineReport& report, int max_depth, const ProtocolConfig& cfg);

}  // namespace orct
