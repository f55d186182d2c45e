// Command-line front end. Talks to the library exclusively through the C
// interface in orct/orct.h.

#include <orct/orct.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(orct_status status) {
    switch (status) {
        case ORCT_OK:
            return 0;
        case ORCT_ERR_INVALID_ARGUMENT:
            return kExitUsage;
        case ORCT_ERR_IO:
        case ORCT_ERR_DATA:
        case ORCT_ERR_INFEASIBLE:
            return kExitData;
        case ORCT_ERR_NUMERIC:
            return kExitNumeric;
    }
    return kExitNumeric;
}

// Throws the status as an int exit code after printing the library message.
void check(orct_status status) {
    if (status == ORCT_OK) return;
    std::cerr << "error: " << orct_last_error() << '\n';
    throw exit_code_for(status);
}

void write_output(const std::string& path, const char* text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << path << '\n';
        throw kExitData;
    }
    out << text;
    if (!out) {
        std::cerr << "error: failed writing " << path << '\n';
        throw kExitData;
    }
}

struct owned_string {
    char* ptr = nullptr;
    ~owned_string() { orct_string_free(ptr); }
    char** slot() { return &ptr; }
    const char* get() const { return ptr == nullptr ? "" : ptr; }
};

struct owned_dataset {
    orct_dataset* ptr = nullptr;
    ~owned_dataset() { orct_dataset_free(ptr); }
};

struct owned_model {
    orct_model* ptr = nullptr;
    ~owned_model() { orct_model_free(ptr); }
};

// Shared training flags; every field maps onto orct_train_options.
struct train_flags {
    int depth = 0;
    double gamma = 0.0;
    double cost = 0.0;
    int starts = 0;
    int max_iters = 0;
    double tol = 0.0;
    std::uint64_t seed = 0;
    bool no_coverage = false;
    int threads = 0;
    bool regression = false;
    std::string rho;
    std::string gamma_schedule;
};

void add_train_flags(CLI::App* cmd, train_flags& tf, bool with_task) {
    const orct_train_options defaults = [] {
        orct_train_options o;
        orct_train_options_init(&o);
        return o;
    }();
    tf.depth = defaults.depth;
    tf.gamma = defaults.gamma;
    tf.cost = defaults.cost_off_diagonal;
    tf.starts = defaults.n_starts;
    tf.max_iters = defaults.max_iterations;
    tf.tol = defaults.tol_rel_objective;
    tf.seed = defaults.seed;
    tf.threads = defaults.n_threads;

    cmd->add_option("--depth", tf.depth, "Tree depth (1-10)")->capture_default_str();
    cmd->add_option("--gamma", tf.gamma, "Smoothing steepness")->capture_default_str();
    cmd->add_option("--cost", tf.cost, "Off-diagonal misclassification cost")->capture_default_str();
    cmd->add_option("--starts", tf.starts, "Random restarts")->capture_default_str();
    cmd->add_option("--max-iters", tf.max_iters, "Gradient iterations per start")->capture_default_str();
    cmd->add_option("--tol", tf.tol, "Relative objective tolerance")->capture_default_str();
    cmd->add_option("--seed", tf.seed, "Base RNG seed")->capture_default_str();
    cmd->add_option("--threads", tf.threads, "Worker threads (0 = hardware)")->capture_default_str();
    cmd->add_option("--rho", tf.rho, "Per-class rate floors, label=percent[,label=percent...]");
    cmd->add_option("--gamma-schedule", tf.gamma_schedule, "Comma-separated smoothing continuation, e.g. 32,128,512");
    cmd->add_flag("--no-coverage", tf.no_coverage, "Drop the every-class-owns-a-leaf requirement");
    if (with_task) {
        cmd->add_flag("--regression", tf.regression, "Fit a regression tree instead of a classifier");
    }
}

orct_train_options to_options(const train_flags& tf) {
    orct_train_options opts;
    orct_train_options_init(&opts);
    opts.depth = tf.depth;
    opts.gamma = tf.gamma;
    opts.cost_off_diagonal = tf.cost;
    opts.n_starts = tf.starts;
    opts.max_iterations = tf.max_iters;
    opts.tol_rel_objective = tf.tol;
    opts.seed = tf.seed;
    opts.enforce_coverage = tf.no_coverage ? 0 : 1;
    opts.n_threads = tf.threads;
    opts.regression_task = tf.regression ? 1 : 0;
    opts.rho_targets = tf.rho.empty() ? nullptr : tf.rho.c_str();
    opts.gamma_schedule = tf.gamma_schedule.empty() ? nullptr : tf.gamma_schedule.c_str();
    return opts;
}

// Grid syntax: either "v1,v2,v3" or "start:stop:step" (stop inclusive up to
// a half-step of slack, so 0:85:2.5 ends exactly at 85).
std::string expand_grid(const std::string& text) {
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) return text;
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) {
        std::cerr << "error: grid '" << text << "' must be start:stop:step or a comma list\n";
        throw kExitUsage;
    }
    double start = 0.0, stop = 0.0, step = 0.0;
    try {
        start = std::stod(text.substr(0, c1));
        stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        step = std::stod(text.substr(c2 + 1));
    } catch (const std::exception&) {
        std::cerr << "error: grid '" << text << "' has non-numeric parts\n";
        throw kExitUsage;
    }
    if (step <= 0.0 || stop < start) {
        std::cerr << "error: grid '" << text << "' needs stop >= start and step > 0\n";
        throw kExitUsage;
    }
    std::ostringstream os;
    os.precision(17);
    for (int i = 0;; ++i) {
        const double v = start + i * step;
        if (v > stop + step * 0.5) break;
        if (i > 0) os << ',';
        os << std::min(v, stop);
    }
    return os.str();
}

owned_dataset read_dataset(const std::string& data, const std::string& target, const std::string& categorical) {
    owned_dataset ds;
    check(orct_dataset_read_csv(data.c_str(), target.empty() ? nullptr : target.c_str(),
                                categorical.empty() ? nullptr : categorical.c_str(), &ds.ptr));
    return ds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized classification and regression trees"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::string data_path, target, categorical, positive, model_path, out_path, trace_path;
    train_flags tf;
    int repetitions = 10;
    double train_fraction = 0.75;
    std::uint64_t protocol_seed = 0;
    std::string rho_grid;
    int resolution = 200;
    int class_index = -1;
    int baseline_depth = 4;

    auto* train_cmd = app.add_subcommand("train", "Fit a tree and store it as JSON");
    train_cmd->add_option("--data", data_path, "Training CSV")->required();
    train_cmd->add_option("--target", target, "Target column name")->required();
    train_cmd->add_option("--categorical", categorical, "Comma-separated columns to force one-hot");
    add_train_flags(train_cmd, tf, true);
    train_cmd->add_option("--model", model_path, "Where to write the model JSON");
    train_cmd->add_option("--out", out_path, "Also write the model JSON here (stdout when neither --model nor --out is given)");
    train_cmd->add_option("--trace", trace_path, "Write the per-iteration training trace CSV here");

    auto* predict_cmd = app.add_subcommand("predict", "Score a CSV with a stored model");
    predict_cmd->add_option("--data", data_path, "Input CSV (label column optional)")->required();
    predict_cmd->add_option("--model", model_path, "Model JSON")->required();
    predict_cmd->add_option("--out", out_path, "Output CSV path (default stdout)");

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Metrics of a stored model on labeled data");
    evaluate_cmd->add_option("--data", data_path, "Labeled CSV")->required();
    evaluate_cmd->add_option("--target", target, "Target column name")->required();
    evaluate_cmd->add_option("--model", model_path, "Model JSON")->required();
    evaluate_cmd->add_option("--positive-class", positive, "Class reported as TPR");
    evaluate_cmd->add_option("--out", out_path, "Output CSV path (default stdout)");

    auto* benchmark_cmd = app.add_subcommand("benchmark", "Repeated stratified train/test protocol");
    benchmark_cmd->add_option("--data", data_path, "Labeled CSV")->required();
    benchmark_cmd->add_option("--target", target, "Target column name")->required();
    benchmark_cmd->add_option("--categorical", categorical, "Comma-separated columns to force one-hot");
    benchmark_cmd->add_option("--positive-class", positive, "Class reported as TPR");
    benchmark_cmd->add_option("--reps", repetitions, "Repetitions")->capture_default_str();
    benchmark_cmd->add_option("--train-fraction", train_fraction, "Training share per split")->capture_default_str();
    add_train_flags(benchmark_cmd, tf, false);
    benchmark_cmd->add_option("--out", out_path, "Output CSV path (default stdout)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Constrained trainings over a rho grid");
    sweep_cmd->add_option("--data", data_path, "Labeled CSV (binary target)")->required();
    sweep_cmd->add_option("--target", target, "Target column name")->required();
    sweep_cmd->add_option("--categorical", categorical, "Comma-separated columns to force one-hot");
    sweep_cmd->add_option("--positive-class", positive, "Class whose rate is constrained")->required();
    sweep_cmd->add_option("--rho-grid", rho_grid, "Percent grid, start:stop:step or comma list")->required();
    sweep_cmd->add_option("--reps", repetitions, "Repetitions")->capture_default_str();
    sweep_cmd->add_option("--train-fraction", train_fraction, "Training share per split")->capture_default_str();
    add_train_flags(sweep_cmd, tf, false);
    sweep_cmd->add_option("--out", out_path, "Output CSV path (default stdout)");

    auto* importance_cmd = app.add_subcommand("importance", "SIM/MIM variable importance of a stored model");
    importance_cmd->add_option("--model", model_path, "Model JSON")->required();
    importance_cmd->add_option("--out", out_path, "Output CSV path (default stdout)");

    auto* heatmap_cmd = app.add_subcommand("heatmap", "Class-probability grid for a two-feature model");
    heatmap_cmd->add_option("--model", model_path, "Model JSON")->required();
    heatmap_cmd->add_option("--resolution", resolution, "Grid points per axis")->capture_default_str();
    heatmap_cmd->add_option("--class-index", class_index, "Class to map (-1 = default)")->capture_default_str();
    heatmap_cmd->add_option("--out", out_path, "Output CSV path (default stdout)");

    auto* baseline_cmd = app.add_subcommand("baseline", "Greedy axis-aligned tree under the same protocol");
    baseline_cmd->add_option("--data", data_path, "Labeled CSV")->required();
    baseline_cmd->add_option("--target", target, "Target column name")->required();
    baseline_cmd->add_option("--categorical", categorical, "Comma-separated columns to force one-hot");
    baseline_cmd->add_option("--positive-class", positive, "Class reported as TPR");
    baseline_cmd->add_option("--depth", baseline_depth, "Maximum depth")->capture_default_str();
    baseline_cmd->add_option("--reps", repetitions, "Repetitions")->capture_default_str();
    baseline_cmd->add_option("--train-fraction", train_fraction, "Training share per split")->capture_default_str();
    baseline_cmd->add_option("--seed", protocol_seed, "Split seed")->capture_default_str();
    baseline_cmd->add_option("--out", out_path, "Output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (train_cmd->parsed()) {
            owned_dataset ds = read_dataset(data_path, target, categorical);
            orct_train_options opts = to_options(tf);
            opts.collect_trace = trace_path.empty() ? 0 : 1;
            owned_model model;
            check(orct_train(ds.ptr, &opts, &model.ptr));
            std::printf("objective %.17g\n", orct_model_objective(model.ptr));
            if (!model_path.empty()) check(orct_model_save(model.ptr, model_path.c_str()));
            if (model_path.empty() || !out_path.empty()) {
                owned_string json;
                check(orct_model_to_json(model.ptr, json.slot()));
                write_output(out_path, json.get());
            }
            if (!trace_path.empty()) {
                owned_string trace;
                check(orct_model_trace_csv(model.ptr, trace.slot()));
                write_output(trace_path, trace.get());
            }
        } else if (predict_cmd->parsed()) {
            owned_model model;
            check(orct_model_load(model_path.c_str(), &model.ptr));
            owned_dataset ds = read_dataset(data_path, "", "");
            owned_string csv;
            check(orct_predict_csv(model.ptr, ds.ptr, csv.slot()));
            write_output(out_path, csv.get());
        } else if (evaluate_cmd->parsed()) {
            owned_model model;
            check(orct_model_load(model_path.c_str(), &model.ptr));
            owned_dataset ds = read_dataset(data_path, target, "");
            owned_string csv;
            check(orct_evaluate_csv(model.ptr, ds.ptr, positive.empty() ? nullptr : positive.c_str(), csv.slot()));
            write_output(out_path, csv.get());
        } else if (benchmark_cmd->parsed()) {
            owned_dataset ds = read_dataset(data_path, target, categorical);
            const orct_train_options opts = to_options(tf);
            orct_protocol_options protocol;
            orct_protocol_options_init(&protocol);
            protocol.repetitions = repetitions;
            protocol.train_fraction = train_fraction;
            protocol.seed = tf.seed;
            protocol.positive_label = positive.empty() ? nullptr : positive.c_str();
            owned_string csv;
            check(orct_benchmark_csv(ds.ptr, &opts, &protocol, csv.slot()));
            write_output(out_path, csv.get());
        } else if (sweep_cmd->parsed()) {
            owned_dataset ds = read_dataset(data_path, target, categorical);
            const orct_train_options opts = to_options(tf);
            orct_protocol_options protocol;
            orct_protocol_options_init(&protocol);
            protocol.repetitions = repetitions;
            protocol.train_fraction = train_fraction;
            protocol.seed = tf.seed;
            protocol.positive_label = positive.c_str();
            const std::string grid = expand_grid(rho_grid);
            owned_string csv;
            check(orct_rho_sweep_csv(ds.ptr, &opts, &protocol, grid.c_str(), csv.slot()));
            write_output(out_path, csv.get());
        } else if (importance_cmd->parsed()) {
            owned_model model;
            check(orct_model_load(model_path.c_str(), &model.ptr));
            owned_string csv;
            check(orct_importance_csv(model.ptr, csv.slot()));
            write_output(out_path, csv.get());
        } else if (heatmap_cmd->parsed()) {
            owned_model model;
            check(orct_model_load(model_path.c_str(), &model.ptr));
            owned_string csv;
            check(orct_heatmap_csv(model.ptr, resolution, class_index, csv.slot()));
            write_output(out_path, csv.get());
        } else if (baseline_cmd->parsed()) {
            owned_dataset ds = read_dataset(data_path, target, categorical);
            orct_protocol_options protocol;
            orct_protocol_options_init(&protocol);
            protocol.repetitions = repetitions;
            protocol.train_fraction = train_fraction;
            protocol.seed = protocol_seed;
            protocol.positive_label = positive.empty() ? nullptr : positive.c_str();
            owned_string csv;
            check(orct_baseline_csv(ds.ptr, baseline_depth, &protocol, csv.slot()));
            write_output(out_path, csv.get());
        }
    } catch (int code) {
        return code;
    }
    return 0;
}
