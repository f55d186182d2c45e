#include <orct/orct.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "data.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "model.hpp"
#include "regression.hpp"
#include "serialize.hpp"
#include "trainer.hpp"

struct orct_dataset {
    orct::RawTable table;
};

struct orct_model {
    orct::StoredModel stored;
    double objective = std::numeric_limits<double>::quiet_NaN();
    std::vector<orct::TraceRow> trace;
};

namespace {

thread_local std::string g_last_error;

orct_status fail(orct_status code, const char* what) {
    g_last_error = what;
    return code;
}

template <typename Fn>
orct_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return ORCT_OK;
    } catch (const orct::io_error& e) {
        return fail(ORCT_ERR_IO, e.what());
    } catch (const orct::data_error& e) {
        return fail(ORCT_ERR_DATA, e.what());
    } catch (const orct::infeasible_error& e) {
        return fail(ORCT_ERR_INFEASIBLE, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(ORCT_ERR_INVALID_ARGUMENT, e.what());
    } catch (const orct::numeric_error& e) {
        return fail(ORCT_ERR_NUMERIC, e.what());
    } catch (const std::bad_alloc&) {
        return fail(ORCT_ERR_NUMERIC, "out of memory");
    } catch (const std::exception& e) {
        return fail(ORCT_ERR_NUMERIC, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::string text_or_empty(const char* s) { return s == nullptr ? std::string() : std::string(s); }

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

std::string strip(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(what);
        return v;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument(std::string(what) + ": '" + text + "'");
    } catch (const std::out_of_range&) {
        throw std::invalid_argument(std::string(what) + ": '" + text + "'");
    }
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        const std::string t = strip(item);
        if (t.empty()) throw std::invalid_argument(std::string(what) + ": empty entry");
        out.push_back(parse_double(t, what));
    }
    return out;
}

// "label=percent" pairs resolved against the training class labels; values
// are percentages and come out as fractions.
std::vector<double> parse_rho_targets(const std::string& text, const std::vector<std::string>& labels) {
    std::vector<double> rho;
    if (strip(text).empty()) return rho;
    rho.assign(labels.size(), 0.0);
    for (const auto& item : split_list(text)) {
        const std::string entry = strip(item);
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("rho target '" + entry + "' is not label=percent");
        }
        const std::string label = strip(entry.substr(0, eq));
        const double percent = parse_double(strip(entry.substr(eq + 1)), "rho percent");
        if (percent < 0.0 || percent > 100.0) {
            throw std::invalid_argument("rho percent " + entry + " outside [0,100]");
        }
        std::size_t k = labels.size();
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) k = i;
        }
        if (k == labels.size()) {
            throw std::invalid_argument("rho target class '" + label + "' not present in the data");
        }
        rho[k] = percent / 100.0;
    }
    return rho;
}

orct::TrainConfig to_train_config(const orct_train_options& opts, const std::vector<std::string>& labels) {
    orct::TrainConfig tc;
    tc.depth = opts.depth;
    tc.gamma = opts.gamma;
    tc.cost_off_diagonal = opts.cost_off_diagonal;
    tc.n_starts = opts.n_starts;
    tc.max_outer_iters = opts.max_iterations;
    tc.tol_rel_objective = opts.tol_rel_objective;
    tc.seed = opts.seed;
    tc.enforce_coverage = opts.enforce_coverage != 0;
    tc.n_threads = opts.n_threads;
    tc.collect_trace = opts.collect_trace != 0;
    tc.rho = parse_rho_targets(text_or_empty(opts.rho_targets), labels);
    const std::string schedule = strip(text_or_empty(opts.gamma_schedule));
    if (!schedule.empty()) {
        tc.gamma_schedule = parse_double_list(schedule, "gamma schedule value");
        for (double g : tc.gamma_schedule) {
            require(g > 0.0, "gamma schedule values must be positive");
        }
    }
    return tc;
}

}  // namespace

extern "C" {

const char* orct_last_error(void) { return g_last_error.c_str(); }

void orct_string_free(char* s) { std::free(s); }

orct_status orct_dataset_read_csv(const char* path, const char* target_column, const char* categorical_columns,
                                  orct_dataset** out) {
    return guarded([&] {
        require(path != nullptr, "path is required");
        require(out != nullptr, "output pointer is required");
        std::vector<std::string> hints;
        for (const auto& item : split_list(text_or_empty(categorical_columns))) {
            const std::string t = strip(item);
            if (!t.empty()) hints.push_back(t);
        }
        auto ds = std::make_unique<orct_dataset>();
        ds->table = orct::ingest_csv(path, text_or_empty(target_column), hints);
        *out = ds.release();
    });
}

void orct_dataset_free(orct_dataset* ds) { delete ds; }

int64_t orct_dataset_rows(const orct_dataset* ds) {
    return ds == nullptr ? -1 : static_cast<int64_t>(ds->table.n_rows);
}

void orct_train_options_init(orct_train_options* opts) {
    if (opts == nullptr) return;
    const orct::TrainConfig defaults;
    *opts = orct_train_options{};
    opts->depth = defaults.depth;
    opts->gamma = defaults.gamma;
    opts->cost_off_diagonal = defaults.cost_off_diagonal;
    opts->n_starts = defaults.n_starts;
    opts->max_iterations = defaults.max_outer_iters;
    opts->tol_rel_objective = defaults.tol_rel_objective;
    opts->seed = defaults.seed;
    opts->enforce_coverage = defaults.enforce_coverage ? 1 : 0;
    opts->n_threads = defaults.n_threads;
    opts->regression_task = 0;
    opts->collect_trace = 0;
    opts->rho_targets = nullptr;
    opts->gamma_schedule = nullptr;
}

orct_status orct_train(const orct_dataset* ds, const orct_train_options* opts, orct_model** out) {
    return guarded([&] {
        require(ds != nullptr, "dataset is required");
        require(opts != nullptr, "options are required");
        require(out != nullptr, "output pointer is required");
        const bool regression = opts->regression_task != 0;
        const orct::EncodingSpec spec = orct::build_encoding(ds->table, regression);
        const orct::Dataset data = orct::apply_encoding(ds->table, spec, true);
        auto model = std::make_unique<orct_model>();
        const orct::TrainConfig tc = to_train_config(*opts, spec.class_labels);
        if (regression) {
            require(strip(text_or_empty(opts->rho_targets)).empty(),
                    "rho targets apply to classification only");
            const orct::RegressionModel trained = orct::train_orrt(data, tc);
            model->stored = orct::make_stored_model(trained, spec);
            model->objective = trained.mse;
            model->trace = trained.trace;
        } else {
            const orct::TrainedModel trained = orct::train(data, tc);
            model->stored = orct::make_stored_model(trained, spec);
            model->objective = trained.objective;
            model->trace = trained.trace;
        }
        *out = model.release();
    });
}

void orct_model_free(orct_model* m) { delete m; }

orct_status orct_model_save(const orct_model* m, const char* path) {
    return guarded([&] {
        require(m != nullptr, "model is required");
        require(path != nullptr, "path is required");
        orct::save_model(path, m->stored);
    });
}

orct_status orct_model_load(const char* path, orct_model** out) {
    return guarded([&] {
        require(path != nullptr, "path is required");
        require(out != nullptr, "output pointer is required");
        auto model = std::make_unique<orct_model>();
        model->stored = orct::load_model(path);
        *out = model.release();
    });
}

orct_status orct_model_to_json(const orct_model* m, char** out) {
    return guarded([&] {
        require(m != nullptr, "model is required");
        require(out != nullptr, "output pointer is required");
        *out = dup_string(orct::model_to_json(m->stored));
    });
}

double orct_model_objective(const orct_model* m) {
    return m == nullptr ? std::numeric_limits<double>::quiet_NaN() : m->objective;
}

orct_status orct_model_trace_csv(const orct_model* m, char** out) {
    return guarded([&] {
        require(m != nullptr, "model is required");
        require(out != nullptr, "output pointer is required");
        *out = dup_string(orct::trace_to_csv(m->trace));
    });
}

orct_status orct_predict_csv(const orct_model* m, const orct_dataset* ds, char** out) {
    return guarded([&] {
        require(m != nullptr, "model is required");
        require(ds != nullptr, "dataset is required");
        require(out != nullptr, "output pointer is required");
        const orct::StoredModel& sm = m->stored;
        const orct::Dataset data = orct::apply_encoding(ds->table, sm.encoding, false);
        const orct::Topology topo = sm.topology();
        const orct::SmoothingCdf cdf(sm.gamma);
        const orct::SplitParameters sp = sm.split_parameters();

        std::ostringstream os;
        os.precision(17);
        if (sm.task == "regression") {
            const std::vector<double> phi = sm.phi;
            os << "prediction\n";
            for (std::size_t i = 0; i < data.n; ++i) {
                os << orct::predict_value(topo, cdf, sp, phi, data.row(i)) << '\n';
            }
        } else {
            const orct::LeafAssignment la = sm.leaf_assignment();
            os << "prediction";
            for (const auto& label : sm.encoding.class_labels) os << ",prob_" << label;
            os << '\n';
            for (std::size_t i = 0; i < data.n; ++i) {
                const auto member = orct::class_membership(topo, cdf, sp, la, data.row(i));
                const int pred = orct::predict_class(member);
                os << sm.encoding.class_labels[pred];
                for (double pk : member) os << ',' << pk;
                os << '\n';
            }
        }
        *out = dup_string(os.str());
    });
}

orct_status orct_evaluate_csv(const orct_model* m, const orct_dataset* ds, const char* positive_label,
                              char** out) {
    return guarded([&] {
        require(m != nullptr, "model is required");
        require(ds != nullptr, "dataset is required");
        require(out != nullptr, "output pointer is required");
        const orct::StoredModel& sm = m->stored;
        const orct::Dataset data = orct::apply_encoding(ds->table, sm.encoding, true);

        std::ostringstream os;
        os.precision(17);
        os << "metric,value\n";
        os << "rows," << data.n << '\n';
        if (sm.task == "regression") {
            os << "mse," << orct::orrt_objective(sm.topology(), orct::SmoothingCdf(sm.gamma),
                                                 sm.split_parameters(), sm.phi, data)
               << '\n';
        } else {
            const std::string positive = text_or_empty(positive_label);
            int pos = -1;
            if (!positive.empty()) {
                for (std::size_t k = 0; k < sm.encoding.class_labels.size(); ++k) {
                    if (sm.encoding.class_labels[k] == positive) pos = static_cast<int>(k);
                }
                require(pos >= 0, "positive class not among the model's labels");
            }
            const auto pred = orct::predict_dataset(sm.topology(), orct::SmoothingCdf(sm.gamma),
                                                    sm.split_parameters(), sm.leaf_assignment(), data);
            const orct::Metrics metrics = orct::compute_metrics(pred, data.y, sm.n_classes, pos);
            os << "accuracy," << metrics.accuracy << '\n';
            if (pos >= 0) {
                os << "tpr,";
                if (!std::isnan(metrics.tpr)) os << metrics.tpr;
                os << "\ntnr,";
                if (!std::isnan(metrics.tnr)) os << metrics.tnr;
                os << '\n';
            }
            for (std::size_t k = 0; k < metrics.recall.size(); ++k) {
                os << "recall_" << sm.encoding.class_labels[k] << ',';
                if (!std::isnan(metrics.recall[k])) os << metrics.recall[k];
                os << '\n';
            }
        }
        *out = dup_string(os.str());
    });
}

orct_status orct_importance_csv(const orct_model* m, char** out) {
    return guarded([&] {
        require(m != nullptr, "model is required");
        require(out != nullptr, "output pointer is required");
        *out = dup_string(orct::importance_to_csv(orct::importance(m->stored)));
    });
}

orct_status orct_heatmap_csv(const orct_model* m, int resolution, int class_index, char** out) {
    return guarded([&] {
        require(m != nullptr, "model is required");
        require(out != nullptr, "output pointer is required");
        *out = dup_string(orct::heatmap_csv(m->stored, resolution, class_index));
    });
}

void orct_protocol_options_init(orct_protocol_options* opts) {
    if (opts == nullptr) return;
    *opts = orct_protocol_options{};
    opts->repetitions = 10;
    opts->train_fraction = 0.75;
    opts->seed = 0;
    opts->positive_label = nullptr;
}

orct_status orct_benchmark_csv(const orct_dataset* ds, const orct_train_options* train_opts,
                               const orct_protocol_options* protocol, char** out) {
    return guarded([&] {
        require(ds != nullptr, "dataset is required");
        require(train_opts != nullptr, "training options are required");
        require(protocol != nullptr, "protocol options are required");
        require(out != nullptr, "output pointer is required");
        require(train_opts->regression_task == 0, "the benchmark protocol is classification only");
        orct::ProtocolConfig cfg;
        cfg.repetitions = protocol->repetitions;
        cfg.train_fraction = protocol->train_fraction;
        cfg.seed = protocol->seed;
        cfg.positive_label = text_or_empty(protocol->positive_label);
        cfg.train = to_train_config(*train_opts, orct::target_classes(ds->table).first);
        const orct::BenchmarkReport report = orct::run_benchmark(ds->table, cfg);
        *out = dup_string(orct::benchmark_to_csv(report, cfg));
    });
}

orct_status orct_rho_sweep_csv(const orct_dataset* ds, const orct_train_options* train_opts,
                               const orct_protocol_options* protocol, const char* rho_grid, char** out) {
    return guarded([&] {
        require(ds != nullptr, "dataset is required");
        require(train_opts != nullptr, "training options are required");
        require(protocol != nullptr, "protocol options are required");
        require(rho_grid != nullptr, "rho grid is required");
        require(out != nullptr, "output pointer is required");
        require(train_opts->regression_task == 0, "the sweep protocol is classification only");
        orct::ProtocolConfig cfg;
        cfg.repetitions = protocol->repetitions;
        cfg.train_fraction = protocol->train_fraction;
        cfg.seed = protocol->seed;
        cfg.positive_label = text_or_empty(protocol->positive_label);
        cfg.train = to_train_config(*train_opts, orct::target_classes(ds->table).first);
        const std::vector<double> grid = parse_double_list(strip(rho_grid), "rho grid value");
        const orct::SweepReport report = orct::run_sweep(ds->table, cfg, grid);
        *out = dup_string(orct::sweep_to_csv(report));
    });
}

orct_status orct_baseline_csv(const orct_dataset* ds, int max_depth, const orct_protocol_options* protocol,
                              char** out) {
    return guarded([&] {
        require(ds != nullptr, "dataset is required");
        require(protocol != nullptr, "protocol options are required");
        require(out != nullptr, "output pointer is required");
        orct::ProtocolConfig cfg;
        cfg.repetitions = protocol->repetitions;
        cfg.train_fraction = protocol->train_fraction;
        cfg.seed = protocol->seed;
        cfg.positive_label = text_or_empty(protocol->positive_label);
        const orct::BaselineReport report = orct::run_baseline(ds->table, max_depth, cfg);
        *out = dup_string(orct::baseline_to_csv(report, max_depth, cfg));
    });
}

}  // extern "C"
