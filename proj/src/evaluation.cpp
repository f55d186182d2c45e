#include "evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rng.hpp"

namespace orct {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_rate(std::ostringstream& os, double v) {
    if (std::isnan(v)) return;  // undefined rates stay empty, never 0
    os << v;
}

int positive_index(const EncodingSpec& spec, const std::string& label) {
    if (label.empty()) return -1;
    const auto it = std::lower_bound(spec.class_labels.begin(), spec.class_labels.end(), label);
    if (it == spec.class_labels.end() || *it != label) {
        throw std::invalid_argument("positive class '" + label + "' is not a class label of this data");
    }
    return static_cast<int>(it - spec.class_labels.begin());
}

}  // namespace

std::vector<int> predict_dataset(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                 const LeafAssignment& assignment, const Dataset& data) {
    std::vector<int> pred(data.n);
    for (std::size_t i = 0; i < data.n; ++i) {
        pred[i] = predict_class(topo, cdf, sp, assignment, data.row(i));
    }
    return pred;
}

Metrics compute_metrics(const std::vector<int>& predicted, const std::vector<int>& truth, int n_classes,
                        int positive_class) {
    if (predicted.size() != truth.size()) throw std::invalid_argument("prediction/label size mismatch");
    if (truth.empty()) throw std::invalid_argument("cannot evaluate on empty data");
    Metrics m;
    m.confusion.assign(n_classes, std::vector<int>(n_classes, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        m.confusion[truth[i]][predicted[i]] += 1;
        if (predicted[i] == truth[i]) ++correct;
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    m.recall.assign(n_classes, std::numeric_limits<double>::quiet_NaN());
    for (int k = 0; k < n_classes; ++k) {
        const int total = std::accumulate(m.confusion[k].begin(), m.confusion[k].end(), 0);
        if (total > 0) m.recall[k] = static_cast<double>(m.confusion[k][k]) / total;
    }
    if (positive_class >= 0 && positive_class < n_classes) {
        m.tpr = m.recall[positive_class];
        int neg_total = 0, neg_correct = 0;
        for (int k = 0; k < n_classes; ++k) {
            if (k == positive_class) continue;
            for (int j = 0; j < n_classes; ++j) {
                neg_total += m.confusion[k][j];
                if (j != positive_class) neg_correct += m.confusion[k][j];
            }
        }
        if (neg_total > 0) m.tnr = static_cast<double>(neg_correct) / neg_total;
    }
    return m;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear fit needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear fit needs varying x");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy == 0.0) {
        fit.r2 = 1.0;
    } else {
        double ss_res = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (fit.intercept + fit.slope * x[i]);
            ss_res += r * r;
        }
        fit.r2 = 1.0 - ss_res / syy;
    }
    return fit;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman needs >= 2 points");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double num = 0, dx = 0, dy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx == 0.0 || dy == 0.0) throw std::invalid_argument("spearman undefined for constant input");
    return num / std::sqrt(dx * dy);
}

std::uint64_t repetition_seed(std::uint64_t base_seed, int repetition) {
    // Large odd stride keeps the per-repetition multi-start seed blocks
    // (seed .. seed+n_starts-1) disjoint from each other.
    return base_seed + static_cast<std::uint64_t>(repetition + 1) * 1000003ULL;
}

BenchmarkReport run_benchmark(const RawTable& table, const ProtocolConfig& cfg, double read_seconds) {
    BenchmarkReport report;
    report.timings.read_s = read_seconds;
    const auto [labels, label_idx] = target_classes(table);
    const auto splits =
        repeated_split(label_idx, static_cast<int>(labels.size()), cfg.train_fraction, cfg.repetitions, cfg.seed);

    double sum_train = 0.0, sum_test = 0.0;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        auto t0 = std::chrono::steady_clock::now();
        const RawTable train_raw = subset_rows(table, splits[rep].train);
        const RawTable test_raw = subset_rows(table, splits[rep].test);
        EncodedSplit enc = encode_and_scale(train_raw, test_raw, false);
        report.timings.scaling_s += seconds_since(t0);

        TrainConfig tc = cfg.train;
        tc.seed = repetition_seed(cfg.seed, rep);

        // Random initial-cut generation, timed on its own; train() redoes
        // this internally from the same seeds at negligible cost.
        t0 = std::chrono::steady_clock::now();
        {
            const Topology topo = build_topology(tc.depth);
            for (int s = 0; s < tc.n_starts; ++s) {
                Rng rng(tc.seed + static_cast<std::uint64_t>(s));
                initialize(rng, topo, static_cast<int>(enc.train.p));
            }
        }
        report.timings.init_s += seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        const TrainedModel model = train(enc.train, tc);
        report.timings.optimize_s += seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        const SmoothingCdf cdf(model.gamma);
        const int pos = positive_index(enc.spec, cfg.positive_label);
        RepetitionResult rr;
        rr.repetition = rep;
        rr.objective = model.objective;
        rr.train_metrics = compute_metrics(predict_dataset(model.topo, cdf, model.params, model.assignment, enc.train),
                                           enc.train.y, enc.train.n_classes, pos);
        rr.test_metrics = compute_metrics(predict_dataset(model.topo, cdf, model.params, model.assignment, enc.test),
                                          enc.test.y, enc.test.n_classes, pos);
        report.timings.evaluate_s += seconds_since(t0);

        sum_train += rr.train_metrics.accuracy;
        sum_test += rr.test_metrics.accuracy;
        report.repetitions.push_back(std::move(rr));
        if (cfg.train.collect_trace) report.traces.push_back(model.trace);
    }
    report.mean_train_accuracy = sum_train / cfg.repetitions;
    report.mean_test_accuracy = sum_test / cfg.repetitions;
    return report;
}

std::string benchmark_to_csv(const BenchmarkReport& report, const ProtocolConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "rep,train_accuracy,test_accuracy,tpr_train,tpr_test,tnr_train,tnr_test,objective\n";
    for (const auto& rr : report.repetitions) {
        os << rr.repetition << ',' << rr.train_metrics.accuracy << ',' << rr.test_metrics.accuracy << ',';
        write_rate(os, rr.train_metrics.tpr);
        os << ',';
        write_rate(os, rr.test_metrics.tpr);
        os << ',';
        write_rate(os, rr.train_metrics.tnr);
        os << ',';
        write_rate(os, rr.test_metrics.tnr);
        os << ',' << rr.objective << '\n';
    }
    const auto mean_rate = [&](auto pick) {
        double s = 0.0;
        for (const auto& rr : report.repetitions) {
            const double v = pick(rr);
            if (std::isnan(v)) return std::numeric_limits<double>::quiet_NaN();
            s += v;
        }
        return s / static_cast<double>(report.repetitions.size());
    };
    double mean_objective = 0.0;
    for (const auto& rr : report.repetitions) mean_objective += rr.objective;
    mean_objective /= static_cast<double>(report.repetitions.size());
    os << "mean," << report.mean_train_accuracy << ',' << report.mean_test_accuracy << ',';
    write_rate(os, mean_rate([](const RepetitionResult& rr) { return rr.train_metrics.tpr; }));
    os << ',';
    write_rate(os, mean_rate([](const RepetitionResult& rr) { return rr.test_metrics.tpr; }));
    os << ',';
    write_rate(os, mean_rate([](const RepetitionResult& rr) { return rr.train_metrics.tnr; }));
    os << ',';
    write_rate(os, mean_rate([](const RepetitionResult& rr) { return rr.test_metrics.tnr; }));
    os << ',' << mean_objective << '\n';
    os << "# depth=" << cfg.train.depth << " gamma=" << cfg.train.gamma << " starts=" << cfg.train.n_starts
       << " reps=" << cfg.repetitions << " seed=" << cfg.seed << '\n';
    os << "# phase_seconds read=" << report.timings.read_s << " scaling=" << report.timings.scaling_s
       << " initialization=" << report.timings.init_s << " optimization=" << report.timings.optimize_s
       << " evaluation=" << report.timings.evaluate_s << '\n';
    return os.str();
}

SweepReport run_sweep(const RawTable& table, const ProtocolConfig& cfg, const std::vector<double>& rho_grid) {
    if (rho_grid.empty()) throw std::invalid_argument("rho grid is empty");
    if (cfg.positive_label.empty()) throw std::invalid_argument("sweep needs a designated positive class");
    const auto [labels, label_idx] = target_classes(table);
    if (labels.size() != 2) throw std::invalid_argument("sweep needs a binary target");
    for (double r : rho_grid) {
        if (r < 0.0 || r > 100.0) throw std::invalid_argument("rho grid entries must be percentages in [0,100]");
    }
    const auto splits =
        repeated_split(label_idx, static_cast<int>(labels.size()), cfg.train_fraction, cfg.repetitions, cfg.seed);

    SweepReport report;
    for (double rho_percent : rho_grid) {
        SweepRow row;
        row.rho = rho_percent;
        double s_tpr_tr = 0, s_tpr_te = 0, s_tnr_tr = 0, s_tnr_te = 0, s_ccr_tr = 0, s_ccr_te = 0;
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
            const RawTable train_raw = subset_rows(table, splits[rep].train);
            const RawTable test_raw = subset_rows(table, splits[rep].test);
            EncodedSplit enc = encode_and_scale(train_raw, test_raw, false);
            const int pos = positive_index(enc.spec, cfg.positive_label);

            TrainConfig tc = cfg.train;
            tc.seed = repetition_seed(cfg.seed, rep);
            tc.rho.assign(enc.train.n_classes, 0.0);
            tc.rho[pos] = rho_percent / 100.0;

            const TrainedModel model = train(enc.train, tc);
            const SmoothingCdf cdf(model.gamma);
            const Metrics mtr =
                compute_metrics(predict_dataset(model.topo, cdf, model.params, model.assignment, enc.train),
                                enc.train.y, enc.train.n_classes, pos);
            const Metrics mte =
                compute_metrics(predict_dataset(model.topo, cdf, model.params, model.assignment, enc.test),
                                enc.test.y, enc.test.n_classes, pos);
            s_tpr_tr += mtr.tpr;
            s_tpr_te += mte.tpr;
            s_tnr_tr += mtr.tnr;
            s_tnr_te += mte.tnr;
            s_ccr_tr += mtr.accuracy;
            s_ccr_te += mte.accuracy;
        }
        const double n = static_cast<double>(cfg.repetitions);
        row.tpr_train = 100.0 * s_tpr_tr / n;
        row.tpr_test = 100.0 * s_tpr_te / n;
        row.tnr_train = 100.0 * s_tnr_tr / n;
        row.tnr_test = 100.0 * s_tnr_te / n;
        row.ccr_train = 100.0 * s_ccr_tr / n;
        row.ccr_test = 100.0 * s_ccr_te / n;
        report.rows.push_back(row);
    }

    // The fit mirrors the binding region only: rho = 0 imposes nothing, so
    // its row would not lie on the response line.
    std::vector<double> xs, ys_train, ys_test;
    for (const auto& row : report.rows) {
        if (row.rho <= 0.0) continue;
        xs.push_back(row.rho);
        ys_train.push_back(row.tpr_train);
        ys_test.push_back(row.tpr_test);
    }
    if (xs.size() >= 2) {
        report.fit_tpr_train = linear_fit(xs, ys_train);
        report.fit_tpr_test = linear_fit(xs, ys_test);
    }
    return report;
}

std::string sweep_to_csv(const SweepReport& report) {
    std::ostringstream os;
    os.precision(17);
    os << "rho,tpr_train,tpr_test,tnr_train,tnr_test,ccr_train,ccr_test\n";
    for (const auto& r : report.rows) {
        os << r.rho << ',' << r.tpr_train << ',' << r.tpr_test << ',' << r.tnr_train << ',' << r.tnr_test << ','
           << r.ccr_train << ',' << r.ccr_test << '\n';
    }
    os << "# fit_tpr_train slope=" << report.fit_tpr_train.slope << " intercept=" << report.fit_tpr_train.intercept
       << " r2=" << report.fit_tpr_train.r2 << '\n';
    os << "# fit_tpr_test slope=" << report.fit_tpr_test.slope << " intercept=" << report.fit_tpr_test.intercept
       << " r2=" << report.fit_tpr_test.r2 << '\n';
    return os.str();
}

ImportanceReport importance(const StoredModel& model) {
    const int nb = (1 << model.depth) - 1;
    ImportanceReport report;
    report.per_feature.reserve(model.encoding.features.size());
    for (int j = 0; j < model.p; ++j) {
        ImportanceEntry e;
        e.name = model.encoding.features[j].name;
        for (int t = 0; t < nb; ++t) {
            const double v = std::abs(model.a[static_cast<std::size_t>(j) * nb + t]);
            e.sim += v;
            e.mim = std::max(e.mim, v);
        }
        report.per_feature.push_back(std::move(e));
    }
    // Aggregate dummies back onto their source column (max over dummies);
    // numeric features carry over unchanged.
    for (int j = 0; j < model.p; ++j) {
        const std::string& src = model.encoding.features[j].source;
        auto it = std::find_if(report.per_source.begin(), report.per_source.end(),
                               [&](const ImportanceEntry& e) { return e.name == src; });
        if (it == report.per_source.end()) {
            report.per_source.push_back({src, report.per_feature[j].sim, report.per_feature[j].mim});
        } else {
            it->sim = std::max(it->sim, report.per_feature[j].sim);
            it->mim = std::max(it->mim, report.per_feature[j].mim);
        }
    }
    return report;
}

std::string importance_to_csv(const ImportanceReport& report) {
    std::ostringstream os;
    os.precision(17);
    os << "scope,feature,sim,mim\n";
    for (const auto& e : report.per_feature) os << "encoded," << e.name << ',' << e.sim << ',' << e.mim << '\n';
    for (const auto& e : report.per_source) os << "source," << e.name << ',' << e.sim << ',' << e.mim << '\n';
    return os.str();
}

std::string heatmap_csv(const StoredModel& model, int resolution, int class_index) {
    if (model.p != 2) {
        throw std::invalid_argument("heatmap needs a model with exactly 2 features, got " + std::to_string(model.p));
    }
    if (resolution < 2) throw std::invalid_argument("heatmap resolution must be at least 2");
    if (model.task != "classification") throw std::invalid_argument("heatmap needs a classification model");
    int k = class_index;
    if (k < 0) k = model.n_classes == 2 ? 1 : 0;
    if (k >= model.n_classes) throw std::invalid_argument("heatmap class index out of range");

    const Topology topo = model.topology();
    const SmoothingCdf cdf(model.gamma);
    const SplitParameters sp = model.split_parameters();
    const LeafAssignment la = model.leaf_assignment();

    std::ostringstream os;
    os.precision(17);
    os << "x1,x2,probability\n";
    const double lo0 = model.encoding.scale_min[0], hi0 = model.encoding.scale_max[0];
    const double lo1 = model.encoding.scale_min[1], hi1 = model.encoding.scale_max[1];
    for (int i = 0; i < resolution; ++i) {
        const double s0 = static_cast<double>(i) / (resolution - 1);
        for (int j = 0; j < resolution; ++j) {
            const double s1 = static_cast<double>(j) / (resolution - 1);
            const double x[2] = {s0, s1};
            const auto member = class_membership(topo, cdf, sp, la, x);
            os << (lo0 + (hi0 - lo0) * s0) << ',' << (lo1 + (hi1 - lo1) * s1) << ',' << member[k] << '\n';
        }
    }
    return os.str();
}

namespace {

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

double gini(const std::vector<int>& counts, int total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (int c : counts) {
        const double f = static_cast<double>(c) / total;
        g -= f * f;
    }
    return g;
}

int majority(const std::vector<int>& counts) {
    int best = 0;
    for (std::size_t k = 1; k < counts.size(); ++k) {
        if (counts[k] > counts[best]) best = static_cast<int>(k);
    }
    return best;
}

int grow_node(BaselineTree& tree, const Dataset& data, std::vector<int> rows, int depth, int max_depth,
              int min_node_size) {
    const int K = data.n_classes;
    std::vector<int> counts(K, 0);
    for (int r : rows) counts[data.y[r]] += 1;
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[node_id].label = majority(counts);

    const double parent_gini = gini(counts, static_cast<int>(rows.size()));
    const bool pure = *std::max_element(counts.begin(), counts.end()) == static_cast<int>(rows.size());
    if (pure || depth >= max_depth || static_cast<int>(rows.size()) < min_node_size) return node_id;

    SplitChoice best;
    std::vector<std::pair<double, int>> vals(rows.size());
    for (std::size_t j = 0; j < data.p; ++j) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            vals[i] = {data.row(rows[i])[j], data.y[rows[i]]};
        }
        std::sort(vals.begin(), vals.end());
        std::vector<int> left_counts(K, 0);
        int n_left = 0;
        const int n_total = static_cast<int>(rows.size());
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            left_counts[vals[i].second] += 1;
            ++n_left;
            if (vals[i].first == vals[i + 1].first) continue;  // not a boundary
            const double threshold = 0.5 * (vals[i].first + vals[i + 1].first);
            std::vector<int> right_counts(K);
            for (int k = 0; k < K; ++k) right_counts[k] = counts[k] - left_counts[k];
            const double w_left = static_cast<double>(n_left) / n_total;
            const double child =
                w_left * gini(left_counts, n_left) + (1.0 - w_left) * gini(right_counts, n_total - n_left);
            const double gain = parent_gini - child;
            // Strictly better wins; the scan order (feature ascending,
            // threshold ascending) makes ties resolve to the first seen.
            if (gain > best.gain + 1e-12) {
                best = {static_cast<int>(j), threshold, gain};
            }
        }
    }
    if (best.feature < 0 || best.gain <= 1e-12) return node_id;

    std::vector<int> left_rows, right_rows;
    for (int r : rows) {
        if (data.row(r)[best.feature] <= best.threshold) {
            left_rows.push_back(r);
        } else {
            right_rows.push_back(r);
        }
    }
    if (left_rows.empty() || right_rows.empty()) return node_id;

    tree.nodes[node_id].feature = best.feature;
    tree.nodes[node_id].threshold = best.threshold;
    const int left_id = grow_node(tree, data, std::move(left_rows), depth + 1, max_depth, min_node_size);
    tree.nodes[node_id].left = left_id;
    const int right_id = grow_node(tree, data, std::move(right_rows), depth + 1, max_depth, min_node_size);
    tree.nodes[node_id].right = right_id;
    return node_id;
}

}  // namespace

BaselineTree greedy_baseline(const Dataset& train, int max_depth, int min_node_size) {
    if (train.n == 0) throw std::invalid_argument("empty training set");
    if (train.regression) throw std::invalid_argument("baseline tree handles classification only");
    BaselineTree tree;
    tree.n_classes = train.n_classes;
    std::vector<int> rows(train.n);
    std::iota(rows.begin(), rows.end(), 0);
    grow_node(tree, train, std::move(rows), 0, max_depth, min_node_size);
    return tree;
}

int baseline_predict(const BaselineTree& tree, const double* x) {
    int node = 0;
    while (tree.nodes[node].feature >= 0) {
        node = x[tree.nodes[node].feature] <= tree.nodes[node].threshold ? tree.nodes[node].left
                                                                         : tree.nodes[node].right;
    }
    return tree.nodes[node].label;
}

std::vector<int> baseline_predict_dataset(const BaselineTree& tree, const Dataset& data) {
    std::vector<int> pred(data.n);
    for (std::size_t i = 0; i < data.n; ++i) pred[i] = baseline_predict(tree, data.row(i));
    return pred;
}

BaselineReport run_baseline(const RawTable& table, int max_depth, const ProtocolConfig& cfg) {
    BaselineReport report;
    const auto [labels, label_idx] = target_classes(table);
    const auto splits =
        repeated_split(label_idx, static_cast<int>(labels.size()), cfg.train_fraction, cfg.repetitions, cfg.seed);

    double sum_train = 0.0, sum_test = 0.0;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        const RawTable train_raw = subset_rows(table, splits[rep].train);
        const RawTable test_raw = subset_rows(table, splits[rep].test);
        EncodedSplit enc = encode_and_scale(train_raw, test_raw, false);

        const BaselineTree tree = greedy_baseline(enc.train, max_depth);
        const int pos = positive_index(enc.spec, cfg.positive_label);
        RepetitionResult rr;
        rr.repetition = rep;
        rr.train_metrics =
            compute_metrics(baseline_predict_dataset(tree, enc.train), enc.train.y, enc.train.n_classes, pos);
        rr.test_metrics =
            compute_metrics(baseline_predict_dataset(tree, enc.test), enc.test.y, enc.test.n_classes, pos);
        sum_train += rr.train_metrics.accuracy;
        sum_test += rr.test_metrics.accuracy;
        report.repetitions.push_back(std::move(rr));
    }
    report.mean_train_accuracy = sum_train / cfg.repetitions;
    report.mean_test_accuracy = sum_test / cfg.repetitions;
    return report;
}

std::string baseline_to_csv(const BaselineReport& report, int max_depth, const ProtocolConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "rep,train_accuracy,test_accuracy,tpr_train,tpr_test,tnr_train,tnr_test\n";
    for (const auto& rr : report.repetitions) {
        os << rr.repetition << ',' << rr.train_metrics.accuracy << ',' << rr.test_metrics.accuracy << ',';
        write_rate(os, rr.train_metrics.tpr);
        os << ',';
        write_rate(os, rr.test_metrics.tpr);
        os << ',';
        write_rate(os, rr.train_metrics.tnr);
        os << ',';
        write_rate(os, rr.test_metrics.tnr);
        os << '\n';
    }
    os << "mean," << report.mean_train_accuracy << ',' << report.mean_test_accuracy << ",,,,\n";
    os << "# baseline max_depth=" << max_depth << " reps=" << cfg.repetitions << " seed=" << cfg.seed << '\n';
    return os.str();
}

}  // namespace orct
