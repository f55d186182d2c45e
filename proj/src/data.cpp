#include "data.hpp"

#include "errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

#include "rng.hpp"

namespace orct {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "?" || cell == "NA" || cell == "NaN" || cell == "nan";
}

bool parse_number(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (begin != end && *begin == '+') ++begin;  // from_chars rejects a leading plus
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

// Splits one CSV record; supports double-quoted fields with "" escapes.
std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

}  // namespace

RawTable ingest_csv(const std::string& path, const std::string& target_column,
                    const std::vector<std::string>& categorical_hints) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw io_error(path + " is empty");
    const auto header = split_record(line);
    if (header.empty()) throw data_error(path + " has an empty header");

    int target_idx = -1;
    if (!target_column.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == target_column) target_idx = static_cast<int>(j);
        }
        if (target_idx < 0) throw data_error("target column '" + target_column + "' not found in " + path);
    }

    std::vector<std::vector<std::string>> rows;
    std::size_t rejected = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_record(line);
        if (fields.size() != header.size()) {
            throw data_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        const bool missing = std::any_of(fields.begin(), fields.end(), [](const std::string& c) { return is_missing(c); });
        if (missing) {
            ++rejected;
            continue;
        }
        rows.push_back(std::move(fields));
    }
    if (rows.empty()) throw data_error(path + " has no usable data rows");

    RawTable table;
    table.n_rows = rows.size();
    table.n_rejected = rejected;
    if (rejected > 0) {
        table.warnings.push_back(std::to_string(rejected) + " rows with missing values dropped from " + path);
    }
    if (target_idx >= 0) {
        table.target_name = target_column;
        table.target.reserve(rows.size());
        for (const auto& r : rows) table.target.push_back(r[target_idx]);
    }

    for (std::size_t j = 0; j < header.size(); ++j) {
        if (static_cast<int>(j) == target_idx) continue;
        RawColumn col;
        col.name = header[j];
        col.cells.reserve(rows.size());
        for (const auto& r : rows) col.cells.push_back(r[j]);
        const bool hinted_categorical =
            std::find(categorical_hints.begin(), categorical_hints.end(), col.name) != categorical_hints.end();
        if (!hinted_categorical) {
            col.values.resize(rows.size());
            col.numeric = true;
            for (std::size_t i = 0; i < col.cells.size(); ++i) {
                if (!parse_number(col.cells[i], col.values[i])) {
                    col.numeric = false;
                    col.values.clear();
                    break;
                }
            }
        }
        table.columns.push_back(std::move(col));
    }
    return table;
}

RawTable subset_rows(const RawTable& table, const std::vector<int>& rows) {
    RawTable out;
    out.target_name = table.target_name;
    out.n_rows = rows.size();
    out.columns.reserve(table.columns.size());
    for (const auto& col : table.columns) {
        RawColumn c;
        c.name = col.name;
        c.numeric = col.numeric;
        c.cells.reserve(rows.size());
        if (col.numeric) c.values.reserve(rows.size());
        for (int r : rows) {
            c.cells.push_back(col.cells[r]);
            if (col.numeric) c.values.push_back(col.values[r]);
        }
        out.columns.push_back(std::move(c));
    }
    if (!table.target.empty()) {
        out.target.reserve(rows.size());
        for (int r : rows) out.target.push_back(table.target[r]);
    }
    return out;
}

std::pair<std::vector<std::string>, std::vector<int>> target_classes(const RawTable& table) {
    if (table.target.empty()) throw data_error("table has no target column");
    std::vector<std::string> labels(table.target.begin(), table.target.end());
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    std::vector<int> idx(table.target.size());
    for (std::size_t i = 0; i < table.target.size(); ++i) {
        idx[i] = static_cast<int>(std::lower_bound(labels.begin(), labels.end(), table.target[i]) - labels.begin());
    }
    return {std::move(labels), std::move(idx)};
}

EncodingSpec build_encoding(const RawTable& train, bool regression) {
    EncodingSpec spec;
    spec.regression = regression;
    for (const auto& col : train.columns) {
        if (col.numeric) {
            spec.features.push_back({col.name, col.name, "", false});
        } else {
            std::set<std::string> levels(col.cells.begin(), col.cells.end());
            for (const auto& lvl : levels) {
                spec.features.push_back({col.name + "=" + lvl, col.name, lvl, true});
            }
        }
    }
    // Scaling parameters come from the raw (pre-scaling) encoded train columns.
    spec.scale_min.assign(spec.features.size(), 0.0);
    spec.scale_max.assign(spec.features.size(), 0.0);
    for (std::size_t f = 0; f < spec.features.size(); ++f) {
        const auto& fe = spec.features[f];
        const RawColumn* col = nullptr;
        for (const auto& c : train.columns) {
            if (c.name == fe.source) col = &c;
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < train.n_rows; ++i) {
            const double v = fe.categorical ? (col->cells[i] == fe.level ? 1.0 : 0.0) : col->values[i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        spec.scale_min[f] = lo;
        spec.scale_max[f] = hi;
    }
    if (!regression && !train.target.empty()) {
        spec.class_labels = target_classes(train).first;
    }
    return spec;
}

Dataset apply_encoding(const RawTable& raw, const EncodingSpec& spec, bool require_target,
                       std::vector<std::string>* warnings) {
    Dataset ds;
    ds.n = raw.n_rows;
    ds.p = spec.features.size();
    ds.regression = spec.regression;
    ds.x.assign(ds.n * ds.p, 0.0);

    std::set<std::string> unseen;
    for (std::size_t f = 0; f < spec.features.size(); ++f) {
        const auto& fe = spec.features[f];
        const RawColumn* col = nullptr;
        for (const auto& c : raw.columns) {
            if (c.name == fe.source) col = &c;
        }
        if (col == nullptr) throw data_error("column '" + fe.source + "' missing from input");
        if (!fe.categorical && !col->numeric) {
            throw data_error("column '" + fe.source + "' must be numeric for this model");
        }
        const double lo = spec.scale_min[f];
        const double hi = spec.scale_max[f];
        for (std::size_t i = 0; i < ds.n; ++i) {
            double v;
            if (fe.categorical) {
                v = col->cells[i] == fe.level ? 1.0 : 0.0;
            } else {
                v = col->values[i];
            }
            double scaled = hi > lo ? (v - lo) / (hi - lo) : 0.0;
            scaled = std::clamp(scaled, 0.0, 1.0);
            ds.x[i * ds.p + f] = scaled;
        }
        if (fe.categorical) {
            // Levels absent from the encoding leave every dummy of the source
            // column at zero; report each such level once.
            for (std::size_t i = 0; i < ds.n; ++i) {
                const std::string& cell = col->cells[i];
                bool known = false;
                for (const auto& other : spec.features) {
                    if (other.source == fe.source && other.level == cell) known = true;
                }
                if (!known) unseen.insert(fe.source + "=" + cell);
            }
        }
    }
    if (warnings != nullptr) {
        for (const auto& u : unseen) warnings->push_back("unseen category " + u + " encoded as all-zero dummies");
    }

    if (require_target) {
        if (raw.target.empty()) throw data_error("input has no target column");
        if (spec.regression) {
            ds.y_real.resize(ds.n);
            for (std::size_t i = 0; i < ds.n; ++i) {
                if (!parse_number(raw.target[i], ds.y_real[i])) {
                    throw data_error("regression target '" + raw.target[i] + "' is not numeric (row " +
                                             std::to_string(i + 1) + ")");
                }
            }
        } else {
            ds.n_classes = static_cast<int>(spec.class_labels.size());
            ds.y.resize(ds.n);
            for (std::size_t i = 0; i < ds.n; ++i) {
                const auto it =
                    std::lower_bound(spec.class_labels.begin(), spec.class_labels.end(), raw.target[i]);
                if (it == spec.class_labels.end() || *it != raw.target[i]) {
                    throw data_error("class label '" + raw.target[i] + "' was not present in training data");
                }
                ds.y[i] = static_cast<int>(it - spec.class_labels.begin());
            }
            ds.rebuild_class_index_sets();
        }
    }
    return ds;
}

EncodedSplit encode_and_scale(const RawTable& train, const RawTable& test, bool regression) {
    EncodedSplit out;
    out.spec = build_encoding(train, regression);
    out.train = apply_encoding(train, out.spec, true, &out.warnings);
    if (test.n_rows > 0) out.test = apply_encoding(test, out.spec, true, &out.warnings);
    return out;
}

std::vector<SplitIndices> repeated_split(const std::vector<int>& labels, int n_classes, double train_fraction,
                                         int repetitions, std::uint64_t seed) {
    if (labels.empty()) throw std::invalid_argument("cannot split an empty dataset");
    if (train_fraction <= 0.0 || train_fraction >= 1.0) {
        throw std::invalid_argument("train fraction must lie strictly between 0 and 1");
    }
    std::vector<std::vector<int>> by_class(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(static_cast<int>(i));
    for (int k = 0; k < n_classes; ++k) {
        if (by_class[k].size() < 2) {
            throw data_error("class " + std::to_string(k) + " has fewer than 2 members; cannot split");
        }
    }

    // Per-class train counts: floors first, then top up to round(f * N) by
    // largest fractional remainder, ties to the lower class index.
    const long long total_train = std::llround(train_fraction * static_cast<double>(labels.size()));
    std::vector<int> take(n_classes);
    long long floors = 0;
    std::vector<std::pair<double, int>> remainders;
    for (int k = 0; k < n_classes; ++k) {
        const double exact = train_fraction * static_cast<double>(by_class[k].size());
        take[k] = static_cast<int>(std::floor(exact));
        floors += take[k];
        remainders.push_back({exact - std::floor(exact), k});
    }
    long long leftover = total_train - floors;
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (const auto& [frac, k] : remainders) {
        if (leftover <= 0) break;
        if (take[k] < static_cast<int>(by_class[k].size()) - 1) {
            ++take[k];
            --leftover;
        }
    }
    for (int k = 0; k < n_classes; ++k) {
        // Keep at least one row on each side so both splits see every class.
        take[k] = std::clamp(take[k], 1, static_cast<int>(by_class[k].size()) - 1);
    }

    Rng rng(seed);
    std::vector<SplitIndices> splits;
    splits.reserve(repetitions);
    for (int rep = 0; rep < repetitions; ++rep) {
        SplitIndices si;
        for (int k = 0; k < n_classes; ++k) {
            std::vector<int> rows = by_class[k];
            for (std::size_t i = rows.size(); i > 1; --i) {  // Fisher-Yates
                const std::size_t j = static_cast<std::size_t>(rng.below(i));
                std::swap(rows[i - 1], rows[j]);
            }
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (i < static_cast<std::size_t>(take[k])) {
                    si.train.push_back(rows[i]);
                } else {
                    si.test.push_back(rows[i]);
                }
            }
        }
        std::sort(si.train.begin(), si.train.end());
        std::sort(si.test.begin(), si.test.end());
        splits.push_back(std::move(si));
    }
    return splits;
}

}  // namespace orct
