#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "types.hpp"

namespace orct {

// CSV ingestion: comma separator, first row is the header, '.' decimal
// point. Rows containing missing values ("", "?", "NA", "NaN", "nan") are
// dropped and counted. A column is numeric when every surviving cell parses
// as a finite number and it is not listed in categorical_hints.

struct RawColumn {
    std::string name;
    bool numeric = false;
    std::vector<double> values;       // parallel to cells, valid when numeric
    std::vector<std::string> cells;   // raw text
};

struct RawTable {
    std::vector<RawColumn> columns;   // features only, target removed
    std::string target_name;          // empty when no target was requested
    std::vector<std::string> target;  // raw target cells
    std::size_t n_rows = 0;
    std::size_t n_rejected = 0;       // rows dropped for missing values
    std::vector<std::string> warnings;
};

// Reads a CSV file. `target_column` may be empty (prediction input without
// labels). Throws io_error on unreadable files and data_error on missing
// target columns, ragged rows, or unparseable labels.
RawTable ingest_csv(const std::string& path, const std::string& target_column,
                    const std::vector<std::string>& categorical_hints = {});

RawTable subset_rows(const RawTable& table, const std::vector<int>& rows);

// One encoded feature column: either a numeric source column passed through
// or a 0/1 dummy for one level of a categorical source column.
struct FeatureEncoding {
    std::string name;         // source name, or "source=level" for dummies
    std::string source;       // raw column name
    std::string level;        // dummy level, empty for numeric
    bool categorical = false;
};

struct EncodingSpec {
    std::vector<FeatureEncoding> features;
    std::vector<double> scale_min;  // per encoded feature, from the train split
    std::vector<double> scale_max;
    std::vector<std::string> class_labels;  // sorted target values (classification)
    bool regression = false;
};

// Learns the encoding from a training table: dummy levels in sorted order,
// min/max scaling parameters, sorted class labels.
EncodingSpec build_encoding(const RawTable& train, bool regression);

// Applies an encoding: one-hot categoricals (unseen levels become all-zero
// dummies, with a warning), then (x - min) / (max - min) clamped into [0,1];
// constant training columns map to 0. With require_target the table's target
// is converted to class indices (or reals); unknown class labels throw.
Dataset apply_encoding(const RawTable& raw, const EncodingSpec& spec, bool require_target,
                       std::vector<std::string>* warnings = nullptr);

// Convenience wrapper: learn the encoding on train, apply to both tables.
struct EncodedSplit {
    Dataset train;
    Dataset test;
    EncodingSpec spec;
    std::vector<std::string> warnings;
};
EncodedSplit encode_and_scale(const RawTable& train, const RawTable& test, bool regression);

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> test;
};

// Repeated stratified splits: per class, floor(fraction * n_k) rows go to
// train, and the total is topped up to round(fraction * N) by the classes
// with the largest fractional remainders (ties to the lower class index).
// One generator seeded with `seed` drives all repetitions in order. Throws
// if any class has fewer than 2 members.
std::vector<SplitIndices> repeated_split(const std::vector<int>& labels, int n_classes, double train_fraction,
                                         int repetitions, std::uint64_t seed);

// Sorted unique target values and the per-row index into them.
std::pair<std::vector<std::string>, std::vector<int>> target_classes(const RawTable& table);

}  // namespace orct
