#pragma once

#include <string>
#include <vector>

#include "data.hpp"
#include "regression.hpp"
#include "topology.hpp"
#include "trainer.hpp"
#include "types.hpp"

namespace orct {

// Self-contained description of a trained model: parameters plus the
// preprocessing needed to score raw CSV rows. Serialized as a single JSON
// document with sorted keys and shortest round-trip number formatting, so
// identical models produce byte-identical files.
struct StoredModel {
    std::string task;  // "classification" or "regression"
    int depth = 0;
    double gamma = 0.0;
    int p = 0;
    int n_classes = 0;            // classification only
    std::vector<double> a;        // row-major p x n_branch
    std::vector<double> mu;       // n_branch
    std::vector<double> c;        // row-major K x n_leaves (classification)
    std::vector<double> phi;      // n_leaves (regression)
    EncodingSpec encoding;        // feature layout, scaling, class labels

    Topology topology() const { return build_topology(depth); }

    SplitParameters split_parameters() const {
        SplitParameters sp;
        sp.p = p;
        sp.n_branch = (1 << depth) - 1;
        sp.a = a;
        sp.mu = mu;
        return sp;
    }

    LeafAssignment leaf_assignment() const {
        LeafAssignment la;
        la.n_classes = n_classes;
        la.n_leaves = 1 << depth;
        la.c = c;
        return la;
    }
};

StoredModel make_stored_model(const TrainedModel& model, const EncodingSpec& spec);
StoredModel make_stored_model(const RegressionModel& model, const EncodingSpec& spec);

std::string model_to_json(const StoredModel& model);
StoredModel model_from_json(const std::string& text);

void save_model(const std::string& path, const StoredModel& model);
StoredModel load_model(const std::string& path);

}  // namespace orct
