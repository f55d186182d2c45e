#include "model.hpp"

#include <cmath>
#include <limits>

namespace orct {

double split_argument(const SplitParameters& sp, const double* x, int node) {
    double acc = 0.0;
    for (int j = 0; j < sp.p; ++j) acc += sp.coeff(j, node) * x[j];
    return acc / sp.p - sp.intercept(node);
}

double branch_probability(const SmoothingCdf& cdf, const SplitParameters& sp, const double* x, int node) {
    return cdf.value(split_argument(sp, x, node));
}

std::vector<double> node_probabilities(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                       const double* x) {
    std::vector<double> prob(static_cast<std::size_t>(topo.total_nodes) + 1, 0.0);
    prob[1] = 1.0;
    for (int t = 1; t <= topo.n_branch; ++t) {
        const double pt = branch_probability(cdf, sp, x, t);
        prob[2 * t] = prob[t] * pt;
        prob[2 * t + 1] = prob[t] * (1.0 - pt);
    }
    return prob;
}

std::vector<double> leaf_probabilities(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                       const double* x) {
    const auto prob = node_probabilities(topo, cdf, sp, x);
    std::vector<double> leaves(topo.n_leaves);
    for (int leaf = topo.first_leaf(); leaf <= topo.total_nodes; ++leaf) {
        leaves[topo.leaf_offset(leaf)] = prob[leaf];
    }
    return leaves;
}

std::vector<double> class_membership(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                     const LeafAssignment& assignment, const double* x) {
    const auto leaves = leaf_probabilities(topo, cdf, sp, x);
    std::vector<double> member(assignment.n_classes, 0.0);
    for (int k = 0; k < assignment.n_classes; ++k) {
        CompensatedSum s;
        for (int t = 0; t < assignment.n_leaves; ++t) s.add(leaves[t] * assignment.at(k, t));
        member[k] = s.value();
    }
    return member;
}

int predict_class(const std::vector<double>& membership) {
    int best = 0;
    for (std::size_t k = 1; k < membership.size(); ++k) {
        if (membership[k] > membership[best]) best = static_cast<int>(k);
    }
    return best;
}

int predict_class(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                  const LeafAssignment& assignment, const double* x) {
    return predict_class(class_membership(topo, cdf, sp, assignment, x));
}

int hard_route(const Topology& topo, const SplitParameters& sp, const double* x) {
    int node = 1;
    while (topo.is_branch(node)) {
        node = split_argument(sp, x, node) >= 0.0 ? 2 * node : 2 * node + 1;
    }
    return topo.leaf_offset(node);
}

double min_abs_split_argument(const Topology& topo, const SplitParameters& sp, const double* x) {
    double m = std::numeric_limits<double>::infinity();
    for (int t = 1; t <= topo.n_branch; ++t) {
        const double u = std::abs(split_argument(sp, x, t));
        if (u < m) m = u;
    }
    return m;
}

double expected_cost(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                     const LeafAssignment& assignment, const CostMatrix& costs, const Dataset& data) {
    // Leaf-level label cost for class y: cost_leaf[y][t] = sum_k W[y][k] C[k][t].
    const int L = assignment.n_leaves;
    std::vector<double> cost_leaf(static_cast<std::size_t>(costs.n_classes) * L, 0.0);
    for (int y = 0; y < costs.n_classes; ++y) {
        for (int t = 0; t < L; ++t) {
            CompensatedSum s;
            for (int k = 0; k < costs.n_classes; ++k) s.add(costs.at(y, k) * assignment.at(k, t));
            cost_leaf[static_cast<std::size_t>(y) * L + t] = s.value();
        }
    }
    CompensatedSum total;
    for (std::size_t i = 0; i < data.n; ++i) {
        const auto leaves = leaf_probabilities(topo, cdf, sp, data.row(i));
        const double* cl = cost_leaf.data() + static_cast<std::size_t>(data.y[i]) * L;
        CompensatedSum si;
        for (int t = 0; t < L; ++t) si.add(leaves[t] * cl[t]);
        total.add(si.value());
    }
    return total.value() / static_cast<double>(data.n);
}

std::vector<double> class_correct_mass(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                       const LeafAssignment& assignment, const Dataset& data) {
    std::vector<CompensatedSum> acc(data.n_classes);
    for (std::size_t i = 0; i < data.n; ++i) {
        const auto leaves = leaf_probabilities(topo, cdf, sp, data.row(i));
        const int k = data.y[i];
        CompensatedSum si;
        for (int t = 0; t < assignment.n_leaves; ++t) si.add(leaves[t] * assignment.at(k, t));
        acc[k].add(si.value());
    }
    std::vector<double> mass(data.n_classes);
    for (int k = 0; k < data.n_classes; ++k) mass[k] = acc[k].value();
    return mass;
}

}  // namespace orct
