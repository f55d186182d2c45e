#include "gradients.hpp"

#include <numeric>

namespace orct {

std::vector<double> cost_leaf_weights(const LeafAssignment& assignment, const CostMatrix& costs) {
    const int K = costs.n_classes;
    const int L = assignment.n_leaves;
    std::vector<double> w(static_cast<std::size_t>(K) * L, 0.0);
    for (int y = 0; y < K; ++y) {
        for (int t = 0; t < L; ++t) {
            CompensatedSum s;
            for (int k = 0; k < K; ++k) s.add(costs.at(y, k) * assignment.at(k, t));
            w[static_cast<std::size_t>(y) * L + t] = s.value();
        }
    }
    return w;
}

double accumulate_weighted_gradient(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                    const std::vector<int>& rows, const Dataset& data,
                                    const std::vector<double>& leaf_w_by_class, int n_leaves, double scale,
                                    Gradient& grad) {
    const int nb = topo.n_branch;
    const int total = topo.total_nodes;
    std::vector<double> u(nb + 1), pt(nb + 1), reach(total + 1), cond(total + 1);
    CompensatedSum value;

    for (int row : rows) {
        const double* x = data.row(row);
        const double* w = leaf_w_by_class.data() + static_cast<std::size_t>(data.y[row]) * n_leaves;

        for (int t = 1; t <= nb; ++t) {
            u[t] = split_argument(sp, x, t);
            pt[t] = cdf.value(u[t]);
        }
        reach[1] = 1.0;
        for (int t = 1; t <= nb; ++t) {
            reach[2 * t] = reach[t] * pt[t];
            reach[2 * t + 1] = reach[t] * (1.0 - pt[t]);
        }
        // cond[t] = expected leaf weight conditional on reaching node t.
        for (int leaf = topo.first_leaf(); leaf <= total; ++leaf) cond[leaf] = w[topo.leaf_offset(leaf)];
        for (int t = nb; t >= 1; --t) cond[t] = pt[t] * cond[2 * t] + (1.0 - pt[t]) * cond[2 * t + 1];
        value.add(cond[1]);

        for (int t = 1; t <= nb; ++t) {
            const double du = scale * reach[t] * (cond[2 * t] - cond[2 * t + 1]) * cdf.gamma() * pt[t] * (1.0 - pt[t]);
            if (du == 0.0) continue;
            for (int j = 0; j < sp.p; ++j) {
                grad.d_a[static_cast<std::size_t>(j) * nb + (t - 1)] += du * x[j] / sp.p;
            }
            grad.d_mu[t - 1] -= du;
        }
    }
    return scale * value.value();
}

double cost_objective_gradient(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                               const LeafAssignment& assignment, const CostMatrix& costs, const Dataset& data,
                               Gradient& grad) {
    grad = make_zero_gradient(sp);
    const auto leaf_w = cost_leaf_weights(assignment, costs);
    std::vector<int> rows(data.n);
    std::iota(rows.begin(), rows.end(), 0);
    return accumulate_weighted_gradient(topo, cdf, sp, rows, data, leaf_w, assignment.n_leaves,
                                        1.0 / static_cast<double>(data.n), grad);
}

double class_mass_gradient(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                           const LeafAssignment& assignment, const Dataset& data, int klass, double scale,
                           Gradient& grad) {
    return accumulate_weighted_gradient(topo, cdf, sp, data.class_index_sets[klass], data, assignment.c,
                                        assignment.n_leaves, scale, grad);
}

std::vector<double> objective_c_gradient(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                         const CostMatrix& costs, const Dataset& data) {
    return assignment_costs(topo, cdf, sp, costs, data);
}

std::vector<double> performance_c_gradient(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                           const Dataset& data, int klass) {
    const int L = topo.n_leaves;
    std::vector<double> dc(static_cast<std::size_t>(data.n_classes) * L, 0.0);
    std::vector<CompensatedSum> mass(L);
    for (int i : data.class_index_sets[klass]) {
        const auto leaves = leaf_probabilities(topo, cdf, sp, data.row(i));
        for (int t = 0; t < L; ++t) mass[t].add(leaves[t]);
    }
    for (int t = 0; t < L; ++t) dc[static_cast<std::size_t>(klass) * L + t] = mass[t].value();
    return dc;
}

}  // namespace orct
