#include "topology.hpp"

#include <algorithm>
#include <stdexcept>

namespace orct {

Topology build_topology(int depth) {
    if (depth < 1 || depth > kMaxDepth) {
        throw std::invalid_argument("tree depth must be in [1, " + std::to_string(kMaxDepth) + "]");
    }
    Topology topo;
    topo.depth = depth;
    topo.total_nodes = (1 << (depth + 1)) - 1;
    topo.n_branch = (1 << depth) - 1;
    topo.n_leaves = 1 << depth;

    topo.left_ancestors.resize(topo.n_leaves);
    topo.right_ancestors.resize(topo.n_leaves);
    for (int leaf = topo.first_leaf(); leaf <= topo.total_nodes; ++leaf) {
        auto& left = topo.left_ancestors[topo.leaf_offset(leaf)];
        auto& right = topo.right_ancestors[topo.leaf_offset(leaf)];
        for (int node = leaf; node > 1; node /= 2) {
            const int parent = node / 2;
            if (node == 2 * parent) {
                left.push_back(parent);
            } else {
                right.push_back(parent);
            }
        }
        std::sort(left.begin(), left.end());
        std::sort(right.begin(), right.end());
    }
    return topo;
}

std::pair<std::vector<int>, std::vector<int>> path_sets(const Topology& topo, int leaf) {
    if (!topo.is_leaf(leaf)) {
        throw std::invalid_argument("node " + std::to_string(leaf) + " is not a leaf");
    }
    const int off = topo.leaf_offset(leaf);
    return {topo.left_ancestors[off], topo.right_ancestors[off]};
}

}  // namespace orct
