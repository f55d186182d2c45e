#pragma once

#include <cstdint>
#include <vector>

namespace orct {

// Maximal binary tree of depth D with heap numbering: root is node 1,
// children of node t are 2t and 2t+1. Branch nodes are 1..2^D-1, leaves
// are 2^D..2^(D+1)-1. Node id 0 is unused.
struct Topology {
    int depth = 0;
    int total_nodes = 0;  // 2^(D+1) - 1
    int n_branch = 0;     // 2^D - 1
    int n_leaves = 0;     // 2^D

    // Ancestors of each leaf reached through their left / right branch,
    // indexed by leaf offset (leaf id - first_leaf()), each sorted ascending.
    std::vector<std::vector<int>> left_ancestors;
    std::vector<std::vector<int>> right_ancestors;

    int first_leaf() const { return n_branch + 1; }
    bool is_branch(int node) const { return node >= 1 && node <= n_branch; }
    bool is_leaf(int node) const { return node >= first_leaf() && node <= total_nodes; }
    int leaf_offset(int leaf) const { return leaf - first_leaf(); }
};

inline constexpr int kMaxDepth = 10;

// Builds the maximal tree for `depth` in [1, kMaxDepth]. Throws
// std::invalid_argument outside that range.
Topology build_topology(int depth);

// Returns (N_L(leaf), N_R(leaf)). Throws std::invalid_argument if `leaf`
// is not a leaf node id of `topo`.
std::pair<std::vector<int>, std::vector<int>> path_sets(const Topology& topo, int leaf);

}  // namespace orct
