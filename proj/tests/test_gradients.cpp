#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gradients.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "topology.hpp"
#include "types.hpp"

using namespace orct;

namespace {

Dataset random_dataset(Rng& rng, int n, int p, int n_classes) {
    Dataset data;
    data.n = n;
    data.p = p;
    data.n_classes = n_classes;
    data.x.resize(static_cast<std::size_t>(n) * p);
    for (auto& v : data.x) v = rng.uniform01();
    data.y.resize(n);
    for (int k = 0; k < n_classes; ++k) data.y[k] = k;  // every class present
    for (int i = n_classes; i < n; ++i) data.y[i] = static_cast<int>(rng.below(n_classes));
    data.rebuild_class_index_sets();
    return data;
}

SplitParameters random_params(Rng& rng, int p, int n_branch) {
    SplitParameters sp;
    sp.p = p;
    sp.n_branch = n_branch;
    sp.a.resize(static_cast<std::size_t>(p) * n_branch);
    sp.mu.resize(n_branch);
    for (auto& v : sp.a) v = rng.uniform(-1.0, 1.0);
    for (auto& v : sp.mu) v = rng.uniform(-1.0, 1.0);
    return sp;
}

LeafAssignment cyclic_assignment(int n_classes, int n_leaves) {
    LeafAssignment la = LeafAssignment::zeros(n_classes, n_leaves);
    for (int t = 0; t < n_leaves; ++t) la.at(t % n_classes, t) = 1.0;
    return la;
}

// `slot` must point into `sp`; the perturbation has to hit the object being evaluated.
double central_difference(const Topology& topo, const SmoothingCdf& cdf, SplitParameters& sp,
                          const LeafAssignment& la, const CostMatrix& costs, const Dataset& data, double* slot,
                          double h) {
    const double orig = *slot;
    *slot = orig + h;
    const double up = expected_cost(topo, cdf, sp, la, costs, data);
    *slot = orig - h;
    const double down = expected_cost(topo, cdf, sp, la, costs, data);
    *slot = orig;
    return (up - down) / (2.0 * h);
}

}  // namespace

TEST_CASE("analytic cost gradient matches central differences") {
    Rng rng(2024);
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const int depth = 1 + static_cast<int>(rng.below(3));
        const int p = 1 + static_cast<int>(rng.below(5));
        const int n = 5 + static_cast<int>(rng.below(20));
        const int k = 2 + static_cast<int>(rng.below(2));
        const Topology topo = build_topology(depth);
        const double gammas[3] = {1.0, 8.0, 64.0};
        const SmoothingCdf cdf(gammas[trial % 3]);
        const Dataset data = random_dataset(rng, n, p, k);
        SplitParameters sp = random_params(rng, p, topo.n_branch);
        const LeafAssignment la = cyclic_assignment(k, topo.n_leaves);
        const CostMatrix costs = CostMatrix::uniform(k, 0.5);

        Gradient grad = make_zero_gradient(sp);
        const double value = cost_objective_gradient(topo, cdf, sp, la, costs, data, grad);
        CHECK(value == doctest::Approx(expected_cost(topo, cdf, sp, la, costs, data)).epsilon(1e-12));

        const double h = 1e-5;
        for (std::size_t idx = 0; idx < sp.a.size(); ++idx) {
            const double fd = central_difference(topo, cdf, sp, la, costs, data, &sp.a[idx], h);
            const double tol = 1e-5 * std::max({std::abs(fd), std::abs(grad.d_a[idx]), 1e-3});
            CHECK(std::abs(grad.d_a[idx] - fd) <= tol);
            ++checked;
        }
        for (std::size_t idx = 0; idx < sp.mu.size(); ++idx) {
            const double fd = central_difference(topo, cdf, sp, la, costs, data, &sp.mu[idx], h);
            const double tol = 1e-5 * std::max({std::abs(fd), std::abs(grad.d_mu[idx]), 1e-3});
            CHECK(std::abs(grad.d_mu[idx] - fd) <= tol);
            ++checked;
        }
    }
    CHECK(checked > 300);
}

TEST_CASE("class-mass gradient matches central differences") {
    Rng rng(515);
    for (int trial = 0; trial < 10; ++trial) {
        const Topology topo = build_topology(2);
        const SmoothingCdf cdf(4.0);
        const Dataset data = random_dataset(rng, 18, 3, 2);
        SplitParameters sp = random_params(rng, 3, topo.n_branch);
        const LeafAssignment la = cyclic_assignment(2, topo.n_leaves);

        for (int klass = 0; klass < 2; ++klass) {
            Gradient grad = make_zero_gradient(sp);
            const double mass = class_mass_gradient(topo, cdf, sp, la, data, klass, 1.0, grad);
            CHECK(mass ==
                  doctest::Approx(class_correct_mass(topo, cdf, sp, la, data)[klass]).epsilon(1e-10));

            const double h = 1e-6;
            for (std::size_t idx = 0; idx < sp.a.size(); ++idx) {
                const double orig = sp.a[idx];
                sp.a[idx] = orig + h;
                const double up = class_correct_mass(topo, cdf, sp, la, data)[klass];
                sp.a[idx] = orig - h;
                const double down = class_correct_mass(topo, cdf, sp, la, data)[klass];
                sp.a[idx] = orig;
                const double fd = (up - down) / (2.0 * h);
                CHECK(std::abs(grad.d_a[idx] - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
            }
        }
    }
}

TEST_CASE("gradient scale factor is linear") {
    Rng rng(77);
    const Topology topo = build_topology(2);
    const SmoothingCdf cdf(8.0);
    const Dataset data = random_dataset(rng, 12, 2, 2);
    SplitParameters sp = random_params(rng, 2, topo.n_branch);
    const LeafAssignment la = cyclic_assignment(2, topo.n_leaves);

    Gradient g1 = make_zero_gradient(sp);
    Gradient g3 = make_zero_gradient(sp);
    const double m1 = class_mass_gradient(topo, cdf, sp, la, data, 0, 1.0, g1);
    const double m3 = class_mass_gradient(topo, cdf, sp, la, data, 0, -3.0, g3);
    CHECK(m3 == doctest::Approx(-3.0 * m1).epsilon(1e-12));
    for (std::size_t i = 0; i < g1.d_a.size(); ++i) {
        CHECK(g3.d_a[i] == doctest::Approx(-3.0 * g1.d_a[i]).epsilon(1e-10));
    }
}

TEST_CASE("symmetric plateau has zero mu-gradient at the root") {
    // two mirrored points of opposite classes: moving the centered root cut
    // helps one exactly as much as it hurts the other.
    const Topology topo = build_topology(1);
    const SmoothingCdf cdf(4.0);
    Dataset data;
    data.n = 2;
    data.p = 1;
    data.x = {0.25, 0.75};
    data.y = {0, 1};
    data.n_classes = 2;
    data.rebuild_class_index_sets();
    SplitParameters sp = SplitParameters::zeros(1, 1);
    sp.mu[0] = -0.5;  // cut centered between the points in argument space
    LeafAssignment la = LeafAssignment::zeros(2, 2);
    la.c = {1.0, 0.0, 0.0, 1.0};
    const CostMatrix costs = CostMatrix::uniform(2, 0.5);
    Gradient grad = make_zero_gradient(sp);
    cost_objective_gradient(topo, cdf, sp, la, costs, data, grad);
    CHECK(std::abs(grad.d_mu[0]) <= 1e-14);
}

TEST_CASE("objective C-gradient is the transportation cost matrix") {
    Rng rng(31);
    const Topology topo = build_topology(2);
    const SmoothingCdf cdf(8.0);
    const Dataset data = random_dataset(rng, 15, 2, 3);
    const SplitParameters sp = random_params(rng, 2, topo.n_branch);
    const CostMatrix costs = CostMatrix::uniform(3, 0.5);

    const auto q = objective_c_gradient(topo, cdf, sp, costs, data);
    REQUIRE(q.size() == static_cast<std::size_t>(3) * topo.n_leaves);

    // finite differences on C entries: the objective is linear in C, so
    // one-sided differences are exact up to roundoff
    LeafAssignment la = cyclic_assignment(3, topo.n_leaves);
    const double base = expected_cost(topo, cdf, sp, la, costs, data);
    const double h = 0.5;
    for (int k = 0; k < 3; ++k) {
        for (int t = 0; t < topo.n_leaves; ++t) {
            la.at(k, t) += h;
            const double up = expected_cost(topo, cdf, sp, la, costs, data);
            la.at(k, t) -= h;
            const double fd = (up - base) / h;
            CHECK(q[static_cast<std::size_t>(k) * topo.n_leaves + t] == doctest::Approx(fd).epsilon(1e-9));
        }
    }
}

TEST_CASE("performance C-gradient is the class's per-leaf mass row") {
    Rng rng(13);
    const Topology topo = build_topology(1);
    const SmoothingCdf cdf(2.0);
    const Dataset data = random_dataset(rng, 9, 2, 2);
    const SplitParameters sp = random_params(rng, 2, topo.n_branch);

    for (int klass = 0; klass < 2; ++klass) {
        const auto g = performance_c_gradient(topo, cdf, sp, data, klass);
        REQUIRE(g.size() == static_cast<std::size_t>(2) * topo.n_leaves);
        // row of the other class must be all zero
        for (int t = 0; t < topo.n_leaves; ++t) {
            CHECK(g[static_cast<std::size_t>(1 - klass) * topo.n_leaves + t] == 0.0);
        }
        // row of klass: sum over its points of leaf probabilities
        for (int t = 0; t < topo.n_leaves; ++t) {
            double expect = 0.0;
            for (int i : data.class_index_sets[klass]) {
                expect += leaf_probabilities(topo, cdf, sp, data.row(i))[t];
            }
            CHECK(g[static_cast<std::size_t>(klass) * topo.n_leaves + t] ==
                  doctest::Approx(expect).epsilon(1e-10));
        }
    }
}
