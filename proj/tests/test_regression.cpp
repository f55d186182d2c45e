#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "model.hpp"
#include "regression.hpp"
#include "rng.hpp"
#include "topology.hpp"
#include "trainer.hpp"
#include "types.hpp"

using namespace orct;

namespace {

Dataset regression_data(std::size_t n, std::size_t p, std::uint64_t seed) {
    Rng rng(seed);
    Dataset data;
    data.n = n;
    data.p = p;
    data.regression = true;
    data.x.resize(n * p);
    data.y_real.resize(n);
    for (auto& v : data.x) v = rng.uniform01();
    for (std::size_t i = 0; i < n; ++i) data.y_real[i] = 3.0 * data.x[i * p] + rng.uniform(-0.1, 0.1);
    return data;
}

double variance(const std::vector<double>& y) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    return var / static_cast<double>(y.size());
}

// Independent dense solve of (M^T M + ridge I) phi = M^T y by Gauss-Jordan
// elimination with partial pivoting, for checking the production solver.
std::vector<double> dense_reference_phi(const Topology& topo, const SmoothingCdf& cdf, const SplitParameters& sp,
                                        const Dataset& data, double ridge) {
    const int L = topo.n_leaves;
    std::vector<double> gram(static_cast<std::size_t>(L) * L, 0.0);
    std::vector<double> rhs(L, 0.0);
    for (std::size_t i = 0; i < data.n; ++i) {
        const auto probs = leaf_probabilities(topo, cdf, sp, data.row(i));
        for (int s = 0; s < L; ++s) {
            rhs[s] += probs[s] * data.y_real[i];
            for (int t = 0; t < L; ++t) gram[static_cast<std::size_t>(s) * L + t] += probs[s] * probs[t];
        }
    }
    for (int s = 0; s < L; ++s) gram[static_cast<std::size_t>(s) * L + s] += ridge;

    // augmented [gram | rhs], eliminate in place
    for (int col = 0; col < L; ++col) {
        int pivot = col;
        for (int r = col + 1; r < L; ++r)
            if (std::abs(gram[static_cast<std::size_t>(r) * L + col]) >
                std::abs(gram[static_cast<std::size_t>(pivot) * L + col]))
                pivot = r;
        if (pivot != col) {
            for (int c = 0; c < L; ++c)
                std::swap(gram[static_cast<std::size_t>(col) * L + c], gram[static_cast<std::size_t>(pivot) * L + c]);
            std::swap(rhs[col], rhs[pivot]);
        }
        const double d = gram[static_cast<std::size_t>(col) * L + col];
        for (int r = 0; r < L; ++r) {
            if (r == col) continue;
            const double f = gram[static_cast<std::size_t>(r) * L + col] / d;
            if (f == 0.0) continue;
            for (int c = col; c < L; ++c)
                gram[static_cast<std::size_t>(r) * L + c] -= f * gram[static_cast<std::size_t>(col) * L + c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> phi(L);
    for (int s = 0; s < L; ++s) phi[s] = rhs[s] / gram[static_cast<std::size_t>(s) * L + s];
    return phi;
}

}  // namespace

TEST_CASE("prediction is the probability-weighted leaf value") {
    const Topology topo = build_topology(1);
    const SmoothingCdf cdf(1.0);
    SplitParameters sp = SplitParameters::zeros(1, 1);
    const std::vector<double> phi = {0.0, 2.0};
    const double x = 0.0;  // argument 0 -> both leaves at probability 0.5
    CHECK(predict_value(topo, cdf, sp, phi, &x) == doctest::Approx(1.0).epsilon(1e-12));

    Dataset data;
    data.n = 1;
    data.p = 1;
    data.regression = true;
    data.x = {0.0};
    data.y_real = {0.0};
    CHECK(orrt_objective(topo, cdf, sp, phi, data) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("leaf value solve matches a dense reference") {
    const Topology topo = build_topology(2);
    const SmoothingCdf cdf(8.0);
    Rng rng(5);
    const Dataset data = regression_data(60, 2, 17);
    SplitParameters sp = initialize(rng, topo, 2);

    const auto phi = solve_leaf_values(topo, cdf, sp, data);
    const auto ref = dense_reference_phi(topo, cdf, sp, data, 1e-10);
    REQUIRE(phi.size() == ref.size());
    for (std::size_t t = 0; t < phi.size(); ++t) CHECK(phi[t] == doctest::Approx(ref[t]).epsilon(1e-8));
}

TEST_CASE("saturated cuts recover per-side means") {
    // one feature, cut at 0.5 with gamma 512: routing is effectively hard,
    // so the solved leaf values are the side means
    const Topology topo = build_topology(1);
    const SmoothingCdf cdf(512.0);
    SplitParameters sp = SplitParameters::zeros(1, 1);
    sp.a = {1.0};
    sp.mu = {0.75};  // argument x - 0.75 >= 0 routes left

    Dataset data;
    data.n = 4;
    data.p = 1;
    data.regression = true;
    data.x = {0.0, 0.5, 1.0, 0.9};
    data.y_real = {1.0, 3.0, 10.0, 12.0};

    const auto phi = solve_leaf_values(topo, cdf, sp, data);
    REQUIRE(phi.size() == 2);
    CHECK(phi[0] == doctest::Approx(11.0).epsilon(1e-6));  // left leaf: x in {1.0, 0.9}
    CHECK(phi[1] == doctest::Approx(2.0).epsilon(1e-6));   // right leaf: x in {0.0, 0.5}
}

TEST_CASE("doubling the target doubles the solved leaf values exactly") {
    const Topology topo = build_topology(2);
    const SmoothingCdf cdf(16.0);
    Rng rng(9);
    Dataset data = regression_data(40, 2, 23);
    const SplitParameters sp = initialize(rng, topo, 2);

    const auto phi1 = solve_leaf_values(topo, cdf, sp, data);
    for (auto& y : data.y_real) y *= 2.0;
    const auto phi2 = solve_leaf_values(topo, cdf, sp, data);
    REQUIRE(phi1.size() == phi2.size());
    // scaling by a power of two commutes with rounding, so this is bitwise
    for (std::size_t t = 0; t < phi1.size(); ++t) CHECK(phi2[t] == 2.0 * phi1[t]);
}

TEST_CASE("constant targets are fit almost exactly") {
    Dataset data = regression_data(50, 2, 31);
    for (auto& y : data.y_real) y = 0.7;
    TrainConfig cfg;
    cfg.depth = 2;
    cfg.n_starts = 3;
    cfg.seed = 2;
    const RegressionModel model = train_orrt(data, cfg);
    CHECK(model.mse < 1e-10);
    const SmoothingCdf cdf(model.gamma);
    const double x[2] = {0.3, 0.6};
    CHECK(predict_value(model.topo, cdf, model.params, model.phi, x) == doctest::Approx(0.7).epsilon(1e-5));
}

TEST_CASE("trained error never exceeds the target variance") {
    const Dataset data = regression_data(80, 2, 41);
    TrainConfig cfg;
    cfg.depth = 2;
    cfg.n_starts = 5;
    cfg.seed = 11;
    const RegressionModel model = train_orrt(data, cfg);
    CHECK(model.mse <= variance(data.y_real) * (1.0 + 1e-9));
    CHECK(std::isfinite(model.mse));
}

TEST_CASE("a one-dimensional step function is carved cleanly") {
    Rng rng(71);
    Dataset data;
    data.n = 200;
    data.p = 1;
    data.regression = true;
    data.x.resize(200);
    data.y_real.resize(200);
    for (std::size_t i = 0; i < 200; ++i) {
        data.x[i] = rng.uniform01();
        data.y_real[i] = data.x[i] > 0.5 ? 2.0 : -1.0;
    }
    TrainConfig cfg;
    cfg.depth = 1;
    cfg.n_starts = 10;
    cfg.seed = 3;
    cfg.gamma_schedule = {4.0, 16.0, 64.0, 512.0};
    const RegressionModel model = train_orrt(data, cfg);
    CHECK(model.mse < 0.05 * variance(data.y_real));
}

TEST_CASE("solved leaf values resist coordinate perturbation") {
    const Dataset data = regression_data(60, 2, 53);
    TrainConfig cfg;
    cfg.depth = 2;
    cfg.n_starts = 4;
    cfg.seed = 19;
    cfg.gamma_schedule = {8.0, 64.0, 512.0};
    const RegressionModel model = train_orrt(data, cfg);

    const SmoothingCdf cdf(model.gamma);
    const double base = orrt_objective(model.topo, cdf, model.params, model.phi, data);
    CHECK(base == model.mse);
    for (std::size_t t = 0; t < model.phi.size(); ++t) {
        for (double delta : {1e-4, -1e-4}) {
            auto phi = model.phi;
            phi[t] += delta;
            const double perturbed = orrt_objective(model.topo, cdf, model.params, phi, data);
            CHECK(perturbed >= base - 1e-12 * std::max(1.0, base));
        }
    }
}

TEST_CASE("regression training is bit-reproducible") {
    const Dataset data = regression_data(40, 2, 61);
    TrainConfig cfg;
    cfg.depth = 2;
    cfg.n_starts = 4;
    cfg.seed = 29;
    cfg.n_threads = 3;
    const RegressionModel m1 = train_orrt(data, cfg);
    const RegressionModel m2 = train_orrt(data, cfg);
    CHECK(m1.mse == m2.mse);
    CHECK(m1.params.a == m2.params.a);
    CHECK(m1.params.mu == m2.params.mu);
    CHECK(m1.phi == m2.phi);
}

TEST_CASE("empty or mislabeled data is rejected") {
    Dataset empty;
    empty.regression = true;
    TrainConfig cfg;
    CHECK_THROWS_AS(train_orrt(empty, cfg), std::invalid_argument);

    Dataset no_target = regression_data(10, 1, 3);
    no_target.y_real.clear();
    CHECK_THROWS_AS(train_orrt(no_target, cfg), std::invalid_argument);
}
