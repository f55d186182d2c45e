#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "topology.hpp"

namespace orct {

// Logistic CDF family F_gamma(u) = 1 / (1 + exp(-gamma * u)). Larger gamma
// means sharper routing; gamma -> infinity recovers a deterministic step.
// Values are clamped to [kCdfEps, 1 - kCdfEps] so downstream products and
// gradients stay finite.
inline constexpr double kCdfEps = 1e-15;

class SmoothingCdf {
  public:
    explicit SmoothingCdf(double gamma) : gamma_(gamma) {}

    double gamma() const { return gamma_; }

    double value(double u) const {
        const double a = gamma_ * u;
        double f;
        if (a >= 0.0) {
            f = 1.0 / (1.0 + std::exp(-a));
        } else {
            const double e = std::exp(a);
            f = e / (1.0 + e);
        }
        if (f < kCdfEps) f = kCdfEps;
        if (f > 1.0 - kCdfEps) f = 1.0 - kCdfEps;
        return f;
    }

    // F'(u) = gamma * F(u) * (1 - F(u)), evaluated on the clamped F.
    double derivative(double u) const {
        const double f = value(u);
        return gamma_ * f * (1.0 - f);
    }

  private:
    double gamma_;
};

// Oblique-cut coefficients: a is p x n_branch (row-major by feature), mu has
// one intercept per branch node. All entries live in [-1, 1].
struct SplitParameters {
    int p = 0;
    int n_branch = 0;
    std::vector<double> a;   // a[j * n_branch + (t - 1)], t = branch node id
    std::vector<double> mu;  // mu[t - 1]

    static SplitParameters zeros(int p, int n_branch) {
        SplitParameters sp;
        sp.p = p;
        sp.n_branch = n_branch;
        sp.a.assign(static_cast<std::size_t>(p) * n_branch, 0.0);
        sp.mu.assign(n_branch, 0.0);
        return sp;
    }

    double coeff(int j, int node) const { return a[static_cast<std::size_t>(j) * n_branch + (node - 1)]; }
    double& coeff(int j, int node) { return a[static_cast<std::size_t>(j) * n_branch + (node - 1)]; }
    double intercept(int node) const { return mu[node - 1]; }
    double& intercept(int node) { return mu[node - 1]; }
};

// Class-to-leaf assignment, K x n_leaves. Feasible assignments are column
// stochastic (each leaf carries one unit of class mass) and cover every
// class with at least one leaf. The trainer only ever stores 0/1 entries.
struct LeafAssignment {
    int n_classes = 0;
    int n_leaves = 0;
    std::vector<double> c;  // c[k * n_leaves + leaf_offset]

    static LeafAssignment zeros(int n_classes, int n_leaves) {
        LeafAssignment la;
        la.n_classes = n_classes;
        la.n_leaves = n_leaves;
        la.c.assign(static_cast<std::size_t>(n_classes) * n_leaves, 0.0);
        return la;
    }

    double at(int k, int leaf_off) const { return c[static_cast<std::size_t>(k) * n_leaves + leaf_off]; }
    double& at(int k, int leaf_off) { return c[static_cast<std::size_t>(k) * n_leaves + leaf_off]; }

    // Label of a leaf under an integral assignment (lowest class wins ties).
    int label_of(int leaf_off) const {
        int best = 0;
        double best_val = at(0, leaf_off);
        for (int k = 1; k < n_classes; ++k) {
            if (at(k, leaf_off) > best_val) {
                best_val = at(k, leaf_off);
                best = k;
            }
        }
        return best;
    }
};

// Misclassification costs W[y][k], zero on the diagonal.
struct CostMatrix {
    int n_classes = 0;
    std::vector<double> w;  // w[y * n_classes + k]

    static CostMatrix uniform(int n_classes, double off_diagonal) {
        CostMatrix cm;
        cm.n_classes = n_classes;
        cm.w.assign(static_cast<std::size_t>(n_classes) * n_classes, off_diagonal);
        for (int k = 0; k < n_classes; ++k) cm.w[static_cast<std::size_t>(k) * n_classes + k] = 0.0;
        return cm;
    }

    double at(int y, int k) const { return w[static_cast<std::size_t>(y) * n_classes + k]; }
    double& at(int y, int k) { return w[static_cast<std::size_t>(y) * n_classes + k]; }

    double max_off_diagonal() const {
        double m = 0.0;
        for (int y = 0; y < n_classes; ++y)
            for (int k = 0; k < n_classes; ++k)
                if (y != k && at(y, k) > m) m = at(y, k);
        return m;
    }
};

// Numeric training data: features scaled into [0,1], class labels 0-based.
// For regression tasks `y_real` is used and the class fields stay empty.
struct Dataset {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> x;  // row-major n * p
    std::vector<int> y;
    std::vector<double> y_real;
    int n_classes = 0;
    std::vector<std::vector<int>> class_index_sets;
    bool regression = false;

    const double* row(std::size_t i) const { return x.data() + i * p; }

    void rebuild_class_index_sets() {
        class_index_sets.assign(n_classes, {});
        for (std::size_t i = 0; i < n; ++i) class_index_sets[y[i]].push_back(static_cast<int>(i));
    }
};

// Neumaier-compensated accumulator; batch objectives use it so results do
// not depend on how callers chunk the data beyond ~1e-15.
class CompensatedSum {
  public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace orct
