#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ransomrisk/forest/encoding.hpp"

namespace ransomrisk::forest {

/// Flat tree node. Leaves have feature == -1. Class counts are kept on
/// every node (bootstrap multiplicities included).
struct Node {
    int feature = -1;
    double threshold = 0.0;  // go left when value <= threshold
    int left = -1;
    int right = -1;
    std::array<std::int64_t, 2> counts{0, 0};
    double impurity_decrease = 0.0;  // n_node*gini - n_left*gini_left - n_right*gini_right

    bool is_leaf() const { return feature < 0; }
    std::int64_t total() const { return counts[0] + counts[1]; }
};

class DecisionTree {
public:
    DecisionTree() = default;
    explicit DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& leaf_for(std::span<const double> row) const;
    /// Class-1 frequency of the leaf the row lands in.
    double predict_proba(std::span<const double> row) const;

private:
    std::vector<Node> nodes_;
};

struct TreeParams {
    std::size_t max_features = 0;  // 0: consider every column
    std::int64_t min_samples_leaf = 1;
    std::size_t max_depth = 0;     // 0: grow until pure
};

/// Candidate split quality, compared exactly on integer class counts.
/// Higher `numerator/denominator` means lower weighted child Gini.
struct SplitScore {
    __int128 numerator = 0;
    __int128 denominator = 1;

    /// sum_k L_k^2 / n_L + sum_k R_k^2 / n_R as a single fraction.
    static SplitScore of(const std::array<std::int64_t, 2>& left, const std::array<std::int64_t, 2>& right);
    bool better_than(const SplitScore& o) const { return numerator * o.denominator > o.numerator * denominator; }
    bool ties(const SplitScore& o) const { return numerator * o.denominator == o.numerator * denominator; }
};

double gini(const std::array<std::int64_t, 2>& counts);

/// CART growth with Gini impurity. `weights` are per-row multiplicities
/// (bootstrap counts); rows with weight 0 are ignored. Thresholds are
/// midpoints between consecutive distinct values; ties on score prefer the
/// lowest column, then the lowest threshold.
DecisionTree grow_tree(const DesignMatrix& x, std::span<const int> y, std::span<const std::int64_t> weights,
                       const TreeParams& params, std::mt19937_64& rng);

}  // namespace ransomrisk::forest
