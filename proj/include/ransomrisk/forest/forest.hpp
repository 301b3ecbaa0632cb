#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ransomrisk/forest/encoding.hpp"
#include "ransomrisk/forest/tree.hpp"

namespace ransomrisk::forest {

struct ForestConfig {
    std::size_t n_trees = 100;
    std::uint64_t seed = 42;
    std::optional<std::size_t> max_features;  // unset: ceil(sqrt(width))
    std::int64_t min_samples_leaf = 1;
    std::size_t max_depth = 0;                // 0: unlimited
    bool bootstrap = true;
    double test_fraction = 0.2;
    unsigned threads = 0;                     // 0: hardware concurrency

    void validate() const;
    std::size_t features_per_split(std::size_t width) const;
    nlohmann::json to_json() const;
    static ForestConfig from_json(const nlohmann::json& j);
};

/// Bagged trees over a fixed-width design matrix.
class TreeEnsemble {
public:
    TreeEnsemble() = default;
    TreeEnsemble(std::vector<DecisionTree> trees, std::size_t width);

    const std::vector<DecisionTree>& trees() const { return trees_; }
    std::size_t width() const { return width_; }

    /// Mean over trees of leaf class-1 frequency.
    double predict_proba(std::span<const double> row) const;
    /// Mean decrease in Gini per column, normalized per tree, averaged and
    /// renormalized to sum to 1 (all zeros when no tree ever split).
    std::vector<double> feature_importance() const;

private:
    std::vector<DecisionTree> trees_;
    std::size_t width_ = 0;
};

/// Per-tree RNG stream derived from (seed, tree index).
std::mt19937_64 tree_stream(std::uint64_t seed, std::size_t tree_index);

/// Throws SingleClass when fewer than two classes are present and
/// DegenerateData when all rows are identical.
TreeEnsemble fit_ensemble(const DesignMatrix& x, std::span<const int> y, const ForestConfig& config);

/// Trained classifier bundled with the encoding it expects.
struct Forest {
    EncodingSchema schema;
    ForestConfig config;
    TreeEnsemble ensemble;

    /// Probability that the record is a targeted (unsafe) instance.
    double predict_proba(const AttackRecord& record, TransformReport* report = nullptr) const;
    std::vector<double> feature_importance() const { return ensemble.feature_importance(); }
    /// Importances pooled per feature block, in block order.
    std::vector<std::pair<std::string, double>> grouped_importance() const;
};

Forest train(const std::vector<AttackRecord>& training, const ForestConfig& config);

/// Stratified, seed-deterministic split. Returns (train, test) row indices,
/// each in ascending order. Throws ClassTooSmall when a class has < 2 rows.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(std::span<const int> labels,
                                                                               double fraction,
                                                                               std::uint64_t seed);

std::pair<std::vector<AttackRecord>, std::vector<AttackRecord>> split_train_test(
    const std::vector<AttackRecord>& records, double fraction, std::uint64_t seed);

}  // namespace ransomrisk::forest
