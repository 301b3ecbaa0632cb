#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "ransomrisk/forest/forest.hpp"

namespace ransomrisk::forest {

/// Binary metrics with "targeted" as the positive class. A ratio whose
/// denominator is zero reports 0 and raises its flag.
struct Metrics {
    std::size_t tn = 0, fp = 0, fn = 0, tp = 0;
    double precision = 0, recall = 0, f1 = 0, accuracy = 0;
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;

    nlohmann::json to_json() const;
};

inline constexpr double kDecisionThreshold = 0.5;

Metrics metrics_from_confusion(std::size_t tn, std::size_t fp, std::size_t fn, std::size_t tp);
/// Positive prediction when probability >= threshold.
Metrics compute_metrics(std::span<const int> truth, std::span<const double> probability,
                        double threshold = kDecisionThreshold);
/// Throws EmptyTestSet.
Metrics evaluate(const Forest& forest, const std::vector<AttackRecord>& test);

}  // namespace ransomrisk::forest
