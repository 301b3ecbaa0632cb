#include "ransomrisk/forest/metrics.hpp"

#include "ransomrisk/core/error.hpp"

namespace ransomrisk::forest {

using nlohmann::json;

json Metrics::to_json() const {
    return {{"confusion", {{"tn", tn}, {"fp", fp}, {"fn", fn}, {"tp", tp}}},
            {"precision", precision},
            {"recall", recall},
            {"f1", f1},
            {"accuracy", accuracy},
            {"threshold", kDecisionThreshold},
            {"undefined", {{"precision", precision_undefined}, {"recall", recall_undefined}, {"f1", f1_undefined}}}};
}

Metrics metrics_from_confusion(std::size_t tn, std::size_t fp, std::size_t fn, std::size_t tp) {
    Metrics m{tn, fp, fn, tp};
    auto ratio = [](double num, double den, bool& undefined) {
        if (den == 0) {
            undefined = true;
            return 0.0;
        }
        return num / den;
    };
    m.precision = ratio(double(tp), double(tp + fp), m.precision_undefined);
    m.recall = ratio(double(tp), double(tp + fn), m.recall_undefined);
    m.f1 = ratio(2 * m.precision * m.recall, m.precision + m.recall, m.f1_undefined);
    bool unused = false;
    m.accuracy = ratio(double(tp + tn), double(tn + fp + fn + tp), unused);
    return m;
}

Metrics compute_metrics(std::span<const int> truth, std::span<const double> probability, double threshold) {
    if (truth.size() != probability.size()) throw Error("ShapeMismatch", "truth and prediction sizes differ");
    std::size_t tn = 0, fp = 0, fn = 0, tp = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool predicted = probability[i] >= threshold;
        if (truth[i] == 1)
            (predicted ? tp : fn)++;
        else
            (predicted ? fp : tn)++;
    }
    return metrics_from_confusion(tn, fp, fn, tp);
}

Metrics evaluate(const Forest& forest, const std::vector<AttackRecord>& test) {
    if (test.empty()) throw Error("EmptyTestSet", "cannot evaluate on zero records");
    std::vector<double> p;
    p.reserve(test.size());
    for (const auto& r : test) p.push_back(forest.predict_proba(r));
    return compute_metrics(target_labels(test), p);
}

}  // namespace ransomrisk::forest
