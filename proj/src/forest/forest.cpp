#include "ransomrisk/forest/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "ransomrisk/core/error.hpp"

namespace ransomrisk::forest {

using nlohmann::json;

void ForestConfig::validate() const {
    if (n_trees < 1) throw Error("InvalidConfig", "n_trees must be >= 1", ErrorKind::usage);
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw Error("InvalidConfig", "test_fraction must lie in (0, 1)", ErrorKind::usage);
    if (min_samples_leaf < 1) throw Error("InvalidConfig", "min_samples_leaf must be >= 1", ErrorKind::usage);
    if (max_features && *max_features < 1)
        throw Error("InvalidConfig", "max_features must be >= 1", ErrorKind::usage);
}

std::size_t ForestConfig::features_per_split(std::size_t width) const {
    if (max_features) return std::min(*max_features, width);
    auto k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(width))));
    return std::max<std::size_t>(1, std::min(k, width));
}

json ForestConfig::to_json() const {
    return {{"n_trees", n_trees},
            {"seed", seed},
            {"max_features", max_features ? json(*max_features) : json("sqrt")},
            {"min_samples_leaf", min_samples_leaf},
            {"max_depth", max_depth},
            {"bootstrap", bootstrap},
            {"split_criterion", "gini"},
            {"test_fraction", test_fraction}};
}

ForestConfig ForestConfig::from_json(const json& j) {
    ForestConfig c;
    c.n_trees = j.at("n_trees").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (const auto& mf = j.at("max_features"); !mf.is_string()) c.max_features = mf.get<std::size_t>();
    c.min_samples_leaf = j.at("min_samples_leaf").get<std::int64_t>();
    c.max_depth = j.at("max_depth").get<std::size_t>();
    c.bootstrap = j.at("bootstrap").get<bool>();
    c.test_fraction = j.at("test_fraction").get<double>();
    c.validate();
    return c;
}

TreeEnsemble::TreeEnsemble(std::vector<DecisionTree> trees, std::size_t width)
    : trees_(std::move(trees)), width_(width) {}

double TreeEnsemble::predict_proba(std::span<const double> row) const {
    if (row.size() != width_) throw Error("EncodingFailure", "row width does not match the model", ErrorKind::model);
    if (trees_.empty()) throw Error("CorruptModel", "forest has no trees", ErrorKind::model);
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict_proba(row);
    return sum / static_cast<double>(trees_.size());
}

std::vector<double> TreeEnsemble::feature_importance() const {
    std::vector<double> mean(width_, 0.0);
    std::size_t used = 0;
    for (const auto& t : trees_) {
        std::vector<double> imp(width_, 0.0);
        double total = 0.0;
        for (const auto& n : t.nodes()) {
            if (n.is_leaf()) continue;
            imp[static_cast<std::size_t>(n.feature)] += n.impurity_decrease;
            total += n.impurity_decrease;
        }
        if (t.nodes().size() <= 1) continue;
        ++used;
        if (total > 0)
            for (std::size_t c = 0; c < width_; ++c) mean[c] += imp[c] / total;
    }
    if (used == 0) return mean;
    double sum = 0.0;
    for (auto& v : mean) sum += v /= static_cast<double>(used);
    if (sum > 0)
        for (auto& v : mean) v /= sum;
    return mean;
}

std::mt19937_64 tree_stream(std::uint64_t seed, std::size_t tree_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tree_index), static_cast<std::uint32_t>(tree_index >> 32), 0x7265u};
    return std::mt19937_64(seq);
}

TreeEnsemble fit_ensemble(const DesignMatrix& x, std::span<const int> y, const ForestConfig& config) {
    config.validate();
    if (y.size() != x.rows) throw Error("ShapeMismatch", "label count differs from row count");
    if (x.rows == 0 || x.cols == 0) throw Error("EmptyDataset", "no training data");
    bool has0 = false, has1 = false;
    for (int v : y) {
        if (v != 0 && v != 1) throw Error("BadLabel", "labels must be 0 or 1");
        (v ? has1 : has0) = true;
    }
    if (!has0 || !has1) throw Error("SingleClass", "training data must contain both classes", ErrorKind::model);
    bool identical = true;
    for (std::size_t r = 1; r < x.rows && identical; ++r)
        identical = std::equal(x.row(r).begin(), x.row(r).end(), x.row(0).begin());
    if (identical) throw Error("DegenerateData", "all training rows are identical", ErrorKind::model);

    const TreeParams params{config.features_per_split(x.cols), config.min_samples_leaf, config.max_depth};
    std::vector<DecisionTree> trees(config.n_trees);

    auto build = [&](std::size_t t) {
        auto rng = tree_stream(config.seed, t);
        std::vector<std::int64_t> weights(x.rows, config.bootstrap ? 0 : 1);
        if (config.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, x.rows - 1);
            for (std::size_t i = 0; i < x.rows; ++i) ++weights[pick(rng)];
        }
        trees[t] = grow_tree(x, y, weights, params, rng);
    };

    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.n_trees));
    if (threads <= 1) {
        for (std::size_t t = 0; t < config.n_trees; ++t) build(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t t; (t = next.fetch_add(1)) < config.n_trees;) {
                    try {
                        build(t);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }
    return TreeEnsemble(std::move(trees), x.cols);
}

double Forest::predict_proba(const AttackRecord& record, TransformReport* report) const {
    return ensemble.predict_proba(schema.encode(record, report));
}

std::vector<std::pair<std::string, double>> Forest::grouped_importance() const {
    auto imp = feature_importance();
    std::vector<std::pair<std::string, double>> out;
    for (const auto& b : schema.blocks()) {
        double s = 0.0;
        for (std::size_t c = b.offset; c < b.offset + b.width(); ++c) s += imp[c];
        out.emplace_back(b.feature, s);
    }
    return out;
}

Forest train(const std::vector<AttackRecord>& training, const ForestConfig& config) {
    Forest f;
    f.schema = EncodingSchema::fit(training);
    f.config = config;
    const auto x = f.schema.encode_all(training);
    const auto y = target_labels(training);
    f.ensemble = fit_ensemble(x, y, config);
    return f;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(std::span<const int> labels,
                                                                               double fraction,
                                                                               std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw Error("InvalidConfig", "split fraction must lie in (0, 1)", ErrorKind::usage);
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw Error("BadLabel", "labels must be 0 or 1");
        by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    std::vector<std::size_t> train, test;
    for (std::size_t c = 0; c < 2; ++c) {
        auto& idx = by_class[c];
        if (idx.size() < 2)
            throw Error("ClassTooSmall", "class " + std::to_string(c) + " has fewer than two records");
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(c), 0x5e11u};
        std::mt19937_64 rng(seq);
        std::shuffle(idx.begin(), idx.end(), rng);
        auto n_test = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
        n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
        test.insert(test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
        train.insert(train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

std::pair<std::vector<AttackRecord>, std::vector<AttackRecord>> split_train_test(
    const std::vector<AttackRecord>& records, double fraction, std::uint64_t seed) {
    const auto labels = target_labels(records);
    auto [tr, te] = stratified_split(labels, fraction, seed);
    std::pair<std::vector<AttackRecord>, std::vector<AttackRecord>> out;
    for (auto i : tr) out.first.push_back(records[i]);
    for (auto i : te) out.second.push_back(records[i]);
    return out;
}

}  // namespace ransomrisk::forest
