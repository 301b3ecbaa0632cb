#include "ransomrisk/forest/tree.hpp"

#include <algorithm>
#include <numeric>

#include "ransomrisk/core/error.hpp"

namespace ransomrisk::forest {

namespace {

struct Candidate {
    bool found = false;
    std::size_t col = 0;
    double threshold = 0;
    SplitScore score;
    std::array<std::int64_t, 2> left{0, 0};
    std::array<std::int64_t, 2> right{0, 0};

    bool beaten_by(const SplitScore& s, std::size_t c, double thr) const {
        if (!found) return true;
        if (s.better_than(score)) return true;
        if (!s.ties(score)) return false;
        if (c != col) return c < col;
        return thr < threshold;
    }
};

double midpoint(double a, double b) {
    double mid = a + (b - a) * 0.5;
    return mid >= b ? a : mid;
}

struct Frame {
    int node;
    std::vector<std::size_t> rows;
    std::size_t depth;
};

}  // namespace

SplitScore SplitScore::of(const std::array<std::int64_t, 2>& left, const std::array<std::int64_t, 2>& right) {
    const __int128 nl = left[0] + left[1];
    const __int128 nr = right[0] + right[1];
    const __int128 sl = static_cast<__int128>(left[0]) * left[0] + static_cast<__int128>(left[1]) * left[1];
    const __int128 sr = static_cast<__int128>(right[0]) * right[0] + static_cast<__int128>(right[1]) * right[1];
    return {sl * nr + sr * nl, nl * nr};
}

double gini(const std::array<std::int64_t, 2>& counts) {
    const double n = static_cast<double>(counts[0] + counts[1]);
    if (n == 0) return 0.0;
    const double p0 = static_cast<double>(counts[0]) / n, p1 = static_cast<double>(counts[1]) / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

const Node& DecisionTree::leaf_for(std::span<const double> row) const {
    if (nodes_.empty()) throw Error("CorruptModel", "empty tree", ErrorKind::model);
    const Node* n = &nodes_[0];
    while (!n->is_leaf()) n = &nodes_[static_cast<std::size_t>(row[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left : n->right)];
    return *n;
}

double DecisionTree::predict_proba(std::span<const double> row) const {
    const auto& leaf = leaf_for(row);
    return static_cast<double>(leaf.counts[1]) / static_cast<double>(leaf.total());
}

DecisionTree grow_tree(const DesignMatrix& x, std::span<const int> y, std::span<const std::int64_t> weights,
                       const TreeParams& params, std::mt19937_64& rng) {
    if (y.size() != x.rows || weights.size() != x.rows)
        throw Error("ShapeMismatch", "labels/weights do not match the design matrix");
    const std::size_t min_leaf = static_cast<std::size_t>(std::max<std::int64_t>(1, params.min_samples_leaf));
    const std::size_t k = params.max_features == 0 ? x.cols : std::min(params.max_features, x.cols);

    std::vector<Node> nodes(1);
    std::vector<Frame> stack;
    {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < x.rows; ++i)
            if (weights[i] > 0) rows.push_back(i);
        if (rows.empty()) throw Error("EmptyDataset", "no rows with positive weight");
        stack.push_back({0, std::move(rows), 0});
    }

    std::vector<std::size_t> cols(x.cols);
    std::vector<std::pair<double, std::size_t>> sorted;

    while (!stack.empty()) {
        Frame frame = std::move(stack.back());
        stack.pop_back();

        std::array<std::int64_t, 2> counts{0, 0};
        for (auto r : frame.rows) counts[static_cast<std::size_t>(y[r])] += weights[r];
        nodes[static_cast<std::size_t>(frame.node)].counts = counts;
        const std::int64_t total = counts[0] + counts[1];

        if (counts[0] == 0 || counts[1] == 0) continue;
        if (params.max_depth && frame.depth >= params.max_depth) continue;
        if (total < static_cast<std::int64_t>(2 * min_leaf)) continue;

        std::iota(cols.begin(), cols.end(), std::size_t{0});
        std::shuffle(cols.begin(), cols.end(), rng);

        Candidate best;
        std::size_t evaluated = 0;
        for (std::size_t col : cols) {
            if (evaluated >= k) break;
            sorted.clear();
            for (auto r : frame.rows) sorted.emplace_back(x.at(r, col), r);
            std::sort(sorted.begin(), sorted.end());
            if (sorted.front().first == sorted.back().first) continue;  // constant here, not counted
            ++evaluated;

            std::array<std::int64_t, 2> left{0, 0};
            for (std::size_t p = 0; p + 1 < sorted.size(); ++p) {
                const auto r = sorted[p].second;
                left[static_cast<std::size_t>(y[r])] += weights[r];
                if (sorted[p].first == sorted[p + 1].first) continue;
                const std::array<std::int64_t, 2> right{counts[0] - left[0], counts[1] - left[1]};
                if (left[0] + left[1] < static_cast<std::int64_t>(min_leaf) ||
                    right[0] + right[1] < static_cast<std::int64_t>(min_leaf))
                    continue;
                const auto score = SplitScore::of(left, right);
                const double thr = midpoint(sorted[p].first, sorted[p + 1].first);
                if (best.beaten_by(score, col, thr)) best = {true, col, thr, score, left, right};
            }
        }
        if (!best.found) continue;

        auto& node = nodes[static_cast<std::size_t>(frame.node)];
        node.feature = static_cast<int>(best.col);
        node.threshold = best.threshold;
        node.impurity_decrease = static_cast<double>(total) * gini(counts) -
                                 static_cast<double>(best.left[0] + best.left[1]) * gini(best.left) -
                                 static_cast<double>(best.right[0] + best.right[1]) * gini(best.right);

        std::vector<std::size_t> left_rows, right_rows;
        for (auto r : frame.rows) (x.at(r, best.col) <= best.threshold ? left_rows : right_rows).push_back(r);

        const int left_id = static_cast<int>(nodes.size());
        const int right_id = left_id + 1;
        nodes[static_cast<std::size_t>(frame.node)].left = left_id;
        nodes[static_cast<std::size_t>(frame.node)].right = right_id;
        nodes.emplace_back();
        nodes.emplace_back();
        // right pushed first so the left subtree is grown first
        stack.push_back({right_id, std::move(right_rows), frame.depth + 1});
        stack.push_back({left_id, std::move(left_rows), frame.depth + 1});
    }
    return DecisionTree(std::move(nodes));
}

}  // namespace ransomrisk::forest
