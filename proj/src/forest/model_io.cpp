#include "ransomrisk/forest/model_io.hpp"

#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/json_io.hpp"

namespace ransomrisk::forest {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "ransomrisk-forest";

Error corrupt(const std::string& why) { return Error("CorruptModel", why, ErrorKind::model); }

json tree_to_json(const DecisionTree& t) {
    json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
         counts = json::array(), decrease = json::array();
    for (const auto& n : t.nodes()) {
        feature.push_back(n.feature);
        threshold.push_back(n.threshold);
        left.push_back(n.left);
        right.push_back(n.right);
        counts.push_back({n.counts[0], n.counts[1]});
        decrease.push_back(n.impurity_decrease);
    }
    return {{"feature", feature},       {"threshold", threshold}, {"left", left},
            {"right", right},           {"counts", counts},       {"impurity_decrease", decrease}};
}

DecisionTree tree_from_json(const json& j, std::size_t width) {
    const auto feature = j.at("feature").get<std::vector<int>>();
    const auto threshold = j.at("threshold").get<std::vector<double>>();
    const auto left = j.at("left").get<std::vector<int>>();
    const auto right = j.at("right").get<std::vector<int>>();
    const auto counts = j.at("counts").get<std::vector<std::array<std::int64_t, 2>>>();
    const auto decrease = j.at("impurity_decrease").get<std::vector<double>>();
    const std::size_t n = feature.size();
    if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n || counts.size() != n ||
        decrease.size() != n)
        throw corrupt("tree node arrays have inconsistent lengths");

    std::vector<Node> nodes(n);
    for (std::size_t i = 0; i < n; ++i) {
        Node& node = nodes[i];
        node.feature = feature[i];
        node.threshold = threshold[i];
        node.left = left[i];
        node.right = right[i];
        node.counts = counts[i];
        node.impurity_decrease = decrease[i];
        if (node.counts[0] < 0 || node.counts[1] < 0) throw corrupt("negative class count");
        if (node.is_leaf()) {
            if (node.total() <= 0) throw corrupt("leaf without samples");
            continue;
        }
        if (static_cast<std::size_t>(node.feature) >= width) throw corrupt("split column beyond schema width");
        // children always come after their parent, which also rules out cycles
        auto valid_child = [&](int c) { return c > static_cast<int>(i) && static_cast<std::size_t>(c) < n; };
        if (!valid_child(node.left) || !valid_child(node.right)) throw corrupt("bad child index");
    }
    return DecisionTree(std::move(nodes));
}

}  // namespace

std::string serialize_model(const Forest& forest) {
    json trees = json::array();
    for (const auto& t : forest.ensemble.trees()) trees.push_back(tree_to_json(t));
    json doc = {{"format", kFormat},
                {"version", kModelFormatVersion},
                {"config", forest.config.to_json()},
                {"schema", forest.schema.to_json()},
                {"width", forest.schema.width()},
                {"trees", trees}};
    return doc.dump() + "\n";
}

Forest deserialize_model(const std::string& bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw corrupt(std::string("unparseable model: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != kFormat) throw corrupt("not a forest model document");
    if (!doc.contains("version") || !doc["version"].is_number_integer()) throw corrupt("missing format version");
    if (const int v = doc["version"].get<int>(); v != kModelFormatVersion)
        throw Error("VersionMismatch",
                    "model format version " + std::to_string(v) + ", expected " + std::to_string(kModelFormatVersion),
                    ErrorKind::model);
    try {
        Forest f;
        f.config = ForestConfig::from_json(doc.at("config"));
        f.schema = EncodingSchema::from_json(doc.at("schema"));
        if (doc.at("width").get<std::size_t>() != f.schema.width()) throw corrupt("width disagrees with schema");
        std::vector<DecisionTree> trees;
        for (const auto& t : doc.at("trees")) trees.push_back(tree_from_json(t, f.schema.width()));
        if (trees.empty()) throw corrupt("model has no trees");
        f.ensemble = TreeEnsemble(std::move(trees), f.schema.width());
        return f;
    } catch (const json::exception& e) {
        throw corrupt(e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::model) throw;
        throw corrupt(e.what());
    }
}

void save_model(const std::string& path, const Forest& forest) { write_file(path, serialize_model(forest)); }

Forest load_model(const std::string& path) { return deserialize_model(read_file(path)); }

}  // namespace ransomrisk::forest
