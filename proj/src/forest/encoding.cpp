#include "ransomrisk/forest/encoding.hpp"

#include <algorithm>
#include <set>

#include "ransomrisk/core/error.hpp"

namespace ransomrisk::forest {

using nlohmann::json;

namespace {

// Categorical values of a record for a block, or a numeric value.
std::vector<std::string> categories_of(const AttackRecord& r, const std::string& feature) {
    const auto& v = r.victim;
    const auto& a = r.adversary;
    auto opt = [](const auto& o) {
        return o ? std::vector<std::string>{std::string(to_string(*o))} : std::vector<std::string>{};
    };
    if (feature == "country") return {v.country().str()};
    if (feature == "sectors") {
        std::vector<std::string> out;
        for (const auto& s : v.sectors()) out.push_back(s.str());
        return out;
    }
    if (feature == "org_type") return {std::string(to_string(v.org_type()))};
    if (feature == "sophistication") return opt(a.sophistication());
    if (feature == "motive") return opt(a.motive());
    if (feature == "resource_level") return opt(a.resource_level());
    if (feature == "intent") {
        std::vector<std::string> out;
        for (auto i : a.intent()) out.emplace_back(to_string(i));
        return out;
    }
    throw Error("UnknownFeature", "no categorical feature '" + feature + "'");
}

double numeric_of(const AttackRecord& r, const std::string& feature) {
    if (feature == "revenue") return static_cast<double>(r.victim.revenue());
    if (feature == "employees") return static_cast<double>(r.victim.employees());
    if (feature == "ewma") return r.ewma_value();
    if (feature == "capability_count") return static_cast<double>(r.adversary.capability_count());
    throw Error("UnknownFeature", "no numeric feature '" + feature + "'");
}

struct BlockSpec {
    const char* feature;
    BlockKind kind;
};

constexpr BlockSpec kLayout[] = {
    {"country", BlockKind::one_hot},       {"sectors", BlockKind::multi_label},
    {"org_type", BlockKind::one_hot},      {"revenue", BlockKind::numeric},
    {"employees", BlockKind::numeric},     {"ewma", BlockKind::numeric},
    {"sophistication", BlockKind::one_hot}, {"motive", BlockKind::one_hot},
    {"intent", BlockKind::multi_label},    {"resource_level", BlockKind::one_hot},
    {"capability_count", BlockKind::numeric},
};

std::string_view kind_name(BlockKind k) {
    switch (k) {
        case BlockKind::one_hot: return "one_hot";
        case BlockKind::multi_label: return "multi_label";
        case BlockKind::numeric: return "numeric";
    }
    return "numeric";
}

BlockKind parse_kind(const std::string& s) {
    if (s == "one_hot") return BlockKind::one_hot;
    if (s == "multi_label") return BlockKind::multi_label;
    if (s == "numeric") return BlockKind::numeric;
    throw Error("CorruptModel", "unknown block kind '" + s + "'", ErrorKind::model);
}

}  // namespace

std::size_t TransformReport::total() const {
    std::size_t n = 0;
    for (const auto& [_, c] : unseen) n += c;
    return n;
}

EncodingSchema::EncodingSchema(std::vector<FeatureBlock> blocks) : blocks_(std::move(blocks)) {
    for (auto& b : blocks_) {
        b.offset = width_;
        width_ += b.width();
    }
}

EncodingSchema EncodingSchema::fit(const std::vector<AttackRecord>& records) {
    if (records.empty()) throw Error("EmptyDataset", "cannot fit an encoding on zero records");
    std::vector<FeatureBlock> blocks;
    for (const auto& spec : kLayout) {
        FeatureBlock b{spec.feature, spec.kind, {}, 0};
        if (spec.kind != BlockKind::numeric) {
            std::set<std::string> seen;
            for (const auto& r : records)
                for (auto& c : categories_of(r, b.feature)) seen.insert(std::move(c));
            b.categories.assign(seen.begin(), seen.end());
        }
        blocks.push_back(std::move(b));
    }
    return EncodingSchema(std::move(blocks));
}

std::vector<std::string> EncodingSchema::column_names() const {
    std::vector<std::string> names;
    names.reserve(width_);
    for (const auto& b : blocks_) {
        if (b.kind == BlockKind::numeric)
            names.push_back(b.feature);
        else
            for (const auto& c : b.categories) names.push_back(b.feature + "=" + c);
    }
    return names;
}

std::size_t EncodingSchema::block_of(std::size_t col) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        if (col >= blocks_[i].offset && col < blocks_[i].offset + blocks_[i].width()) return i;
    throw Error("OutOfRange", "column " + std::to_string(col) + " beyond schema width");
}

std::vector<double> EncodingSchema::encode(const AttackRecord& record, TransformReport* report) const {
    std::vector<double> row(width_, 0.0);
    for (const auto& b : blocks_) {
        if (b.kind == BlockKind::numeric) {
            row[b.offset] = numeric_of(record, b.feature);
            continue;
        }
        for (const auto& c : categories_of(record, b.feature)) {
            auto it = std::lower_bound(b.categories.begin(), b.categories.end(), c);
            if (it != b.categories.end() && *it == c)
                row[b.offset + static_cast<std::size_t>(it - b.categories.begin())] = 1.0;
            else if (report)
                ++report->unseen[b.feature];
        }
    }
    return row;
}

DesignMatrix EncodingSchema::encode_all(const std::vector<AttackRecord>& records, TransformReport* report) const {
    DesignMatrix m(records.size(), width_);
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto row = encode(records[i], report);
        std::copy(row.begin(), row.end(), m.data.begin() + static_cast<std::ptrdiff_t>(i * width_));
    }
    return m;
}

json EncodingSchema::to_json() const {
    json arr = json::array();
    for (const auto& b : blocks_)
        arr.push_back({{"feature", b.feature}, {"kind", std::string(kind_name(b.kind))}, {"categories", b.categories}});
    return arr;
}

EncodingSchema EncodingSchema::from_json(const json& j) {
    if (!j.is_array()) throw Error("CorruptModel", "schema must be an array", ErrorKind::model);
    std::vector<FeatureBlock> blocks;
    for (const auto& e : j) {
        FeatureBlock b{e.at("feature").get<std::string>(), parse_kind(e.at("kind").get<std::string>()),
                       e.at("categories").get<std::vector<std::string>>(), 0};
        if (!std::is_sorted(b.categories.begin(), b.categories.end()))
            throw Error("CorruptModel", "categories of '" + b.feature + "' are not sorted", ErrorKind::model);
        blocks.push_back(std::move(b));
    }
    return EncodingSchema(std::move(blocks));
}

int target_label(const AttackRecord& record) { return record.safe ? 0 : 1; }

std::vector<int> target_labels(const std::vector<AttackRecord>& records) {
    std::vector<int> y;
    y.reserve(records.size());
    for (const auto& r : records) y.push_back(target_label(r));
    return y;
}

}  // namespace ransomrisk::forest
