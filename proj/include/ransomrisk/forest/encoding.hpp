#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ransomrisk/core/types.hpp"

namespace ransomrisk::forest {

/// Row-major dense matrix.
struct DesignMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    DesignMatrix() = default;
    DesignMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

enum class BlockKind { one_hot, multi_label, numeric };

/// A contiguous run of columns produced from one record feature.
struct FeatureBlock {
    std::string feature;                  // e.g. "country", "sectors", "revenue"
    BlockKind kind = BlockKind::numeric;
    std::vector<std::string> categories;  // frozen at fit time, sorted; empty for numeric
    std::size_t offset = 0;

    std::size_t width() const { return kind == BlockKind::numeric ? 1 : categories.size(); }
    bool operator==(const FeatureBlock&) const = default;
};

/// Categories seen at transform time that were unknown at fit time, per feature.
struct TransformReport {
    std::map<std::string, std::size_t> unseen;
    std::size_t total() const;
};

/// Frozen record → numeric row mapping. Column order: country, sectors,
/// org_type, revenue, employees, ewma, sophistication, motive, intent,
/// resource_level, capability_count.
class EncodingSchema {
public:
    EncodingSchema() = default;
    explicit EncodingSchema(std::vector<FeatureBlock> blocks);

    /// Throws EmptyDataset.
    static EncodingSchema fit(const std::vector<AttackRecord>& records);

    std::size_t width() const { return width_; }
    const std::vector<FeatureBlock>& blocks() const { return blocks_; }
    /// "country=US", "sectors=automotive", "revenue", ...
    std::vector<std::string> column_names() const;
    /// Index into blocks() owning column `col`.
    std::size_t block_of(std::size_t col) const;

    /// Unknown categories encode to an all-zero block and are tallied in `report`.
    std::vector<double> encode(const AttackRecord& record, TransformReport* report = nullptr) const;
    DesignMatrix encode_all(const std::vector<AttackRecord>& records, TransformReport* report = nullptr) const;

    nlohmann::json to_json() const;
    static EncodingSchema from_json(const nlohmann::json& j);

    bool operator==(const EncodingSchema&) const = default;

private:
    std::vector<FeatureBlock> blocks_;
    std::size_t width_ = 0;
};

/// 1 for targeted (unsafe) records, 0 for safe ones.
int target_label(const AttackRecord& record);
std::vector<int> target_labels(const std::vector<AttackRecord>& records);

}  // namespace ransomrisk::forest
