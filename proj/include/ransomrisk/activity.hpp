#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ransomrisk/core/types.hpp"

namespace ransomrisk::activity {

/// Attacks per calendar month for one group, gap months explicit zeros.
struct MonthlySeries {
    std::string group;
    YearMonth start_month;
    std::vector<long> counts;

    YearMonth end_month() const { return start_month.plus(static_cast<long>(counts.size()) - 1); }
};

/// `lambda` weights the previous month's average; the current month gets
/// 1 - lambda. The recursion starts from a zero prior: V_0 = (1-lambda) x_0.
struct EwmaParams {
    double lambda = 0.2;

    /// Throws InvalidLambda outside [0, 1].
    void validate() const;
};

/// Keyed by adversary_name; each series spans the group's first to last
/// attack month.
std::map<std::string, MonthlySeries> bucket_by_month(const std::vector<AttackRecord>& attacks);

/// V_t for every month of the series. Throws EmptySeries.
std::vector<double> compute_ewma(const MonthlySeries& series, const EwmaParams& params);

/// Immutable per-group activity table.
class EwmaTable {
public:
    struct Entry {
        YearMonth start;
        std::vector<double> values;
    };

    EwmaTable() = default;
    EwmaTable(double lambda, std::map<std::string, Entry> groups);

    static EwmaTable build(const std::vector<AttackRecord>& attacks, const EwmaParams& params);

    /// Stored V inside the series, V_last * lambda^k k months past its end,
    /// 0 before its start. Group lookup is case-insensitive. Throws UnknownGroup.
    double ewma_at(std::string_view group, YearMonth month) const;

    bool contains(std::string_view group) const;
    double lambda() const { return lambda_; }
    const std::map<std::string, Entry>& groups() const { return groups_; }

    /// {"lambda": l, "groups": {name: [{"month": "YYYY-MM", "v": x}, ...]}}
    nlohmann::json to_json() const;
    static EwmaTable from_json(const nlohmann::json& j);

private:
    const Entry& lookup(std::string_view group) const;

    double lambda_ = 0.2;
    std::map<std::string, Entry> groups_;
};

/// Sets every record's ewma to its group's value at the attack month.
void stamp_ewma(std::vector<AttackRecord>& attacks, const EwmaTable& table);

}  // namespace ransomrisk::activity
