#include "ransomrisk/activity.hpp"

#include <algorithm>
#include <cmath>

#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/vocabulary.hpp"

namespace ransomrisk::activity {

using nlohmann::json;

void EwmaParams::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("InvalidLambda", "lambda must lie in [0, 1]", ErrorKind::usage);
}

std::map<std::string, MonthlySeries> bucket_by_month(const std::vector<AttackRecord>& attacks) {
    std::map<std::string, std::vector<long>> months;
    for (const auto& a : attacks) months[a.adversary_name].push_back(YearMonth::of(a.attack_date).index());

    std::map<std::string, MonthlySeries> out;
    for (auto& [group, idx] : months) {
        auto [lo, hi] = std::minmax_element(idx.begin(), idx.end());
        MonthlySeries s{group, YearMonth::from_index(*lo), std::vector<long>(static_cast<std::size_t>(*hi - *lo + 1), 0)};
        for (long m : idx) ++s.counts[static_cast<std::size_t>(m - *lo)];
        out.emplace(group, std::move(s));
    }
    return out;
}

std::vector<double> compute_ewma(const MonthlySeries& series, const EwmaParams& params) {
    params.validate();
    if (series.counts.empty()) throw Error("EmptySeries", "no months for group '" + series.group + "'");
    const double lambda = params.lambda;
    std::vector<double> v;
    v.reserve(series.counts.size());
    double prev = 0.0;
    for (long x : series.counts) {
        if (x < 0) throw Error("NegativeCount", "monthly attack count below zero");
        prev = lambda * prev + (1.0 - lambda) * static_cast<double>(x);
        v.push_back(prev);
    }
    return v;
}

EwmaTable::EwmaTable(double lambda, std::map<std::string, Entry> groups) : lambda_(lambda) {
    EwmaParams{lambda}.validate();
    for (auto& [name, entry] : groups) {
        if (entry.values.empty()) throw Error("EmptySeries", "no months for group '" + name + "'");
        groups_.emplace(name, std::move(entry));
    }
}

EwmaTable EwmaTable::build(const std::vector<AttackRecord>& attacks, const EwmaParams& params) {
    std::map<std::string, Entry> groups;
    for (const auto& [name, series] : bucket_by_month(attacks))
        groups.emplace(name, Entry{series.start_month, compute_ewma(series, params)});
    return EwmaTable(params.lambda, std::move(groups));
}

const EwmaTable::Entry& EwmaTable::lookup(std::string_view group) const {
    if (auto it = groups_.find(std::string(group)); it != groups_.end()) return it->second;
    const auto needle = to_lower(trim(group));
    for (const auto& [name, entry] : groups_)
        if (to_lower(name) == needle) return entry;
    throw Error("UnknownGroup", "no activity series for '" + std::string(group) + "'");
}

bool EwmaTable::contains(std::string_view group) const {
    try {
        lookup(group);
        return true;
    } catch (const Error&) {
        return false;
    }
}

double EwmaTable::ewma_at(std::string_view group, YearMonth month) const {
    const auto& e = lookup(group);
    const long offset = month.index() - e.start.index();
    if (offset < 0) return 0.0;
    const long last = static_cast<long>(e.values.size()) - 1;
    if (offset <= last) return e.values[static_cast<std::size_t>(offset)];
    return e.values.back() * std::pow(lambda_, static_cast<double>(offset - last));
}

json EwmaTable::to_json() const {
    json groups = json::object();
    for (const auto& [name, e] : groups_) {
        json arr = json::array();
        for (std::size_t i = 0; i < e.values.size(); ++i)
            arr.push_back({{"month", e.start.plus(static_cast<long>(i)).to_string()}, {"v", e.values[i]}});
        groups[name] = std::move(arr);
    }
    return {{"lambda", lambda_}, {"groups", groups}};
}

EwmaTable EwmaTable::from_json(const json& j) {
    try {
        std::map<std::string, Entry> groups;
        for (const auto& [name, arr] : j.at("groups").items()) {
            Entry e;
            bool first = true;
            for (const auto& point : arr) {
                auto month = parse_year_month_or_throw(point.at("month").get<std::string>());
                if (first) {
                    e.start = month;
                    first = false;
                } else if (month.index() != e.start.index() + static_cast<long>(e.values.size())) {
                    throw Error("FormatError", "months of '" + name + "' are not contiguous");
                }
                double v = point.at("v").get<double>();
                if (!std::isfinite(v) || v < 0) throw Error("FormatError", "negative activity for '" + name + "'");
                e.values.push_back(v);
            }
            groups.emplace(name, std::move(e));
        }
        return EwmaTable(j.at("lambda").get<double>(), std::move(groups));
    } catch (const json::exception& e) {
        throw Error("FormatError", std::string("activity table: ") + e.what());
    }
}

void stamp_ewma(std::vector<AttackRecord>& attacks, const EwmaTable& table) {
    for (auto& a : attacks) a.stamp_ewma(table.ewma_at(a.adversary_name, YearMonth::of(a.attack_date)));
}

}  // namespace ransomrisk::activity
