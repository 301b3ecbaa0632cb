#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ransomrisk::forest {

struct RiskLevel {
    int level = 0;
    std::string_view label;
};

/// level = min(floor(confidence * 10), 9) with labels None .. Extremely High.
/// Throws OutOfRange for confidence outside [0, 1] or NaN.
RiskLevel risk_level(double confidence);

std::string_view risk_label(int level);

/// A scored (organization, group) pair.
struct RiskAssessment {
    std::string group;
    double confidence = 0;
    int level = 0;
    std::string label;
    std::vector<std::pair<std::string, double>> top_features;
};

}  // namespace ransomrisk::forest
