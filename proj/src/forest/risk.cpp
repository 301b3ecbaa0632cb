#include "ransomrisk/forest/risk.hpp"

#include <array>
#include <cmath>

#include "ransomrisk/core/error.hpp"

namespace ransomrisk::forest {

namespace {
constexpr std::array<std::string_view, 10> kLabels = {
    "None", "Minimal", "Very Low", "Low", "Moderately Low",
    "Moderate", "Moderately High", "High", "Very High", "Extremely High"};
}

std::string_view risk_label(int level) {
    if (level < 0 || level > 9) throw Error("OutOfRange", "risk level " + std::to_string(level) + " outside 0..9");
    return kLabels[static_cast<std::size_t>(level)];
}

RiskLevel risk_level(double confidence) {
    if (!(confidence >= 0.0 && confidence <= 1.0))
        throw Error("OutOfRange", "confidence must lie in [0, 1]");
    const int level = std::min(static_cast<int>(std::floor(confidence * 10.0)), 9);
    return {level, kLabels[static_cast<std::size_t>(level)]};
}

}  // namespace ransomrisk::forest
