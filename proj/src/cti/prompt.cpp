#include "ransomrisk/cti/prompt.hpp"

#include <sstream>

#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/vocabulary.hpp"

namespace ransomrisk::cti {

std::string compile_prompt(const std::vector<FeatureSpec>& specs, std::string_view document) {
    if (specs.empty()) throw Error("EmptyBundle", "no feature specs to compile", ErrorKind::usage);
    if (trim(document).empty()) throw Error("EmptyDocument", "report text is empty");

    std::ostringstream out;
    out << "You are a cyber threat intelligence analyst. Extract the features described below "
           "from the threat report at the end of this message.\n";
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        out << "\n## Feature " << (i + 1) << ": " << s.name << "\n";
        out << "Intent: " << s.intent << "\n";
        if (!s.guidance.empty()) out << "Guidance: " << s.guidance << "\n";
        if (!s.examples.empty()) {
            out << "Examples:\n";
            for (const auto& ex : s.examples) {
                out << "- Sample: " << ex.sample << "\n";
                out << "  Answer: " << ex.answer.dump() << "\n";
            }
        }
        if (!s.process.empty()) {
            out << "Process:\n";
            for (std::size_t k = 0; k < s.process.size(); ++k) out << (k + 1) << ". " << s.process[k] << "\n";
        }
        out << "Standard: " << s.standard << "\n";
    }
    out << "\n## Response format\n"
           "Think through each feature step by step before answering. Reply with a single JSON object "
           "mapping each feature name to an object {\"value\": <answer>, \"rationale\": <string>}. "
           "The rationale explains which passages of the report support the value. "
           "Use a list for multi-valued features and null when the report gives no evidence. "
           "Do not add any text outside the JSON object.\n";
    out << "\n## Report\n" << document << "\n";
    return out.str();
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::string continuation_prompt(std::string_view prompt, std::string_view partial_output) {
    std::string out;
    out.reserve(prompt.size() + partial_output.size() + 200);
    out += prompt;
    out += "\n## Partial response\n";
    out += partial_output;
    out += "\n## Instruction\nYour previous response was cut off. Continue exactly where you stopped. "
           "Do not repeat any text already produced and do not restart the JSON object.\n";
    return out;
}

}  // namespace ransomrisk::cti
