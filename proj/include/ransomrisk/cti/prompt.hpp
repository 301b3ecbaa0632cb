#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ransomrisk/cti/feature_spec.hpp"

namespace ransomrisk::cti {

/// Renders every feature section in order (name, intent, guidance,
/// sample→answer pairs, numbered process steps, standard), the JSON
/// answer contract, then the document once. Throws EmptyBundle / EmptyDocument.
std::string compile_prompt(const std::vector<FeatureSpec>& specs, std::string_view document);

/// Rough token count: characters / 4, rounded up. A heuristic, not a tokenizer.
std::size_t estimate_tokens(std::string_view text);

/// Request sent after a length-truncated reply: the original prompt, the
/// output so far, and an instruction to resume exactly where it stopped.
std::string continuation_prompt(std::string_view prompt, std::string_view partial_output);

}  // namespace ransomrisk::cti
