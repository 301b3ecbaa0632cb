#include "ransomrisk/core/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "ransomrisk/core/error.hpp"
#include "ransomrisk/core/json_io.hpp"

namespace ransomrisk {

namespace embedded {
extern const std::string_view countries_txt;
extern const std::string_view industry_sectors_txt;
extern const std::string_view org_types_txt;
extern const std::string_view sophistication_txt;
extern const std::string_view resource_levels_txt;
extern const std::string_view motives_txt;
extern const std::string_view intents_txt;
}  // namespace embedded

Vocabulary::Vocabulary(std::vector<std::string> values) : values_(std::move(values)) {
    for (const auto& v : values_) {
        if (!index_.insert(v).second) throw Error("DuplicateVocabularyEntry", v);
    }
}

Vocabulary Vocabulary::parse(std::string_view text) {
    std::vector<std::string> values;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto v = trim(line);
        if (!v.empty()) values.push_back(std::move(v));
    }
    return Vocabulary(std::move(values));
}

Vocabulary Vocabulary::load_file(const std::string& path) { return parse(read_file(path)); }

bool Vocabulary::contains(std::string_view value) const { return index_.find(value) != index_.end(); }

namespace vocab {

const Vocabulary& countries() {
    static const Vocabulary v = Vocabulary::parse(embedded::countries_txt);
    return v;
}
const Vocabulary& industry_sectors() {
    static const Vocabulary v = Vocabulary::parse(embedded::industry_sectors_txt);
    return v;
}
const Vocabulary& org_types() {
    static const Vocabulary v = Vocabulary::parse(embedded::org_types_txt);
    return v;
}
const Vocabulary& sophistication_levels() {
    static const Vocabulary v = Vocabulary::parse(embedded::sophistication_txt);
    return v;
}
const Vocabulary& resource_levels() {
    static const Vocabulary v = Vocabulary::parse(embedded::resource_levels_txt);
    return v;
}
const Vocabulary& motives() {
    static const Vocabulary v = Vocabulary::parse(embedded::motives_txt);
    return v;
}
const Vocabulary& intents() {
    static const Vocabulary v = Vocabulary::parse(embedded::intents_txt);
    return v;
}

}  // namespace vocab

std::string to_lower(std::string_view value) {
    std::string out(value);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view value) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t b = 0, e = value.size();
    while (b < e && is_space(value[b])) ++b;
    while (e > b && is_space(value[e - 1])) --e;
    return std::string(value.substr(b, e - b));
}

std::string normalize_token(std::string_view value) {
    std::string out = to_lower(trim(value));
    std::string folded;
    folded.reserve(out.size());
    for (char c : out) {
        if (c == ' ' || c == '_' || c == '\t') c = '-';
        if (c == '-' && !folded.empty() && folded.back() == '-') continue;
        folded.push_back(c);
    }
    return folded;
}

}  // namespace ransomrisk
