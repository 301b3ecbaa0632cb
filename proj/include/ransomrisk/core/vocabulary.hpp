#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ransomrisk {

/// Closed set of accepted tokens, loaded from a one-value-per-line text
/// table. Blank lines and `#` comments are ignored.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> values);

    static Vocabulary parse(std::string_view text);
    static Vocabulary load_file(const std::string& path);

    bool contains(std::string_view value) const;
    const std::vector<std::string>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<std::string> values_;  // file order
    std::set<std::string, std::less<>> index_;
};

namespace vocab {

const Vocabulary& countries();
const Vocabulary& industry_sectors();
const Vocabulary& org_types();
const Vocabulary& sophistication_levels();
const Vocabulary& resource_levels();
const Vocabulary& motives();
const Vocabulary& intents();

}  // namespace vocab

/// Lowercase, trim, and fold spaces/underscores into hyphens.
std::string normalize_token(std::string_view value);
std::string to_lower(std::string_view value);
std::string trim(std::string_view value);

}  // namespace ransomrisk
