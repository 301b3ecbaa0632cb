#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ransomrisk::csv {

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// newlines. `line_no` is the physical line a row started on (1-based).
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Next row, or nullopt at end of input. Throws Error("FormatError") on
    /// an unterminated quote.
    std::optional<std::vector<std::string>> next();
    std::size_t line_no() const { return row_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
    std::size_t row_line_ = 0;
};

/// Quotes a field when it contains a separator, quote or newline.
std::string escape(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

}  // namespace ransomrisk::csv
