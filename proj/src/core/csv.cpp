#include "ransomrisk/core/csv.hpp"

#include "ransomrisk/core/error.hpp"

namespace ransomrisk::csv {

std::optional<std::vector<std::string>> Reader::next() {
    std::string line;
    // skip blank lines between rows
    do {
        if (!std::getline(in_, line)) return std::nullopt;
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
    } while (line.empty());
    row_line_ = line_;

    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
        if (i >= line.size()) {
            if (!quoted) break;
            std::string more;
            if (!std::getline(in_, more))
                throw Error("FormatError", "line " + std::to_string(row_line_) + ": unterminated quoted field");
            ++line_;
            if (!more.empty() && more.back() == '\r') more.pop_back();
            field.push_back('\n');
            line = std::move(more);
            i = 0;
            continue;
        }
        char c = line[i++];
        if (quoted) {
            if (c == '"') {
                if (i < line.size() && line[i] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    return out;
}

}  // namespace ransomrisk::csv
