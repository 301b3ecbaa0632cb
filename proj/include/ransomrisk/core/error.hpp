#pragma once

#include <stdexcept>
#include <string>

namespace ransomrisk {

/// Broad error families. The CLI maps them onto exit codes.
enum class ErrorKind {
    usage,  // bad arguments or configuration
    data,   // malformed or inconsistent input data
    model,  // model file or training problems
};

/// Every failure raised by the library. `code()` carries the stable
/// condition name (e.g. "UnknownCountry") that callers and tests match on.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, ErrorKind kind = ErrorKind::data)
        : std::runtime_error(code + ": " + message), code_(std::move(code)), kind_(kind) {}

    const std::string& code() const noexcept { return code_; }
    ErrorKind kind() const noexcept { return kind_; }

private:
    std::string code_;
    ErrorKind kind_;
};

}  // namespace ransomrisk
