#pragma once

#include <stdexcept>
#include <string>

namespace prunesid {

enum class ErrorKind {
    invalid_input,  // non-finite values, malformed matrices
    parameter,      // out-of-range counts, budgets, thresholds
    format,         // bad TOKM header, ragged CSV, bad manifest
    io,             // missing or unwritable files
    guard,          // desk-scale limits on exhaustive oracles
    internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace prunesid
