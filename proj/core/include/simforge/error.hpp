#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace simforge {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad arity, empty list, p < 1, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The quantity is mathematically undefined for the given input
/// (zero-norm cosine, zero-count NGD, zero variance).
class UndefinedValue : public Error {
public:
    using Error::Error;
};

/// Malformed file content. line() is 1-based; 0 when not line-oriented.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace simforge
