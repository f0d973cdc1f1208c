#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace apm {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed expression source. Carries the byte offset of the failure.
struct ParseError : Error {
    ParseError(const std::string& message, std::size_t byte_offset)
        : Error(message + " (at byte " + std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
    std::size_t offset;
};

/// Invalid manifold description: bad schema, broken structural invariant,
/// unsupported dimension. Maps to CLI exit code 2.
struct SpecError : Error {
    using Error::Error;
};

/// Runtime numeric failure: domain error in an expression, degenerate
/// plane, eigenvector input where a noneigenvector is required, singular
/// metric. Maps to CLI exit code 3.
struct NumericError : Error {
    using Error::Error;
};

} // namespace apm
