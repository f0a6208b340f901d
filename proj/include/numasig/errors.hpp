#pragma once

#include <stdexcept>
#include <string>

namespace numasig {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a model invariant (bad socket index, fractions out of range...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Inputs are well formed but unsuitable for the requested operation.
class InputError : public Error {
public:
    using Error::Error;
};

/// Counter data cannot be turned into a signature.
class ExtractionError : public Error {
public:
    using Error::Error;
};

/// Malformed file content. The message always carries a location
/// ("line N" for CSV, a JSON path for JSON documents).
class ParseError : public Error {
public:
    ParseError(std::string location, const std::string& what)
        : Error(location + ": " + what), location_(std::move(location)) {}

    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

}  // namespace numasig
