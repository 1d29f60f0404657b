#pragma once

#include <stdexcept>
#include <string>

namespace fbw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A numeric argument is outside its permitted range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// An operation was called on an object in the wrong state (e.g. empty caches).
class StateError : public Error {
public:
    using Error::Error;
};

/// Inconsistent or unknown configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input file. Carries the byte offset where parsing failed.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Input has zero norm where a direction is required.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace fbw
