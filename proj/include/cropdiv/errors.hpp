#pragma once

#include <stdexcept>
#include <string>

namespace cropdiv {

// Malformed or unreadable input data (exit code 2 at the CLI).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Violated computational precondition or failed output write (exit code 3).
class ComputeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A unit with no cropland pixels has no defined diversity.
class UndefinedUnitError : public ComputeError {
public:
    UndefinedUnitError() : ComputeError("unit has no cropland pixels; diversity undefined") {}
    explicit UndefinedUnitError(const std::string& what) : ComputeError(what) {}
};

} // namespace cropdiv
