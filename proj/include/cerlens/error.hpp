#pragma once

#include <stdexcept>
#include <string>

namespace cerlens {

/// Base of every error thrown by the library. Callers that only need a
/// message can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data is absent or cannot be read (maps to CLI exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

/// A program or trace could not be analyzed (maps to CLI exit code 4).
class AnalysisError : public Error {
public:
    using Error::Error;
};

}  // namespace cerlens
