#pragma once

#include <stdexcept>
#include <string>

namespace nudge {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or inconsistent arguments (CLI exit code 1).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failure during a run, e.g. a non-finite state (CLI exit code 2).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// File-system failure; the message carries the offending path (CLI exit code 3).
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace nudge
