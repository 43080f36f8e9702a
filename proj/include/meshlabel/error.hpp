#pragma once

#include <stdexcept>
#include <string>

namespace meshlabel {

/// Base class for all library errors. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed, missing, or inconsistent data (exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

/// Numerical failure such as eigensolver non-convergence (exit code 4).
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace meshlabel
