#pragma once

#include <stdexcept>
#include <string>

namespace credrisk {

// Error taxonomy. The CLI maps each family to an exit code.

/// Bad arguments, invalid configuration, violated preconditions.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data (files, labels, dimensions).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values produced during numeric work (overflow, divergence).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace credrisk
