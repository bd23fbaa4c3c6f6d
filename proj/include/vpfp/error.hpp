#pragma once

#include <stdexcept>
#include <string>

namespace vpfp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Short machine-readable category, used by the CLI error JSON.
    virtual const char* kind() const noexcept { return "error"; }
};

/// Invalid grid, initial data or argument.
class InvalidArgument : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "invalid_argument"; }
};

/// Charge with nonzero mean handed to the periodic Poisson solver.
class CompatibilityError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "compatibility"; }
};

/// Time step violates a stability bound of the sub-step it was passed to.
class CflViolation : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "cfl_violation"; }
};

/// NaN/Inf detected in the state.
class NumericalError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "numerical"; }
};

/// Configuration parse or validation failure. `path()` names the offending field.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& message)
        : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }
    const char* kind() const noexcept override { return "config"; }

private:
    std::string path_;
};

/// File could not be read or written, or its contents are malformed.
class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io"; }
};

}  // namespace vpfp
