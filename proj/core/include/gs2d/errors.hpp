#pragma once

#include <stdexcept>
#include <string>

namespace gs2d {

/// Bad user-facing configuration (grid parameters, model parameters,
/// config-file syntax). Carries the offending key and 1-based line
/// number when they are known (-1 otherwise).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg, std::string key = {}, int line = -1)
        : std::runtime_error(msg), key_(std::move(key)), line_(line) {}
    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

/// A state with a zero-mass component where positive mass is required.
class DegenerateStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Nonlinearity overflow guard: the exponent argument left the safe
/// double range. Flow code catches this and shrinks the step.
class OverflowError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// Fiber-derivative scan found no +/- sign change on the scan interval.
class NoMaximizerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fiber-derivative scan found more than one sign change; the model
/// numerically violates the strict-concavity structure the projection
/// relies on. Surfaced, never silently resolved.
class NonUniqueMaximizerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pohozaev projection failed to reach its residual tolerance.
class ProjectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mountain-pass path endpoints violate their sign conditions.
class InvalidPathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gs2d
