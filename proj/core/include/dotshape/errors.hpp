#pragma once

#include <stdexcept>
#include <string>

namespace dotshape {

/// Invalid or inconsistent configuration input; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure during a run (CFL violation, non-finite state);
/// maps to CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dotshape
