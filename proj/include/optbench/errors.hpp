#pragma once

#include <stdexcept>
#include <string>

namespace optbench {

/// Bad or unresolvable configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed, missing, or invariant-violating input data (CLI exit code 3).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical estimation failure: non-convergence, degenerate optimum,
/// singular design (CLI exit code 4).
class EstimationError : public std::runtime_error {
public:
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace optbench
