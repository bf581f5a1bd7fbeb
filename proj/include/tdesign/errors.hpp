#pragma once

#include <stdexcept>
#include <string>

namespace tdesign {

/// Malformed or out-of-contract input. Maps to CLI exit code 2.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A dense or matrix-free build would exceed the configured dimension guard. Exit code 3.
class DimensionGuardExceeded : public std::runtime_error {
public:
    DimensionGuardExceeded(std::size_t requested, std::size_t limit)
        : std::runtime_error("dimension " + std::to_string(requested) + " exceeds guard " +
                             std::to_string(limit)),
          requested_(requested), limit_(limit) {}

    std::size_t requested() const noexcept { return requested_; }
    std::size_t limit() const noexcept { return limit_; }

private:
    std::size_t requested_;
    std::size_t limit_;
};

/// Iterative solver hit its cap. Exit code 4; carries the best estimate.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double estimate, double residual)
        : std::runtime_error(what), estimate_(estimate), residual_(residual) {}

    double estimate() const noexcept { return estimate_; }
    double residual() const noexcept { return residual_; }

private:
    double estimate_;
    double residual_;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidInput(msg);
}

}  // namespace tdesign
