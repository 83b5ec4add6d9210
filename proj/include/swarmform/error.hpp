#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swarmform {

enum class ErrorKind {
    InvalidArgument,
    DegenerateInput,
    PoleError,
    NumericDivergence,
    IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::PoleError: return "pole-error";
    case ErrorKind::NumericDivergence: return "numeric-divergence";
    case ErrorKind::IoError: return "io-error";
    }
    return "unknown";
}

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised for pole inputs; carries the offending agent when known (-1 otherwise).
class PoleError : public Error {
public:
    explicit PoleError(const std::string& what, int agent_id = -1)
        : Error(ErrorKind::PoleError, what), agent_id_(agent_id) {}

    int agent_id() const noexcept { return agent_id_; }

private:
    int agent_id_;
};

/// Raised by the simulator when a non-finite value shows up.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, long tick)
        : Error(ErrorKind::NumericDivergence, what), tick_(tick) {}

    long tick() const noexcept { return tick_; }

private:
    long tick_;
};

} // namespace swarmform
