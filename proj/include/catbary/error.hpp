#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace catbary {

enum class ErrorCode {
    invalid_input,
    numeric_domain,
    no_unique_geodesic,
    infeasible_triangle,
    convexity_violation,
    diameter_bound,
    non_convergence,
    unsupported,
    hypothesis_violation,
    uncovered_point,
    not_applicable,
    insufficient_cover,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// front ends can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

// Literal messages are only materialized on failure; hot paths rely on this.
inline void require(bool condition, ErrorCode code, const char* message) {
    if (!condition) fail(code, message);
}

} // namespace catbary
