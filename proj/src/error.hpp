#pragma once

#include <stdexcept>
#include <string>

namespace illpose {

enum class ErrorCode {
    invalid_argument = 1,
    precondition = 2,
    window_overflow = 3,
    bandwidth_overflow = 4,
    resolution = 5,
    non_convergence = 6,
    blowup = 7,
    config = 8,
    io = 9,
    infeasible = 10,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what)
{
    if (!cond) fail(code, what);
}

} // namespace illpose
