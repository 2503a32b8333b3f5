#pragma once

#include <stdexcept>
#include <string>

namespace faircomp {

enum class ErrorKind {
    InvalidArgument,  // contract violation: bad dimensions, bad settings
    Parse,            // malformed JSON / CSV input
    Infeasible,       // antenna placement or config violates a constraint
    Numerical,        // singular system, non-finite values
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what)
{
    if (!condition) fail(kind, what);
}

}  // namespace faircomp
