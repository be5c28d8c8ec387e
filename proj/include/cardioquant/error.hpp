#pragma once

#include <stdexcept>
#include <string>

namespace cq {

// Failure classes. The CLI maps these onto its exit codes.
enum class ErrorKind {
    format,            // unreadable or malformed input
    shape,             // dimension / length mismatch between inputs
    empty,             // required non-empty input was empty
    invalid_argument,  // parameter outside its domain
    numeric,           // non-finite value where a finite one is required
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what)
{
    if (!cond) fail(kind, what);
}

}  // namespace cq
