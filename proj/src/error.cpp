#include "cardioquant/error.hpp"

namespace cq {

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind)
{
}

const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::format: return "format";
    case ErrorKind::shape: return "shape";
    case ErrorKind::empty: return "empty";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::numeric: return "numeric";
    }
    return "unknown";
}

void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

}  // namespace cq
