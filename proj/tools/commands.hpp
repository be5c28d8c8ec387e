#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cq::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kSelfcheckFailed = 1;
inline constexpr int kFormat = 2;
inline constexpr int kShape = 3;
inline constexpr int kEmpty = 4;

// `args` excludes the program name. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_digest(const std::string& path);

}  // namespace cq::cli
