#pragma once

#include <iosfwd>

namespace trustrec {

inline constexpr const char* kVersion = "0.1.0";

/// Entry point of the `trustrec` tool, callable in-process. Exit codes:
/// 0 success, 2 usage or input error, 1 internal error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trustrec
