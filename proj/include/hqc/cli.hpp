#pragma once

#include <iosfwd>

namespace hqc {

inline constexpr const char* version = "0.1.0";

/// Entry point of the hqc tool. Returns 0 on success (including refuted
/// checks), 1 on computational errors and 2 on input errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hqc
