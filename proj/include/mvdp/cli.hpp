#pragma once

#include <iosfwd>

namespace mvdp::cli {

// Exit status: 0 success, 1 runtime or numeric failure, 2 usage or
// validation failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mvdp::cli
