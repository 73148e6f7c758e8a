#pragma once

#include <iosfwd>

namespace rprv::cli {

inline constexpr int kSuccess = 0;
inline constexpr int kInfeasible = 2;
inline constexpr int kInputError = 3;

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rprv::cli
