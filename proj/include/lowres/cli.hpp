#pragma once

#include <iosfwd>

namespace lowres {

inline constexpr const char* kVersion = "0.1.0";

/// Entry point of the lowres-mimo tool. Returns 0 on success, 1 on a runtime
/// failure (or a failed gradient check), 2 on a usage or config error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace lowres
