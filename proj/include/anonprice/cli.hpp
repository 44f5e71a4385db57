#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace anonprice {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;    // infeasible or invalid input
inline constexpr int kExitInvariant = 2;  // a proven invariant failed numerically
inline constexpr int kExitUsage = 64;

// `args` excludes the program name. Reports go to `out` as one JSON object per
// line: {"value":..., "abs_err":..., "detail":{...}}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace anonprice
