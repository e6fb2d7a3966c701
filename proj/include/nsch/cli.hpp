#pragma once

#include <iosfwd>

namespace nsch {

enum ExitCode : int { kExitOk = 0, kExitNumerical = 1, kExitConfig = 2 };

/// `nsch simulate|optimize|verify [checks...] --config <path> [--out <dir>] [--seed <u64>]`.
/// Returns 0 on success, 1 on numerical failure (including failed checks),
/// 2 on configuration errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nsch
