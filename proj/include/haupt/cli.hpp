#pragma once

// Command-line front end. Exit status: 0 pass, 1 verification failure,
// 2 usage or validation error, 3 precision starvation.

#include <iosfwd>

namespace haupt::cli {

enum ExitCode : int {
  kPass = 0,
  kVerificationFailure = 1,
  kUsage = 2,
  kPrecision = 3,
};

/// Default known_through for text output when --prec is absent.
inline constexpr long kDefaultTextPrecision = 20;

/// Parses argv and runs one subcommand (qexp, serre, mlde, certify).
/// HAUPTMODUL_CACHE_DIR, when set, enables the on-disk Eisenstein cache.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace haupt::cli
