#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mieq::cli {

inline constexpr const char* kSchemaVersion = "1.0";

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kDomain = 3,
  kIo = 4,
};

// Runs one command line (without the program name). Results go to `out`,
// diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mieq::cli
