#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace walklab::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kValidation = 2,
  kNumeric = 3,
  kSearch = 4,
};

// Runs one subcommand. args excludes the program name. Table output goes to
// --out when given (written atomically), otherwise to out; the one-line
// summary goes to out when --out is given and to err otherwise.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "a:b:step" (inclusive of b up to rounding), "a,b,c" or a single number.
std::vector<double> parse_range(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

}  // namespace walklab::cli
