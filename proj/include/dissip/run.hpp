#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dissip/config.hpp"

namespace dissip {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 2;  // a verdict came out negative
inline constexpr int kExitInternal = 3;  // error or failed invariant

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> records;  // one JSON object per line, keys sorted
  std::string failing;               // name of the first record that set a nonzero exit code
};

/// Runs the configured pipeline. Plot data goes to config.output.plot_dir when set.
RunOutcome run(const RunConfig& config);

/// Runs and writes the records to config.output.report, or to `fallback` when unset.
int run_and_write(const RunConfig& config, std::ostream& fallback, std::ostream& err);

}  // namespace dissip
