#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fracpol {

struct CliOptions {
  std::string subcommand;  // solve, sweep-t, sweep-rot, fk-check, props
  std::string configPath;
  std::string outDir;
  std::vector<std::string> overrides;
  bool dumpMask = false;
};

/// Exit codes: 0 success, 1 violated/inconclusive verdict or property
/// failure, 2 config or I/O error, 3 solver did not converge.
int run(const CliOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace fracpol
