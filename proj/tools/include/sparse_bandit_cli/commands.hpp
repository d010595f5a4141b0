#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sparse_bandit_cli/config.hpp"

namespace sparse_bandit::cli {

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kConfigError = 2 };

struct RunOptions {
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;  // applied in order after the file
  std::filesystem::path out_dir = "out";
  std::optional<std::string> tag;      // replaces the timestamp directory
  int jobs = 0;                        // 0: one per hardware thread
  bool trace = false;
};

const Schema& bandit_schema();
const Schema& gradient_schema();

/// File, then overrides, then defaults.
Config load_resolved(const RunOptions& options, const Schema& schema);

/// out/<run.name>/<tag or UTC timestamp>/
std::filesystem::path run_directory(const RunOptions& options, const Config& config);

int cmd_bandit(const RunOptions& options, std::ostream& log, std::ostream& err);
int cmd_gradient(const RunOptions& options, std::ostream& log, std::ostream& err);

struct SelftestOptions {
  /// Bisection tolerance handed to the ellipsoid solver; raising it is the
  /// injected fault the subproblem suite must catch.
  double subproblem_tolerance = 1e-12;
  int samples = 20000;
};

int cmd_selftest(const SelftestOptions& options, std::ostream& log);

}  // namespace sparse_bandit::cli
