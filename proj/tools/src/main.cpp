#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sparse_bandit_cli/commands.hpp"

namespace cli = sparse_bandit::cli;

namespace {

void add_run_flags(CLI::App* cmd, cli::RunOptions& o) {
  cmd->add_option_function<std::string>(
      "--config", [&o](const std::string& p) { o.config_path = p; },
      "key=value config file");
  cmd->add_option("--set", o.overrides, "override one key, key=value (repeatable)")
      ->take_all()
      ->allow_extra_args(false);
  cmd->add_option("--out", o.out_dir, "output root")->capture_default_str();
  cmd->add_option_function<std::string>(
      "--tag", [&o](const std::string& t) { o.tag = t; },
      "run directory name instead of a timestamp");
  cmd->add_option("--jobs", o.jobs, "worker threads (0: all cores)")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse linear bandit experiments"};
  app.require_subcommand(1);

  cli::RunOptions run;
  cli::SelftestOptions self;

  auto* bandit = app.add_subcommand("bandit", "run a bandit experiment grid");
  add_run_flags(bandit, run);
  bandit->footer(cli::describe(cli::bandit_schema()));

  auto* gradient = app.add_subcommand("gradient", "run the gradient ascent comparison");
  add_run_flags(gradient, run);
  gradient->add_flag("--trace", run.trace, "write per-step trajectories of one replication");
  gradient->footer(cli::describe(cli::gradient_schema()));

  auto* selftest = app.add_subcommand("selftest", "run the oracle self-checks");
  selftest->add_option("--subproblem-tolerance", self.subproblem_tolerance,
                       "ellipsoid solver tolerance (fault injection)")
      ->capture_default_str();
  selftest->add_option("--samples", self.samples, "random boundary samples per ellipsoid")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kOk : cli::kConfigError;
  }

  if (bandit->parsed()) return cli::cmd_bandit(run, std::cout, std::cerr);
  if (gradient->parsed()) return cli::cmd_gradient(run, std::cout, std::cerr);
  return cli::cmd_selftest(self, std::cout);
}
