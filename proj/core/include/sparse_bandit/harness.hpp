#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparse_bandit/environment.hpp"
#include "sparse_bandit/rng.hpp"
#include "sparse_bandit/types.hpp"

namespace sparse_bandit {

enum class Algorithm { Slucb, Cb2Full, Cb2OracleSupport, Random };

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

enum class ThetaPattern {
  Equal,     // S equal magnitudes
  Decaying,  // magnitudes ∝ 1/j, j = 1..S
};

std::string_view to_string(ThetaPattern pattern);
ThetaPattern parse_theta_pattern(std::string_view name);

/// Grid over (K, n, S, algorithm); every other field is shared by all cells.
struct ExperimentSpec {
  std::string name = "experiment";
  std::vector<std::size_t> K;
  std::vector<long> n;
  std::vector<std::size_t> S;
  std::vector<Algorithm> algorithms{Algorithm::Slucb};
  double theta_norm = 1.0;
  ThetaPattern pattern = ThetaPattern::Equal;
  double sigma_scale = 0.0;  // σ_k for every coordinate
  NoiseKind noise = NoiseKind::UniformSymmetric;
  double delta = 0.01;
  /// Upper bounds given to SL-UCB; unset means the true ‖θ‖₂ / ‖σ‖₂.
  std::optional<double> theta2_bar;
  std::optional<double> sigma2_bar;
  long seeds = 1;
  std::uint64_t base_seed = 1;
  int jobs = 1;

  void validate() const;
};

struct Cell {
  std::size_t K = 0;
  long n = 0;
  std::size_t S = 0;
  Algorithm algorithm = Algorithm::Slucb;

  /// "alg=slucb;K=100;n=1000;S=2".
  std::string id() const;
};

/// Cells of the grid in canonical order (algorithm, K, n, S), independent of
/// the order in which ExperimentSpec lists values.
std::vector<Cell> expand_grid(const ExperimentSpec& spec);

/// Stable key of a cell (independent of grid position).
std::uint64_t cell_key(const ExperimentSpec& spec, const Cell& cell);

/// θ for replication `replication` of `cell`: S coordinates at seeded random
/// positions carrying the configured magnitude pattern, ‖θ‖₂ = theta_norm.
/// The instance does not depend on the algorithm, so algorithms are compared
/// on identical problems.
ProblemInstance make_instance(const ExperimentSpec& spec, const Cell& cell,
                              long replication);

struct ReplicationResult {
  std::string cell_id;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::Slucb;
  std::size_t K = 0;
  long n = 0;
  std::size_t S = 0;
  double regret = 0.0;
  std::optional<long> exploration_length;
  std::optional<std::size_t> active_size;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<bool> xi_holds;
  /// SL-UCB only: 𝒜 ⊆ supp(θ), and T within phase_bounds.
  std::optional<bool> active_in_support;
  std::optional<bool> length_within_bounds;
  std::optional<bool> length_above_min;
  std::optional<bool> length_below_max;
  std::optional<double> theorem_bound;
};

/// One seeded replication of one cell.
ReplicationResult run_replication(const ExperimentSpec& spec, const Cell& cell,
                                  long replication);

struct Quantiles {
  double q10 = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
};

struct AggregateStats {
  std::string cell_id;
  Cell cell;
  long count = 0;
  long failures = 0;
  std::string failure;  // first diagnostic when failures > 0
  double mean_regret = 0.0;
  double stddev_regret = 0.0;
  double stderr_regret = 0.0;
  Quantiles regret_quantiles;
  std::optional<double> mean_exploration_length;
  std::optional<double> mean_precision;
  std::optional<double> mean_recall;
  std::optional<double> xi_frequency;
};

/// Order-independent reduction of one cell's replications.
AggregateStats aggregate(const Cell& cell,
                         const std::vector<ReplicationResult>& results);

struct ExperimentResult {
  std::vector<ReplicationResult> raw;  // canonical (cell, replication) order
  std::vector<AggregateStats> cells;   // canonical cell order
};

/// Runs every replication of every cell on `spec.jobs` worker threads. A
/// throwing replication marks its whole cell as failed; other cells proceed.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Least-squares slope of log(regret) against log(n). Nonpositive points
/// are dropped with a warning on stderr; fewer than 3 usable points throw
/// InputError.
double fit_scaling_exponent(const std::vector<std::pair<double, double>>& points);

struct SupportMetrics {
  double precision = 1.0;  // |𝒜 ∩ supp θ| / |𝒜|
  double recall = 1.0;     // |𝒜 ∩ A_min| / |A_min|
};

SupportMetrics support_metrics(const Support& active,
                               const ProblemInstance& instance, double b,
                               long n);

/// cell_id,seed,algorithm,K,n,S,regret,T,A_size,precision,recall,xi_holds
void write_raw_csv(std::ostream& out,
                   const std::vector<ReplicationResult>& results);
void write_aggregate_csv(std::ostream& out,
                         const std::vector<AggregateStats>& stats);
/// Writes `<dir>/<experiment>/<curve>.dat` with one "x y" pair per line.
void write_plot_data(const std::filesystem::path& dir,
                     const std::string& experiment, const std::string& curve,
                     const std::vector<std::pair<double, double>>& points);

}  // namespace sparse_bandit
