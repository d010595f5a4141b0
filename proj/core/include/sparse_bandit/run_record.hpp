#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparse_bandit/types.hpp"

namespace sparse_bandit {

enum class Phase { Explore, Exploit, Baseline };

std::string_view to_string(Phase phase);

struct Round {
  long t = 0;  // 1-based
  Phase phase = Phase::Baseline;
  double reward = 0.0;
  double inst_perf = 0.0;  // ⟨θ, x_t⟩
  double arm_norm = 0.0;
};

struct RunMetadata {
  std::uint64_t seed = 0;
  long n = 0;
  std::string algorithm;
  std::uint64_t instance_digest = 0;
  std::optional<long> exploration_length;   // T, SL-UCB only
  std::optional<Support> active_set;        // 𝒜, SL-UCB only
};

/// Per-round log of one seeded run.
class RunRecord {
 public:
  /// Arms are kept only when `dim <= kMaxStoredArmDim`.
  static constexpr std::size_t kMaxStoredArmDim = 64;

  RunRecord() = default;
  RunRecord(RunMetadata meta, std::size_t dim);

  const RunMetadata& meta() const { return meta_; }
  RunMetadata& meta() { return meta_; }

  void append(Phase phase, const Vector& arm, double reward, double inst_perf);

  const std::vector<Round>& rounds() const { return rounds_; }
  std::size_t size() const { return rounds_.size(); }
  bool complete() const {
    return static_cast<long>(rounds_.size()) == meta_.n;
  }
  bool has_arms() const { return store_arms_; }
  /// Arm of round index i (0-based). Requires has_arms().
  const Vector& arm(std::size_t i) const;

  /// L_n = Σ ⟨θ, x_t⟩.
  double performance() const;
  double reward_sum() const;

 private:
  RunMetadata meta_;
  std::size_t dim_ = 0;
  bool store_arms_ = false;
  std::vector<Round> rounds_;
  std::vector<Vector> arms_;
};

/// Columns: t,phase,reward,inst_perf,cum_perf,cum_regret,arm_norm.
/// cum_regret uses `theta_norm` (ground truth).
void write_run_csv(std::ostream& out, const RunRecord& record,
                   double theta_norm);

/// One line per round: t followed by the arm coordinates.
void write_arm_sidecar(std::ostream& out, const RunRecord& record);

/// key=value metadata block (seed, n, algorithm, digest, T, active_set).
void write_run_metadata(std::ostream& out, const RunRecord& record);

}  // namespace sparse_bandit
