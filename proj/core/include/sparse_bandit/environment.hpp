#pragma once

#include <string_view>

#include "sparse_bandit/rng.hpp"
#include "sparse_bandit/run_record.hpp"
#include "sparse_bandit/types.hpp"

namespace sparse_bandit {

enum class NoiseKind {
  UniformSymmetric,  // η_k ~ U[-σ_k/2, σ_k/2]
  RademacherScaled,  // η_k = ±σ_k/2 with equal probability
};

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

/// Bounded, zero-mean, coordinate-independent noise.
struct NoiseModel {
  NoiseKind kind = NoiseKind::UniformSymmetric;
  Vector scale;  // σ; each draw satisfies |η_k| ≤ scale_k / 2

  static NoiseModel for_instance(const ProblemInstance& instance,
                                 NoiseKind kind = NoiseKind::UniformSymmetric);

  /// Draws a full K-dimensional noise vector.
  Vector draw(RngStream& rng) const;
};

/// r = ⟨arm, θ + η⟩ for a fresh η.
double pull(const ProblemInstance& instance, const ArmVector& arm,
            const NoiseModel& noise, RngStream& rng);

/// Performance of the oracle strategy that always plays θ/‖θ‖₂: n‖θ‖₂.
double optimal_performance(const ProblemInstance& instance, long n);

/// n‖θ‖₂ − Σ_t ⟨θ, x_t⟩. Throws StateError on an incomplete record.
double regret(const RunRecord& record, const ProblemInstance& instance);

struct RewardGap {
  double gap;    // Σ r_t − Σ ⟨θ, x_t⟩
  double bound;  // √(2 log(1/δ)) ‖σ‖₂ √n
};

RewardGap reward_sum_gap(const RunRecord& record,
                         const ProblemInstance& instance, double delta);

}  // namespace sparse_bandit
