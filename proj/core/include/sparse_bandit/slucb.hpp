#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sparse_bandit/cb2.hpp"
#include "sparse_bandit/environment.hpp"
#include "sparse_bandit/rng.hpp"
#include "sparse_bandit/run_record.hpp"
#include "sparse_bandit/types.hpp"

namespace sparse_bandit {

struct SlucbConfig {
  double sigma2_bar = 0.0;  // upper bound on ‖σ‖₂
  double theta2_bar = 0.0;  // upper bound on ‖θ‖₂
  double delta = 0.01;
  long n = 0;

  void validate() const;
};

/// b = (θ̄₂ + σ̄₂) √(2 log(2K/δ)).
double exploration_threshold(const SlucbConfig& config, std::size_t K);

/// Uniform draw from (1/√K){−1, +1}^K.
Vector sample_exploring_arm(std::size_t K, RngStream& rng);

/// Running sums of the support-exploration estimator
/// θ̂_{k,t} = (K/t) Σ_{i≤t} x_{k,i} r_i.
class SupportExplorationState {
 public:
  SupportExplorationState() = default;
  explicit SupportExplorationState(std::size_t K);

  std::size_t dim() const { return static_cast<std::size_t>(sums_.size()); }
  long t() const { return t_; }
  const Vector& sums() const { return sums_; }
  /// (K/t)·sums; zero vector before the first round.
  Vector theta_hat() const;
  /// max_k |θ̂_{k,t}|.
  double max_abs_estimate() const;

  void add(const Vector& arm, double reward);

 private:
  Vector sums_;
  long t_ = 0;
};

SupportExplorationState update_estimate(SupportExplorationState state,
                                        const Vector& arm, double reward);

/// Stop once (i) max|θ̂| − 2b/√t ≥ 0 and (ii) t ≥ √n / (max|θ̂| − b/√t),
/// with (ii) only evaluated when (i) holds; always stops at t = n.
bool should_stop(double max_abs_estimate, long t, double b, long n);
bool should_stop(const SupportExplorationState& state, double b, long n);

/// {k : |θ̂_k| ≥ 2b/√T}.
Support active_set(const Vector& theta_hat, double b, long T);

struct PhaseBounds {
  double t_min;  // b²√n / ‖θ‖₂
  double t_max;  // 9√S b²√n / ‖θ‖₂
};

/// Diagnostic bounds on the exploration length; needs the true ‖θ‖₂.
/// Throws InputError when theta_l2 ≤ 0.
PhaseBounds phase_bounds(double b, double theta_l2, std::size_t S, long n);

/// 118 (θ̄₂ + σ̄₂)² log(2K/δ) S √n.
double theorem2_bound(double theta2_bar, double sigma2_bar, std::size_t K,
                      double delta, std::size_t S, long n);

/// 3b√‖θ‖₂ / n^{1/4}: coordinates at least this large are guaranteed to be
/// recovered on the concentration event.
double recovery_threshold(double b, double theta_l2, long n);

/// {k : |θ_k| ≥ recovery_threshold(b, ‖θ‖₂, n)}.
Support guaranteed_support(const ProblemInstance& instance, double b, long n);

/// Tracks the event ‖θ − θ̂_t‖_∞ ≤ b/√t over a phase-1 trajectory.
class ConcentrationMonitor {
 public:
  ConcentrationMonitor(const ProblemInstance& instance, double b);

  void observe(const SupportExplorationState& state);
  bool holds() const { return holds_; }
  /// Largest observed √t‖θ − θ̂_t‖_∞ / b (≤ 1 iff the event holds).
  double worst_ratio() const { return worst_ratio_; }

 private:
  Vector theta_;
  double b_;
  bool holds_ = true;
  double worst_ratio_ = 0.0;
};

/// `trajectory[i]` is θ̂ after round i + 1.
bool concentration_check(const ProblemInstance& instance,
                         std::span<const Vector> trajectory, double b);

/// Stepwise SL-UCB: support exploration with random sign arms, then
/// ConfidenceBall₂ on the coordinates of the active set.
class SlucbPolicy {
 public:
  SlucbPolicy(std::size_t K, SlucbConfig config);

  /// Next arm in R^K. Throws StateError once the budget is spent.
  Vector propose(RngStream& rng) const;
  /// Feeds back the reward of the arm last returned by propose().
  void observe(const Vector& arm, double reward);

  Phase phase() const { return exploring_ ? Phase::Explore : Phase::Exploit; }
  long rounds() const { return rounds_; }
  std::size_t dim() const { return K_; }
  double threshold() const { return b_; }
  const SlucbConfig& config() const { return config_; }
  const SupportExplorationState& exploration() const { return exploration_; }
  /// T; meaningful once phase() == Exploit.
  long exploration_length() const { return exploration_length_; }
  const Support& active() const { return active_; }

 private:
  std::size_t K_;
  SlucbConfig config_;
  double b_;
  bool exploring_ = true;
  long rounds_ = 0;
  long exploration_length_ = 0;
  SupportExplorationState exploration_;
  Support active_;
  std::optional<Cb2Policy> restricted_;
};

struct SlucbRun {
  RunRecord record;
  long exploration_length = 0;
  Support active;
};

using ExplorationObserver = std::function<void(const SupportExplorationState&)>;

/// Full SL-UCB run in the simulated environment. `on_explore`, if set, sees
/// the estimator after every exploration round.
SlucbRun run_slucb(const ProblemInstance& instance, const SlucbConfig& config,
                   const NoiseModel& noise, RngStream& rng,
                   const ExplorationObserver& on_explore = {});

}  // namespace sparse_bandit
