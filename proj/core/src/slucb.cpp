#include "sparse_bandit/slucb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "sparse_bandit/errors.hpp"
#include "sparse_bandit/subspace.hpp"

namespace sparse_bandit {

void SlucbConfig::validate() const {
  if (!(sigma2_bar >= 0.0) || !(theta2_bar >= 0.0)) {
    throw InputError("slucb: sigma2_bar and theta2_bar must be nonnegative");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InputError("slucb: delta must lie in (0, 1)");
  }
  if (n < 1) throw InputError("slucb: budget n must be at least 1");
}

double exploration_threshold(const SlucbConfig& config, std::size_t K) {
  if (K < 1) throw InputError("exploration_threshold: K must be positive");
  return (config.theta2_bar + config.sigma2_bar) *
         std::sqrt(2.0 * std::log(2.0 * static_cast<double>(K) / config.delta));
}

Vector sample_exploring_arm(std::size_t K, RngStream& rng) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(K));
  Vector x(static_cast<Eigen::Index>(K));
  for (auto& v : x) v = scale * rng.rademacher();
  return x;
}

SupportExplorationState::SupportExplorationState(std::size_t K)
    : sums_(Vector::Zero(static_cast<Eigen::Index>(K))) {}

Vector SupportExplorationState::theta_hat() const {
  if (t_ == 0) return Vector::Zero(sums_.size());
  return (static_cast<double>(sums_.size()) / static_cast<double>(t_)) * sums_;
}

double SupportExplorationState::max_abs_estimate() const {
  if (t_ == 0 || sums_.size() == 0) return 0.0;
  return static_cast<double>(sums_.size()) / static_cast<double>(t_) *
         sums_.cwiseAbs().maxCoeff();
}

void SupportExplorationState::add(const Vector& arm, double reward) {
  if (arm.size() != sums_.size()) {
    throw InputError("exploration update: arm has length " +
                     std::to_string(arm.size()) + ", expected " +
                     std::to_string(sums_.size()));
  }
  sums_ += arm * reward;
  ++t_;
}

SupportExplorationState update_estimate(SupportExplorationState state,
                                        const Vector& arm, double reward) {
  state.add(arm, reward);
  return state;
}

bool should_stop(double max_abs_estimate, long t, double b, long n) {
  if (t < 1) throw InputError("should_stop: t must be at least 1");
  if (t >= n) return true;
  const double root_t = std::sqrt(static_cast<double>(t));
  if (max_abs_estimate - 2.0 * b / root_t < 0.0) return false;
  // (i) holds, so the margin is at least b/√t.
  const double margin = max_abs_estimate - b / root_t;
  if (margin <= 0.0) return false;  // only reachable when b = 0 and θ̂ = 0
  return static_cast<double>(t) >= std::sqrt(static_cast<double>(n)) / margin;
}

bool should_stop(const SupportExplorationState& state, double b, long n) {
  return should_stop(state.max_abs_estimate(), state.t(), b, n);
}

Support active_set(const Vector& theta_hat, double b, long T) {
  if (T < 1) throw InputError("active_set: T must be at least 1");
  const double threshold = 2.0 * b / std::sqrt(static_cast<double>(T));
  Support a;
  for (Eigen::Index k = 0; k < theta_hat.size(); ++k) {
    const double v = std::abs(theta_hat[k]);
    if (v >= threshold && v > 0.0) a.push_back(static_cast<std::size_t>(k));
  }
  return a;
}

PhaseBounds phase_bounds(double b, double theta_l2, std::size_t S, long n) {
  if (!(theta_l2 > 0.0)) {
    throw InputError("phase_bounds: undefined for theta_l2 = 0");
  }
  const double base = b * b * std::sqrt(static_cast<double>(n)) / theta_l2;
  return {base, 9.0 * std::sqrt(static_cast<double>(S)) * base};
}

double theorem2_bound(double theta2_bar, double sigma2_bar, std::size_t K,
                      double delta, std::size_t S, long n) {
  const double scale = theta2_bar + sigma2_bar;
  return 118.0 * scale * scale *
         std::log(2.0 * static_cast<double>(K) / delta) *
         static_cast<double>(S) * std::sqrt(static_cast<double>(n));
}

double recovery_threshold(double b, double theta_l2, long n) {
  return 3.0 * b * std::sqrt(theta_l2) /
         std::pow(static_cast<double>(n), 0.25);
}

Support guaranteed_support(const ProblemInstance& instance, double b, long n) {
  const double threshold = recovery_threshold(b, instance.theta_norm(), n);
  Support s;
  const Vector& theta = instance.theta();
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    if (theta[k] != 0.0 && std::abs(theta[k]) >= threshold) {
      s.push_back(static_cast<std::size_t>(k));
    }
  }
  return s;
}

ConcentrationMonitor::ConcentrationMonitor(const ProblemInstance& instance,
                                           double b)
    : theta_(instance.theta()), b_(b) {}

void ConcentrationMonitor::observe(const SupportExplorationState& state) {
  if (state.t() < 1) return;
  const double dev = (theta_ - state.theta_hat()).cwiseAbs().maxCoeff();
  const double radius = b_ / std::sqrt(static_cast<double>(state.t()));
  if (dev > radius) holds_ = false;
  if (b_ > 0.0) {
    worst_ratio_ = std::max(worst_ratio_, dev / radius);
  } else if (dev > 0.0) {
    worst_ratio_ = std::numeric_limits<double>::infinity();
  }
}

bool concentration_check(const ProblemInstance& instance,
                         std::span<const Vector> trajectory, double b) {
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (static_cast<std::size_t>(trajectory[i].size()) != instance.dim()) {
      throw InputError("concentration_check: trajectory dimension mismatch");
    }
    const double dev =
        (instance.theta() - trajectory[i]).cwiseAbs().maxCoeff();
    if (dev > b / std::sqrt(static_cast<double>(i + 1))) return false;
  }
  return true;
}

SlucbPolicy::SlucbPolicy(std::size_t K, SlucbConfig config)
    : K_(K), config_(config), exploration_(K) {
  config_.validate();
  b_ = exploration_threshold(config_, K_);
}

Vector SlucbPolicy::propose(RngStream& rng) const {
  if (rounds_ >= config_.n) {
    throw StateError("slucb: budget of " + std::to_string(config_.n) +
                     " rounds is spent");
  }
  if (exploring_) return sample_exploring_arm(K_, rng);
  if (!restricted_) return Vector::Zero(static_cast<Eigen::Index>(K_));
  return embed(restricted_->propose(), active_, K_);
}

void SlucbPolicy::observe(const Vector& arm, double reward) {
  if (rounds_ >= config_.n) {
    throw StateError("slucb: observe called after the budget is spent");
  }
  ++rounds_;
  if (exploring_) {
    exploration_.add(arm, reward);
    if (should_stop(exploration_, b_, config_.n)) {
      exploring_ = false;
      exploration_length_ = exploration_.t();
      active_ = active_set(exploration_.theta_hat(), b_, exploration_length_);
      const long remaining = config_.n - exploration_length_;
      if (!active_.empty() && remaining > 0) {
        restricted_.emplace(active_.size(), remaining, config_.delta);
      }
    }
    return;
  }
  if (restricted_) restricted_->observe(restrict_to(arm, active_), reward);
}

SlucbRun run_slucb(const ProblemInstance& instance, const SlucbConfig& config,
                   const NoiseModel& noise, RngStream& rng,
                   const ExplorationObserver& on_explore) {
  const std::size_t K = instance.dim();
  SlucbPolicy policy(K, config);

  RunMetadata meta;
  meta.seed = rng.seed();
  meta.n = config.n;
  meta.algorithm = "slucb";
  meta.instance_digest = instance.digest();
  RunRecord record(std::move(meta), K);

  for (long t = 0; t < config.n; ++t) {
    const Phase phase = policy.phase();
    const Vector x = policy.propose(rng);
    const double r = pull(instance, ArmVector(x), noise, rng);
    record.append(phase, x, r, instance.theta().dot(x));
    policy.observe(x, r);
    if (phase == Phase::Explore && on_explore) on_explore(policy.exploration());
  }

  SlucbRun run;
  run.exploration_length = policy.exploration_length();
  run.active = policy.active();
  record.meta().exploration_length = run.exploration_length;
  record.meta().active_set = run.active;
  run.record = std::move(record);
  return run;
}

}  // namespace sparse_bandit
