#include "sparse_bandit/environment.hpp"

#include <cmath>
#include <string>

#include "sparse_bandit/errors.hpp"

namespace sparse_bandit {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::UniformSymmetric:
      return "uniform";
    case NoiseKind::RademacherScaled:
      return "rademacher";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "uniform") return NoiseKind::UniformSymmetric;
  if (name == "rademacher") return NoiseKind::RademacherScaled;
  throw InputError("unknown noise kind '" + std::string(name) + "'");
}

NoiseModel NoiseModel::for_instance(const ProblemInstance& instance,
                                    NoiseKind kind) {
  return NoiseModel{kind, instance.sigma()};
}

Vector NoiseModel::draw(RngStream& rng) const {
  Vector eta(scale.size());
  switch (kind) {
    case NoiseKind::UniformSymmetric:
      for (Eigen::Index k = 0; k < scale.size(); ++k) {
        eta[k] = (rng.uniform01() - 0.5) * scale[k];
      }
      break;
    case NoiseKind::RademacherScaled:
      for (Eigen::Index k = 0; k < scale.size(); ++k) {
        eta[k] = 0.5 * rng.rademacher() * scale[k];
      }
      break;
  }
  return eta;
}

double pull(const ProblemInstance& instance, const ArmVector& arm,
            const NoiseModel& noise, RngStream& rng) {
  if (arm.dim() != instance.dim()) {
    throw InputError("arm dimension " + std::to_string(arm.dim()) +
                     " does not match instance dimension " +
                     std::to_string(instance.dim()));
  }
  if (static_cast<std::size_t>(noise.scale.size()) != instance.dim()) {
    throw InputError("noise scale dimension does not match instance");
  }
  const Vector eta = noise.draw(rng);
  return arm.coords().dot(instance.theta() + eta);
}

double optimal_performance(const ProblemInstance& instance, long n) {
  if (n < 0) throw InputError("n must be nonnegative");
  return static_cast<double>(n) * instance.theta_norm();
}

double regret(const RunRecord& record, const ProblemInstance& instance) {
  if (!record.complete()) {
    throw StateError("regret requires a complete record (" +
                     std::to_string(record.size()) + " of " +
                     std::to_string(record.meta().n) + " rounds)");
  }
  return optimal_performance(instance, record.meta().n) - record.performance();
}

RewardGap reward_sum_gap(const RunRecord& record,
                         const ProblemInstance& instance, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw InputError("delta must lie in (0, 1]");
  }
  const double n = static_cast<double>(record.size());
  RewardGap g;
  g.gap = record.reward_sum() - record.performance();
  g.bound = std::sqrt(2.0 * std::log(1.0 / delta)) * instance.sigma_norm() *
            std::sqrt(n);
  return g;
}

}  // namespace sparse_bandit
