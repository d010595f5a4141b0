#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace sparse_bandit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Sorted list of distinct coordinate indices.
using Support = std::vector<std::size_t>;

inline constexpr double kBallTolerance = 1e-9;

/// A point of the closed Euclidean unit ball.
class ArmVector {
 public:
  ArmVector() = default;
  /// Throws InputError if the norm exceeds 1 + kBallTolerance or a
  /// coordinate is not finite.
  explicit ArmVector(Vector coords);

  static ArmVector zero(std::size_t dim);
  static ArmVector basis(std::size_t dim, std::size_t index);

  const Vector& coords() const { return coords_; }
  std::size_t dim() const { return static_cast<std::size_t>(coords_.size()); }
  double norm() const { return coords_.norm(); }

 private:
  Vector coords_;
};

/// Ground truth of a sparse linear bandit: reward ⟨x, θ + η⟩ with
/// |η_k| ≤ σ_k / 2.
class ProblemInstance {
 public:
  ProblemInstance(Vector theta, Vector sigma);

  /// Instance with identical noise scale on every coordinate.
  static ProblemInstance uniform_noise(Vector theta, double sigma_scale);

  std::size_t dim() const { return static_cast<std::size_t>(theta_.size()); }
  const Vector& theta() const { return theta_; }
  const Vector& sigma() const { return sigma_; }
  double theta_norm() const { return theta_.norm(); }
  double sigma_norm() const { return sigma_.norm(); }

  /// Number of nonzero coordinates of θ.
  std::size_t sparsity() const;
  Support support() const;

  /// Stable 64-bit FNV-1a digest of (K, θ, σ) bit patterns.
  std::uint64_t digest() const;

 private:
  Vector theta_;
  Vector sigma_;
};

}  // namespace sparse_bandit
