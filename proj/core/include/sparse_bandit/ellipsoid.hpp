#pragma once

#include "sparse_bandit/types.hpp"

namespace sparse_bandit {

struct SubproblemOptions {
  /// Absolute tolerance on the Lagrange multiplier μ.
  double tolerance = 1e-12;
  int max_iterations = 200;
};

struct SubproblemSolution {
  Vector nu_star;
  double value = 0.0;  // ‖nu_star‖₂
  bool hard_case = false;
  int iterations = 0;
};

/// Point of largest Euclidean norm in {ν : (ν − c)ᵀ A (ν − c) ≤ β}.
///
/// With A = QΛQᵀ and v = ν − c in eigen coordinates, stationarity gives
/// v_i = c_i / (μλ_i − 1) for a multiplier μ > 1/λ_min, and μ is the root of
/// the secular equation Σ λ_i v_i² = β. The root is bracketed in
/// s = μλ_min − 1 between √(λ_min c_min² / β) and √(λ_min ‖c‖² / β), where
/// c_min is the component of c in the minimal eigenspace, then bisected.
/// When c_min = 0 and the limit s → 0 stays inside the ellipsoid (hard case),
/// the remaining budget goes to the first minimal eigenvector, signed so its
/// last nonzero coordinate is positive.
///
/// Throws NumericError if A is not symmetric positive definite and
/// InputError on dimension mismatch or β < 0.
SubproblemSolution max_norm_in_ellipsoid(const Matrix& A, const Vector& center,
                                         double beta,
                                         const SubproblemOptions& options = {});

/// Flips `v` so that its last coordinate with |v_i| > 1e-12 is positive.
void canonicalize_sign(Eigen::Ref<Vector> v);

}  // namespace sparse_bandit
