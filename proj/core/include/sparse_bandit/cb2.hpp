#pragma once

#include <cstddef>

#include "sparse_bandit/ellipsoid.hpp"
#include "sparse_bandit/environment.hpp"
#include "sparse_bandit/rng.hpp"
#include "sparse_bandit/run_record.hpp"
#include "sparse_bandit/types.hpp"

namespace sparse_bandit {

/// ConfidenceBall₂ state for the d-dimensional unit ball.
///
/// Invariants: A = I + Σ x_t x_tᵀ (symmetric, λ_min ≥ 1); A θ̂ = xr_sum.
struct EllipsoidState {
  std::size_t d = 0;
  Matrix A;
  Vector xr_sum;
  Vector theta_hat;
  double beta = 0.0;
  long t = 0;  // completed rounds

  static EllipsoidState initial(std::size_t d, double beta);
};

/// β = 128 d (log(n²/δ))², natural log. Throws InputError if d < 1, n < 1,
/// δ ≤ 0 or δ > n².
double beta_param(std::size_t d, long n, double delta);

/// Unit arm in the direction of the largest-norm point of the confidence
/// ellipsoid {ν : (ν − θ̂)ᵀA(ν − θ̂) ≤ β}. Falls back to e₀ when that point
/// is (numerically) the origin.
Vector select_arm(const EllipsoidState& state,
                  const SubproblemOptions& options = {});

/// A += x xᵀ, xr_sum += x r, θ̂ re-solved by Cholesky.
EllipsoidState update(EllipsoidState state, const Vector& arm, double reward);

/// 64 d (‖θ‖₂ + ‖σ‖₂) (log(n²/δ))² √n.
double theorem1_bound(std::size_t d, double theta_l2, double sigma_l2, long n,
                      double delta);

/// Stepwise ConfidenceBall₂ for a known horizon.
class Cb2Policy {
 public:
  Cb2Policy(std::size_t d, long horizon, double delta);

  Vector propose() const { return select_arm(state_); }
  void observe(const Vector& arm, double reward) {
    state_ = update(std::move(state_), arm, reward);
  }
  const EllipsoidState& state() const { return state_; }

 private:
  EllipsoidState state_;
};

/// n rounds of ConfidenceBall₂ against `instance` (dimension d = instance.dim()).
/// Logs a warning to stderr when d > n.
RunRecord run_cb2(const ProblemInstance& instance, long n, double delta,
                  const NoiseModel& noise, RngStream& rng);

}  // namespace sparse_bandit
