#include "sparse_bandit/cb2.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include <Eigen/Cholesky>

#include "sparse_bandit/errors.hpp"

namespace sparse_bandit {

EllipsoidState EllipsoidState::initial(std::size_t d, double beta) {
  const auto n = static_cast<Eigen::Index>(d);
  EllipsoidState s;
  s.d = d;
  s.A = Matrix::Identity(n, n);
  s.xr_sum = Vector::Zero(n);
  s.theta_hat = Vector::Zero(n);
  s.beta = beta;
  return s;
}

double beta_param(std::size_t d, long n, double delta) {
  if (d < 1) throw InputError("beta_param: d must be at least 1");
  if (n < 1) throw InputError("beta_param: n must be at least 1");
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  if (!(delta > 0.0) || delta > n2) {
    throw InputError("beta_param: delta must lie in (0, n^2], got " +
                     std::to_string(delta));
  }
  const double l = std::log(n2 / delta);
  return 128.0 * static_cast<double>(d) * l * l;
}

Vector select_arm(const EllipsoidState& state,
                  const SubproblemOptions& options) {
  const auto sol =
      max_norm_in_ellipsoid(state.A, state.theta_hat, state.beta, options);
  if (sol.value < 1e-12) {
    return Vector::Unit(static_cast<Eigen::Index>(state.d), 0);
  }
  return sol.nu_star / sol.value;
}

EllipsoidState update(EllipsoidState state, const Vector& arm, double reward) {
  if (static_cast<std::size_t>(arm.size()) != state.d) {
    throw InputError("cb2 update: arm has length " +
                     std::to_string(arm.size()) + ", expected " +
                     std::to_string(state.d));
  }
  state.A.noalias() += arm * arm.transpose();
  state.xr_sum += arm * reward;
  Eigen::LLT<Matrix> llt(state.A);
  if (llt.info() != Eigen::Success) {
    throw NumericError("cb2 update: Cholesky factorization of A failed");
  }
  state.theta_hat = llt.solve(state.xr_sum);
  ++state.t;
  return state;
}

double theorem1_bound(std::size_t d, double theta_l2, double sigma_l2, long n,
                      double delta) {
  const double nn = static_cast<double>(n);
  const double l = std::log(nn * nn / delta);
  return 64.0 * static_cast<double>(d) * (theta_l2 + sigma_l2) * l * l *
         std::sqrt(nn);
}

Cb2Policy::Cb2Policy(std::size_t d, long horizon, double delta)
    : state_(EllipsoidState::initial(d, beta_param(d, horizon, delta))) {}

RunRecord run_cb2(const ProblemInstance& instance, long n, double delta,
                  const NoiseModel& noise, RngStream& rng) {
  const std::size_t d = instance.dim();
  if (static_cast<long>(d) > n) {
    std::cerr << "warning: cb2 dimension " << d << " exceeds horizon " << n
              << '\n';
  }
  RunMetadata meta;
  meta.seed = rng.seed();
  meta.n = n;
  meta.algorithm = "cb2";
  meta.instance_digest = instance.digest();
  RunRecord record(std::move(meta), d);

  Cb2Policy policy(d, n, delta);
  for (long t = 0; t < n; ++t) {
    const Vector x = policy.propose();
    const double r = pull(instance, ArmVector(x), noise, rng);
    record.append(Phase::Exploit, x, r, instance.theta().dot(x));
    policy.observe(x, r);
  }
  return record;
}

}  // namespace sparse_bandit
