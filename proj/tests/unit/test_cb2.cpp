#include <cmath>

#include "doctest.h"
#include "sparse_bandit/cb2.hpp"
#include "sparse_bandit/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

using namespace sparse_bandit;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// β in long double, independent of the library's expression order.
long double beta_oracle(long d, long n, long double delta) {
  const long double l = std::log(static_cast<long double>(n) * n / delta);
  return 128.0L * d * l * l;
}

EllipsoidState state_with(Matrix A, Vector theta_hat, double beta) {
  EllipsoidState s = EllipsoidState::initial(static_cast<std::size_t>(theta_hat.size()), beta);
  s.A = std::move(A);
  s.theta_hat = std::move(theta_hat);
  return s;
}

}  // namespace

TEST_CASE("beta examples") {
  CHECK(beta_param(3, 10, 100.0) == 0.0);
  CHECK(beta_param(2, 100, 0.05) == doctest::Approx(38140.981613557753).epsilon(1e-12));
  CHECK(beta_param(2, 100, 0.05) == doctest::Approx(double(beta_oracle(2, 100, 0.05L))).epsilon(1e-12));
  CHECK(beta_param(2, 100, 0.05) == doctest::Approx(38142.9).epsilon(2e-4));
  CHECK(beta_param(1, 10, 0.01) == doctest::Approx(10858.287330259759).epsilon(1e-12));
  CHECK(beta_param(1, 10, 0.01) == doctest::Approx(10856.9).epsilon(2e-4));
  CHECK_THROWS_AS(beta_param(1, 10, 101.0), InputError);
  CHECK_THROWS_AS(beta_param(0, 10, 0.1), InputError);
  CHECK_THROWS_AS(beta_param(1, 0, 0.1), InputError);
  CHECK_THROWS_AS(beta_param(1, 10, 0.0), InputError);
}

TEST_CASE("select arm examples") {
  const Vector one = select_arm(state_with(Matrix::Identity(1, 1), vec({0.5}), 1.0));
  CHECK(one[0] == doctest::Approx(1.0));

  Matrix A(2, 2);
  A << 4, 0, 0, 1;
  const Vector degenerate = select_arm(state_with(A, vec({0, 0}), 1.0));
  CHECK(std::abs(degenerate[0]) < 1e-12);
  CHECK(degenerate[1] == doctest::Approx(1.0));  // nonnegative last coordinate

  const Vector off = select_arm(state_with(A, vec({0.3, 0}), 1.0));
  CHECK(off[0] == doctest::Approx(0.3779644730092272).epsilon(1e-9));
  CHECK(off[1] == doctest::Approx(0.9258200997725514).epsilon(1e-9));
  CHECK(std::abs(off[0] - 0.37797) < 1e-5);
  CHECK(std::abs(off[1] - 0.92582) < 1e-5);
  CHECK(off.norm() == doctest::Approx(1.0).epsilon(1e-9));

  // ν* at the origin falls back to e₀.
  const Vector fallback = select_arm(state_with(Matrix::Identity(2, 2), vec({0, 0}), 0.0));
  CHECK(fallback == vec({1, 0}));
}

TEST_CASE("update examples") {
  auto s = update(EllipsoidState::initial(1, 1.0), vec({1.0}), 0.7);
  CHECK(s.A(0, 0) == 2.0);
  CHECK(s.theta_hat[0] == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(s.t == 1);

  const auto same = update(s, vec({0.0}), 5.0);
  CHECK(same.A == s.A);
  CHECK(same.theta_hat == s.theta_hat);

  auto two = update(EllipsoidState::initial(2, 1.0), vec({1, 0}), 1.0);
  two = update(two, vec({0, 1}), 2.0);
  CHECK(two.theta_hat[0] == doctest::Approx(0.5));
  CHECK(two.theta_hat[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(update(two, vec({1}), 0.0), InputError);
}

TEST_CASE("update keeps the design matrix and estimate consistent with the log") {
  RngStream rng(3);
  const std::size_t d = 4;
  auto s = EllipsoidState::initial(d, 1.0);
  Matrix A = Matrix::Identity(d, d);
  Vector xr = Vector::Zero(d);
  for (int t = 0; t < 300; ++t) {
    const Vector x = rng.unit_sphere(d) * rng.uniform01();
    const double r = rng.normal();
    s = update(s, x, r);
    A += x * x.transpose();
    xr += x * r;
  }
  CHECK((s.A - A).norm() <= 1e-8 * A.norm());
  const Vector direct = A.ldlt().solve(xr);
  CHECK((s.theta_hat - direct).norm() <= 1e-8 * direct.norm());
  CHECK((s.A * s.theta_hat - s.xr_sum).norm() <= 1e-8 * s.xr_sum.norm());
  CHECK((s.A - s.A.transpose()).norm() == 0.0);
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(s.A).eigenvalues().minCoeff() >= 1.0 - 1e-12);
}

// The ridge term makes ‖A⁻¹θ‖₂ non-monotone in general: A grows in the Loewner
// order, but A⁻² is not operator monotone. The error in the A-norm,
// θᵀA⁻¹θ, is.
TEST_CASE("noise-free estimate error is non-increasing after round d" * doctest::should_fail()) {
  RngStream rng(4);
  for (std::size_t d : {1u, 2u, 3u}) {
    const Vector theta = rng.unit_sphere(d) * 2.0;
    auto s = EllipsoidState::initial(d, 1.0);
    double prev = INFINITY;
    for (int t = 1; t <= 60; ++t) {
      const Vector x = rng.unit_sphere(d);
      s = update(s, x, theta.dot(x));
      const double err = (s.theta_hat - theta).norm();
      if (t > static_cast<int>(d)) CHECK(err <= prev + 1e-12);
      prev = err;
    }
  }
}

TEST_CASE("noise-free estimate error in the design norm is non-increasing") {
  RngStream rng(4);
  for (std::size_t d : {1u, 2u, 3u}) {
    const Vector theta = rng.unit_sphere(d) * 2.0;
    auto s = EllipsoidState::initial(d, 1.0);
    double prev = INFINITY;
    for (int t = 1; t <= 60; ++t) {
      const Vector x = rng.unit_sphere(d);
      s = update(s, x, theta.dot(x));
      const Vector e = s.theta_hat - theta;
      const double err = e.dot(s.A * e);
      CHECK(err <= prev * (1 + 1e-12));
      CHECK(err == doctest::Approx(theta.dot(s.A.ldlt().solve(theta))).epsilon(1e-9));
      prev = err;
    }
  }
}

TEST_CASE("cb2 regret bound examples") {
  CHECK(theorem1_bound(5, 0.0, 0.0, 100, 0.05) == 0.0);
  CHECK(theorem1_bound(2, 1, 1, 100, 0.05) == doctest::Approx(381409.81613557753).epsilon(1e-12));
  CHECK(theorem1_bound(2, 1, 1, 100, 0.05) == doctest::Approx(381429).epsilon(2e-4));
  CHECK(theorem1_bound(4, 1, 1, 100, 0.05) == doctest::Approx(2 * theorem1_bound(2, 1, 1, 100, 0.05)));
}

TEST_CASE("one-dimensional noise-free run plays +1 after the first round") {
  const auto inst = ProblemInstance::uniform_noise(vec({1.0}), 0.0);
  RngStream rng(1);
  const long n = 200;
  const auto rec = run_cb2(inst, n, 0.01, NoiseModel::for_instance(inst), rng);
  REQUIRE(rec.complete());
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK(std::abs(std::abs(rec.arm(i)[0]) - 1.0) < 1e-12);
  }
  CHECK(rec.performance() >= n - 2);
}

TEST_CASE("zero parameter has zero regret") {
  const auto inst = ProblemInstance::uniform_noise(vec({0, 0, 0}), 0.3);
  RngStream rng(2);
  const auto rec = run_cb2(inst, 50, 0.01, NoiseModel::for_instance(inst), rng);
  CHECK(regret(rec, inst) == 0.0);
}

TEST_CASE("two-dimensional noise-free run stays below the cb2 regret bound") {
  const auto inst = ProblemInstance::uniform_noise(vec({1, 0}), 0.0);
  RngStream rng(3);
  const auto rec = run_cb2(inst, 50, 0.01, NoiseModel::for_instance(inst), rng);
  CHECK(regret(rec, inst) < theorem1_bound(2, 1.0, 0.0, 50, 0.01));
  CHECK(regret(rec, inst) >= -1e-9);
}

TEST_CASE("cb2 runs are reproducible") {
  const auto inst = ProblemInstance::uniform_noise(vec({0.3, -0.8}), 0.4);
  RngStream a(9), b(9);
  const auto ra = run_cb2(inst, 100, 0.05, NoiseModel::for_instance(inst), a);
  const auto rb = run_cb2(inst, 100, 0.05, NoiseModel::for_instance(inst), b);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    CHECK(ra.rounds()[i].reward == rb.rounds()[i].reward);
    CHECK(ra.arm(i) == rb.arm(i));
  }
}
