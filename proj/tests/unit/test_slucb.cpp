#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "sparse_bandit/errors.hpp"
#include "sparse_bandit/slucb.hpp"
#include "sparse_bandit/subspace.hpp"

using namespace sparse_bandit;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

SlucbConfig config(double theta2_bar, double sigma2_bar, long n,
                   double delta = 0.01) {
  SlucbConfig c;
  c.theta2_bar = theta2_bar;
  c.sigma2_bar = sigma2_bar;
  c.delta = delta;
  c.n = n;
  return c;
}

bool subset(const Support& a, const Support& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("threshold examples") {
  CHECK(exploration_threshold(config(0, 0, 10), 100) == 0.0);
  CHECK(exploration_threshold(config(1, 1, 10), 100) ==
        doctest::Approx(8.9010055847802401).epsilon(1e-12));
  CHECK(std::abs(exploration_threshold(config(1, 1, 10), 100) - 8.9010) < 1e-4);
  // 2K/δ = e → e⁴ doubles b.
  const double K = 1.0;
  const double d1 = 2 * K / std::exp(1.0);
  const double d4 = 2 * K / std::exp(4.0);
  CHECK(exploration_threshold(config(1, 0, 10, d4), 1) ==
        doctest::Approx(2 * exploration_threshold(config(1, 0, 10, d1), 1)));
  CHECK_THROWS_AS(exploration_threshold(config(1, 0, 10), 0), InputError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config(-1, 0, 10).validate(), InputError);
  CHECK_THROWS_AS(config(1, 0, 10, 1.0).validate(), InputError);
  CHECK_THROWS_AS(config(1, 0, 0).validate(), InputError);
  CHECK_NOTHROW(config(1, 0, 1).validate());
}

TEST_CASE("exploring arms") {
  RngStream rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vector x = sample_exploring_arm(1, rng);
    CHECK(std::abs(x[0]) == 1.0);
  }
  for (std::size_t K : {2u, 3u, 17u, 1000u}) {
    CHECK(sample_exploring_arm(K, rng).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  const int draws = 100000;
  Vector sum = Vector::Zero(4);
  for (int i = 0; i < draws; ++i) {
    const Vector x = sample_exploring_arm(4, rng);
    for (double v : x) REQUIRE(std::abs(std::abs(v) - 0.5) < 1e-15);
    sum += x * 2.0;  // ±1 coordinates
  }
  for (double s : sum) CHECK(std::abs(s / draws) < 4.0 / std::sqrt(double(draws)));
}

TEST_CASE("estimator update examples") {
  const double h = 1 / std::sqrt(2.0);
  auto s = update_estimate(SupportExplorationState(2), vec({h, h}), h);
  CHECK(s.theta_hat()[0] == doctest::Approx(1.0));
  CHECK(s.theta_hat()[1] == doctest::Approx(1.0));
  s = update_estimate(s, vec({h, -h}), h);
  CHECK(std::abs(s.theta_hat()[0] - 1.0) < 1e-12);
  CHECK(std::abs(s.theta_hat()[1]) < 1e-12);
  const Vector before = s.sums();
  s = update_estimate(s, vec({-h, h}), 0.0);
  CHECK(s.sums() == before);
  CHECK(s.t() == 3);
  CHECK(SupportExplorationState(3).theta_hat() == Vector::Zero(3));
  CHECK_THROWS_AS(update_estimate(s, vec({1}), 1.0), InputError);
}

TEST_CASE("estimator matches direct recomputation and its scaling invariant") {
  RngStream rng(2);
  const std::size_t K = 16;
  const auto inst = ProblemInstance::uniform_noise(rng.unit_sphere(K) * 3.0, 0.2);
  const auto noise = NoiseModel::for_instance(inst);
  SupportExplorationState s(K);
  std::vector<Vector> arms;
  std::vector<double> rewards;
  for (int t = 1; t <= 200; ++t) {
    arms.push_back(sample_exploring_arm(K, rng));
    rewards.push_back(pull(inst, ArmVector(arms.back()), noise, rng));
    s.add(arms.back(), rewards.back());
    Vector direct = Vector::Zero(K);
    for (int i = 0; i < t; ++i) direct += arms[i] * rewards[i];
    direct *= double(K) / t;
    CHECK((s.theta_hat() - direct).cwiseAbs().maxCoeff() <= 1e-12 * (1 + direct.norm()));
    CHECK((s.theta_hat() * t / double(K) - s.sums()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(s.max_abs_estimate() == doctest::Approx(s.theta_hat().cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("estimator is unbiased at fixed t") {
  const std::size_t K = 8;
  const long t = 20;
  const int reps = 10000;
  const auto inst =
      ProblemInstance::uniform_noise(vec({2.0, 0.0, -1.0, 0.0, 0.0, 0.5, 0.0, 0.0}), 0.4);
  const auto noise = NoiseModel::for_instance(inst);
  Vector mean = Vector::Zero(K);
  for (int r = 0; r < reps; ++r) {
    RngStream rng(replication_seed(5, 0, r));
    SupportExplorationState s(K);
    for (long i = 0; i < t; ++i) {
      const Vector x = sample_exploring_arm(K, rng);
      s.add(x, pull(inst, ArmVector(x), noise, rng));
    }
    mean += s.theta_hat();
  }
  mean /= reps;
  const double band =
      4 * (inst.theta_norm() + inst.sigma_norm()) * std::sqrt(2.0) / std::sqrt(double(t) * reps);
  for (std::size_t k = 0; k < K; ++k) {
    CHECK(std::abs(mean[k] - inst.theta()[k]) <= band);
  }
}

TEST_CASE("stopping rule examples") {
  CHECK_FALSE(should_stop(1.0, 9, 1.0, 100));
  CHECK(should_stop(1.0, 25, 1.0, 100));
  CHECK_FALSE(should_stop(0.0, 50, 1.0, 100));
  CHECK(should_stop(0.0, 100, 1.0, 100));
  // (i) with equality: denominator b/√t, so (ii) is t ≥ √n·√t/b.
  CHECK_FALSE(should_stop(2.0 / 3.0, 9, 1.0, 100));  // needs 9 ≥ 30
  CHECK(should_stop(4.0 / 30.0, 900, 2.0, 3599));   // needs 900 ≥ 15√3599
  CHECK_FALSE(should_stop(4.0 / 30.0, 900, 2.0, 3601));
  CHECK_THROWS_AS(should_stop(1.0, 0, 1.0, 10), InputError);
  SupportExplorationState s(2);
  s.add(vec({1, 0}), 1.0);
  CHECK(should_stop(s, 0.0, 1));
}

TEST_CASE("active set examples") {
  CHECK(active_set(vec({0.9, 0.05, -0.5}), 1.0, 25) == Support{0, 2});
  CHECK(active_set(vec({0.0, 1e-300, -2.0}), 0.0, 3) == Support{1, 2});
  CHECK(active_set(Vector::Zero(4), 1.0, 10).empty());
  CHECK_THROWS_AS(active_set(vec({1}), 1.0, 0), InputError);
}

TEST_CASE("phase bound examples") {
  const auto pb = phase_bounds(8.901, 5.0, 1, 10000);
  CHECK(pb.t_min == doctest::Approx(1584.55602).epsilon(1e-10));
  CHECK(pb.t_max == doctest::Approx(14261.00418).epsilon(1e-10));
  CHECK(std::abs(pb.t_min - 1584.6) < 0.05);
  CHECK(std::abs(pb.t_max - 14261) < 0.5);
  CHECK(pb.t_max == doctest::Approx(9 * pb.t_min));
  const auto quad = phase_bounds(8.901, 5.0, 3, 40000);
  const auto base = phase_bounds(8.901, 5.0, 3, 10000);
  CHECK(quad.t_min == doctest::Approx(2 * base.t_min));
  CHECK(quad.t_max == doctest::Approx(2 * base.t_max));
  CHECK_THROWS_AS(phase_bounds(1.0, 0.0, 1, 10), InputError);
}

TEST_CASE("sl-ucb regret bound examples") {
  CHECK(theorem2_bound(0, 0, 100, 0.01, 2, 10000) == 0.0);
  CHECK(theorem2_bound(1, 1, 100, 0.01, 2, 10000) ==
        doctest::Approx(934889.22495941049).epsilon(1e-12));
  CHECK(theorem2_bound(1, 1, 100, 0.01, 2, 10000) == doctest::Approx(934963).epsilon(2e-4));
  CHECK(theorem2_bound(1, 1, 100, 0.01, 6, 10000) ==
        doctest::Approx(3 * theorem2_bound(1, 1, 100, 0.01, 2, 10000)));
  CHECK(theorem2_bound(1, 1, 100, 0.01, 2, 40000) ==
        doctest::Approx(2 * theorem2_bound(1, 1, 100, 0.01, 2, 10000)));
}

TEST_CASE("concentration check examples") {
  const auto one = ProblemInstance::uniform_noise(vec({0.7}), 0.0);
  std::vector<Vector> exact(50, vec({0.7}));
  CHECK(concentration_check(one, exact, 1.0));

  const auto noisy = ProblemInstance::uniform_noise(vec({1.0, 0.0}), 0.5);
  const auto noise = NoiseModel::for_instance(noisy);
  RngStream rng(3);
  SupportExplorationState s(2);
  std::vector<Vector> traj;
  for (int t = 0; t < 10; ++t) {
    const Vector x = sample_exploring_arm(2, rng);
    s.add(x, pull(noisy, ArmVector(x), noise, rng));
    traj.push_back(s.theta_hat());
  }
  CHECK_FALSE(concentration_check(noisy, traj, 0.0));
  CHECK_THROWS_AS(concentration_check(noisy, std::vector<Vector>{vec({1})}, 1.0), InputError);

  ConcentrationMonitor m(noisy, 0.0);
  m.observe(s);
  CHECK_FALSE(m.holds());
}

TEST_CASE("zero parameter explores the whole budget at zero regret") {
  const auto inst = ProblemInstance::uniform_noise(Vector::Zero(20), 0.3);
  RngStream rng(4);
  const auto run = run_slucb(inst, config(1.0, inst.sigma_norm(), 300),
                             NoiseModel::for_instance(inst), rng);
  CHECK(regret(run.record, inst) == 0.0);
  CHECK(run.exploration_length == 300);
}

TEST_CASE("budget exhaustion leaves an empty active set") {
  const auto inst = ProblemInstance::uniform_noise(vec({1, 0, 0}), 0.0);
  RngStream rng(5);
  const auto run = run_slucb(inst, config(1e6, 0, 5), NoiseModel::for_instance(inst), rng);
  CHECK(run.exploration_length == 5);
  CHECK(run.active.empty());
  CHECK(run.record.complete());
  CHECK(run.record.meta().exploration_length == 5);
}

TEST_CASE("policy refuses to act past its budget") {
  SlucbPolicy policy(3, config(1.0, 0.0, 50));
  RngStream rng(6);
  while (policy.phase() == Phase::Explore) {
    const Vector x = policy.propose(rng);
    policy.observe(x, 0.0);
  }
  CHECK(policy.exploration_length() == 50);
  CHECK(policy.active().empty());
  CHECK_THROWS_AS(policy.propose(rng), StateError);
  CHECK_THROWS_AS(policy.observe(Vector::Zero(3), 0.0), StateError);
}

TEST_CASE("sparse instance: support containment on the concentration event") {
  // K=100, θ = 5e₁, σ_k = 0.1, θ̄₂ = 5, σ̄₂ = 1, δ = 0.01, n = 10⁴.
  Vector theta = Vector::Zero(100);
  theta[1] = 5.0;
  const auto inst = ProblemInstance::uniform_noise(theta, 0.1);
  const auto noise = NoiseModel::for_instance(inst);
  const SlucbConfig cfg = config(5.0, 1.0, 10000);
  const double b = exploration_threshold(cfg, 100);
  const auto pb = phase_bounds(b, 5.0, 1, cfg.n);
  const long seeds = 200;
  long exact_support = 0, below_max = 0, xi = 0, contained = 0, loss_ok = 0;
  long arms_ok = 0;
  for (long s = 0; s < seeds; ++s) {
    RngStream rng(replication_seed(77, 0, static_cast<std::uint64_t>(s)));
    ConcentrationMonitor mon(inst, b);
    const auto run = run_slucb(inst, cfg, noise, rng,
                               [&](const SupportExplorationState& st) { mon.observe(st); });
    if (run.active == Support{1}) ++exact_support;
    if (run.exploration_length <= pb.t_max) ++below_max;
    if (!mon.holds()) continue;
    ++xi;
    if (subset(run.active, inst.support())) ++contained;
    const double loss = inst.theta_norm() - restrict_to(inst.theta(), run.active).norm();
    if (loss <= 9.0 * 1 * b * b / std::sqrt(double(cfg.n))) ++loss_ok;
    bool ok = true;
    for (std::size_t i = 0; i < run.record.size(); ++i) {
      const Round& r = run.record.rounds()[i];
      if (r.phase == Phase::Exploit && r.arm_norm > 1 + 1e-9) ok = false;
    }
    if (ok) ++arms_ok;
  }
  CHECK(xi >= 0.9 * seeds);
  CHECK(contained == xi);
  CHECK(loss_ok == xi);
  CHECK(arms_ok == xi);
  CHECK(exact_support >= 0.95 * seeds);
  CHECK(below_max >= 0.95 * seeds);
}

// The lower phase length b²√n/‖θ‖₂ exceeds n here, so this predicate cannot
// hold; kept as a documented expected failure.
TEST_CASE("sparse instance: exploration length reaches the lower phase bound" *
          doctest::should_fail()) {
  Vector theta = Vector::Zero(100);
  theta[1] = 5.0;
  const auto inst = ProblemInstance::uniform_noise(theta, 0.1);
  const SlucbConfig cfg = config(5.0, 1.0, 10000);
  const auto pb = phase_bounds(exploration_threshold(cfg, 100), 5.0, 1, cfg.n);
  long above_min = 0;
  for (long s = 0; s < 50; ++s) {
    RngStream rng(replication_seed(77, 0, static_cast<std::uint64_t>(s)));
    const auto run = run_slucb(inst, cfg, NoiseModel::for_instance(inst), rng);
    if (run.exploration_length >= pb.t_min) ++above_min;
  }
  CHECK(above_min >= 0.95 * 50);
}

TEST_CASE("phase-two arms live on the active set") {
  Vector theta = Vector::Zero(30);
  theta[3] = 4.0;
  theta[17] = -3.0;
  const auto inst = ProblemInstance::uniform_noise(theta, 0.05);
  const SlucbConfig cfg = config(inst.theta_norm(), inst.sigma_norm(), 3000);
  SlucbPolicy policy(30, cfg);
  RngStream rng(8);
  const auto noise = NoiseModel::for_instance(inst);
  for (long t = 0; t < cfg.n; ++t) {
    const Phase ph = policy.phase();
    const Vector x = policy.propose(rng);
    if (ph == Phase::Exploit) {
      REQUIRE(x.norm() <= 1 + 1e-9);
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        if (x[k] != 0.0) {
          REQUIRE(std::binary_search(policy.active().begin(), policy.active().end(),
                                     static_cast<std::size_t>(k)));
        }
      }
    }
    policy.observe(x, pull(inst, ArmVector(x), noise, rng));
  }
  CHECK(policy.phase() == Phase::Exploit);
  CHECK_FALSE(policy.active().empty());
}

TEST_CASE("runs are deterministic given instance, config and seed") {
  Vector theta = Vector::Zero(40);
  theta[0] = 2.0;
  theta[9] = 1.0;
  const auto inst = ProblemInstance::uniform_noise(theta, 0.2);
  const SlucbConfig cfg = config(inst.theta_norm(), inst.sigma_norm(), 2000);
  RngStream a(42), b(42);
  const auto ra = run_slucb(inst, cfg, NoiseModel::for_instance(inst), a);
  const auto rb = run_slucb(inst, cfg, NoiseModel::for_instance(inst), b);
  CHECK(ra.exploration_length == rb.exploration_length);
  CHECK(ra.active == rb.active);
  REQUIRE(ra.record.size() == rb.record.size());
  bool same = true;
  for (std::size_t i = 0; i < ra.record.size(); ++i) {
    if (ra.record.rounds()[i].reward != rb.record.rounds()[i].reward) same = false;
  }
  CHECK(same);
}
