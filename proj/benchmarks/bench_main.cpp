#include <benchmark/benchmark.h>

#include <Eigen/QR>

#include "sparse_bandit/cb2.hpp"
#include "sparse_bandit/ellipsoid.hpp"
#include "sparse_bandit/environment.hpp"
#include "sparse_bandit/rng.hpp"
#include "sparse_bandit/slucb.hpp"

using namespace sparse_bandit;

namespace {

Matrix random_spd(Eigen::Index d, RngStream& rng) {
  Matrix G(d, d);
  for (auto& x : G.reshaped()) x = rng.normal();
  return G * G.transpose() + Matrix::Identity(d, d);
}

void BM_MaxNormInEllipsoid(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  RngStream rng(1);
  const Matrix A = random_spd(d, rng);
  Vector c(d);
  for (auto& x : c) x = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_norm_in_ellipsoid(A, c, 10.0).value);
  }
}
BENCHMARK(BM_MaxNormInEllipsoid)->RangeMultiplier(4)->Range(2, 128);

void BM_Cb2Update(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  RngStream rng(2);
  auto s = EllipsoidState::initial(d, 1.0);
  const Vector x = rng.unit_sphere(d);
  for (auto _ : state) {
    s = update(s, x, 0.5);
    benchmark::DoNotOptimize(s.theta_hat.data());
  }
}
BENCHMARK(BM_Cb2Update)->RangeMultiplier(4)->Range(2, 128);

void BM_SlucbRun(benchmark::State& state) {
  const auto K = static_cast<Eigen::Index>(state.range(0));
  Vector theta = Vector::Zero(K);
  theta[0] = 14.0;
  theta[1] = -14.0;
  const auto inst = ProblemInstance::uniform_noise(theta, 0.1);
  const auto noise = NoiseModel::for_instance(inst);
  SlucbConfig cfg;
  cfg.n = 2000;
  cfg.theta2_bar = inst.theta_norm();
  cfg.sigma2_bar = inst.sigma_norm();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RngStream rng(++seed);
    benchmark::DoNotOptimize(run_slucb(inst, cfg, noise, rng, {}).exploration_length);
  }
}
BENCHMARK(BM_SlucbRun)->Arg(50)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
