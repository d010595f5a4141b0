#include "sparse_bandit/rng.hpp"

#include <cmath>

#include "sparse_bandit/errors.hpp"

namespace sparse_bandit {

RngStream::RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

std::uint64_t RngStream::next_u64() {
  ++position_;
  return engine_();
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::rademacher() {
  return (next_u64() >> 63) != 0 ? 1.0 : -1.0;
}

double RngStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * factor;
  has_spare_normal_ = true;
  return u * factor;
}

std::uint64_t RngStream::uniform_index(std::uint64_t bound) {
  if (bound == 0) throw InputError("uniform_index bound must be positive");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

Vector RngStream::unit_sphere(std::size_t dim) {
  if (dim == 0) throw InputError("sphere dimension must be positive");
  Vector v(static_cast<Eigen::Index>(dim));
  double norm = 0.0;
  do {
    for (auto& x : v) x = normal();
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t cell,
                               std::uint64_t replication) {
  return mix64(mix64(mix64(base_seed) ^ cell) ^ replication);
}

}  // namespace sparse_bandit
