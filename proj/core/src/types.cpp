#include "sparse_bandit/types.hpp"

#include <bit>
#include <cmath>
#include <string>
#include <utility>

#include "sparse_bandit/errors.hpp"

namespace sparse_bandit {

ArmVector::ArmVector(Vector coords) : coords_(std::move(coords)) {
  if (!coords_.allFinite()) {
    throw InputError("arm has non-finite coordinates");
  }
  const double norm = coords_.norm();
  if (norm > 1.0 + kBallTolerance) {
    throw InputError("arm norm " + std::to_string(norm) +
                     " is outside the unit ball");
  }
}

ArmVector ArmVector::zero(std::size_t dim) {
  return ArmVector(Vector::Zero(static_cast<Eigen::Index>(dim)));
}

ArmVector ArmVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) {
    throw InputError("basis index out of range");
  }
  return ArmVector(Vector::Unit(static_cast<Eigen::Index>(dim),
                                static_cast<Eigen::Index>(index)));
}

ProblemInstance::ProblemInstance(Vector theta, Vector sigma)
    : theta_(std::move(theta)), sigma_(std::move(sigma)) {
  if (theta_.size() == 0) {
    throw InputError("instance dimension must be positive");
  }
  if (sigma_.size() != theta_.size()) {
    throw InputError("sigma has length " + std::to_string(sigma_.size()) +
                     ", expected " + std::to_string(theta_.size()));
  }
  if (!theta_.allFinite() || !sigma_.allFinite()) {
    throw InputError("instance has non-finite entries");
  }
  if ((sigma_.array() < 0.0).any()) {
    throw InputError("noise scales must be nonnegative");
  }
}

ProblemInstance ProblemInstance::uniform_noise(Vector theta,
                                               double sigma_scale) {
  Vector sigma = Vector::Constant(theta.size(), sigma_scale);
  return ProblemInstance(std::move(theta), std::move(sigma));
}

std::size_t ProblemInstance::sparsity() const {
  return static_cast<std::size_t>((theta_.array() != 0.0).count());
}

Support ProblemInstance::support() const {
  Support s;
  for (Eigen::Index k = 0; k < theta_.size(); ++k) {
    if (theta_[k] != 0.0) s.push_back(static_cast<std::size_t>(k));
  }
  return s;
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    h ^= (word >> (8 * i)) & 0xffU;
    h *= kFnvPrime;
  }
}

}  // namespace

std::uint64_t ProblemInstance::digest() const {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, static_cast<std::uint64_t>(theta_.size()));
  for (double v : theta_) fnv_mix(h, std::bit_cast<std::uint64_t>(v));
  for (double v : sigma_) fnv_mix(h, std::bit_cast<std::uint64_t>(v));
  return h;
}

}  // namespace sparse_bandit
