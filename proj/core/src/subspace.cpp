#include "sparse_bandit/subspace.hpp"

#include <string>

#include "sparse_bandit/errors.hpp"

namespace sparse_bandit {

void validate_support(const Support& support, std::size_t dim) {
  for (std::size_t j = 0; j < support.size(); ++j) {
    if (support[j] >= dim) {
      throw InputError("support index " + std::to_string(support[j]) +
                       " out of range for dimension " + std::to_string(dim));
    }
    if (j > 0 && support[j] <= support[j - 1]) {
      throw InputError("support must be strictly increasing");
    }
  }
}

Vector restrict_to(const Vector& v, const Support& support) {
  validate_support(support, static_cast<std::size_t>(v.size()));
  Vector out(static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) {
    out[static_cast<Eigen::Index>(j)] = v[static_cast<Eigen::Index>(support[j])];
  }
  return out;
}

Vector embed(const Vector& v, const Support& support, std::size_t dim) {
  if (static_cast<std::size_t>(v.size()) != support.size()) {
    throw InputError("embed: vector length " + std::to_string(v.size()) +
                     " does not match support size " +
                     std::to_string(support.size()));
  }
  validate_support(support, dim);
  Vector out = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < support.size(); ++j) {
    out[static_cast<Eigen::Index>(support[j])] = v[static_cast<Eigen::Index>(j)];
  }
  return out;
}

}  // namespace sparse_bandit
