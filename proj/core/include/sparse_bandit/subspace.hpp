#pragma once

#include <cstddef>

#include "sparse_bandit/types.hpp"

namespace sparse_bandit {

/// Coordinates of `v` on `support`, in support order.
Vector restrict_to(const Vector& v, const Support& support);

/// Inverse of restrict_to: places `v` on `support` inside a zero vector of
/// length `dim`.
Vector embed(const Vector& v, const Support& support, std::size_t dim);

/// Throws InputError unless `support` is strictly increasing with entries
/// below `dim`.
void validate_support(const Support& support, std::size_t dim);

}  // namespace sparse_bandit
