#pragma once

#include <string>

namespace sparse_bandit {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace sparse_bandit
