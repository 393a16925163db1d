#pragma once

#include <cstdint>
#include <vector>

namespace cgv {

using Index = std::int64_t;
using DenseVector = std::vector<double>;

} // namespace cgv
