#pragma once

#include <cstdint>
#include <vector>

namespace stegarmor {

// One bit per element, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

}  // namespace stegarmor
