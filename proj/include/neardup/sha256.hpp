#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace neardup {

using Sha256 = std::array<uint8_t, 32>;

Sha256 sha256(std::string_view data);
std::string to_hex(const Sha256& digest);

}  // namespace neardup
