#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace borg {

std::string to_hex(std::span<const std::uint8_t> bytes);

// Strict decoder: even length, lowercase or uppercase digits only.
// Throws ParseError otherwise.
std::vector<std::uint8_t> from_hex(std::string_view hex);

}  // namespace borg
