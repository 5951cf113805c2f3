#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace borg {

// Idempotent libsodium startup; every entry point that touches the crypto
// backends calls this first. Throws Error if the runtime refuses to start.
void ensure_crypto_runtime();

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);

}  // namespace borg
