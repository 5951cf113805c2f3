#include "borg/group.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>

#include "borg/errors.hpp"
#include "borg/hash.hpp"

namespace borg {

void ensure_crypto_runtime() {
    static const int rc = sodium_init();
    if (rc < 0) throw Error("libsodium failed to initialize");
}

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
    ensure_crypto_runtime();
    std::array<std::uint8_t, 32> out;
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

Scalar Group::scalar_zero() const {
    return Scalar{std::vector<std::uint8_t>(params_.scalar_bytes, 0)};
}

Scalar Group::scalar_one() const {
    return scalar_from_u64(1);
}

Scalar Group::scalar_from_u64(std::uint64_t v) const {
    Scalar s{std::vector<std::uint8_t>(params_.scalar_bytes, 0)};
    for (std::size_t i = 0; i < 8 && i < params_.scalar_bytes; ++i) {
        s.bytes[params_.scalar_bytes - 1 - i] = static_cast<std::uint8_t>(v >> (8 * i));
    }
    return s;
}

bool Group::scalar_is_zero(const Scalar& s) const {
    return std::all_of(s.bytes.begin(), s.bytes.end(), [](std::uint8_t b) { return b == 0; });
}

Scalar Group::sample_scalar(RandomSource& rng) const {
    std::uint8_t wide[64];
    rng.fill(wide);
    return scalar_reduce_wide(wide);
}

Scalar Group::hash_to_scalar(std::string_view tag, std::span<const std::uint8_t> data) const {
    std::vector<std::uint8_t> preimage;
    preimage.reserve(tag.size() + data.size());
    preimage.insert(preimage.end(), tag.begin(), tag.end());
    preimage.insert(preimage.end(), data.begin(), data.end());
    auto digest = sha256(preimage);
    // Zero-extend the 32-byte digest into the low half of a 64-byte
    // big-endian integer, then reduce. The value is digest mod q either way;
    // going through the wide path keeps one reduction routine per backend.
    std::uint8_t wide[64] = {0};
    std::memcpy(wide + 32, digest.data(), 32);
    return scalar_reduce_wide(wide);
}

Scalar Group::h1(std::span<const std::uint8_t> data) const {
    return hash_to_scalar("BORG-H1", data);
}

Scalar Group::h2(std::span<const std::uint8_t> data) const {
    return hash_to_scalar("BORG-H2", data);
}

const Group& group_by_name(std::string_view name) {
    if (name == "ristretto255") return ristretto255_group();
    if (name == "secp224k1") return secp224k1_group();
    throw Error("unknown group: " + std::string(name));
}

}  // namespace borg
