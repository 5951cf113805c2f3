#include "borg/rng.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>

#include "borg/bytes.hpp"
#include "borg/errors.hpp"
#include "borg/hash.hpp"

namespace borg {

std::uint64_t RandomSource::uniform(std::uint64_t bound) {
    if (bound == 0) throw Error("uniform: bound must be positive");
    // Rejection sampling: retry while the draw falls in the biased remainder
    // of the 64-bit range.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        std::uint8_t b[8];
        fill(b);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | b[i];
        if (v >= threshold) return v % bound;
    }
}

DeterministicRng::DeterministicRng(std::uint64_t seed) {
    ensure_crypto_runtime();
    ByteWriter w;
    w.str("BORG-SEED");
    w.u64(seed);
    auto key = sha256(w.out());
    std::memcpy(key_, key.data(), sizeof key_);
    std::memset(nonce_, 0, sizeof nonce_);
}

void DeterministicRng::fill(std::span<std::uint8_t> out) {
    if (out.empty()) return;
    // ChaCha20 keystream bytes [counter_, counter_ + n), generated by xoring
    // zeros starting at the enclosing 64-byte block.
    const std::uint64_t start_block = counter_ / 64;
    const std::size_t skip = static_cast<std::size_t>(counter_ % 64);
    std::vector<std::uint8_t> buf(skip + out.size(), 0);
    crypto_stream_chacha20_xor_ic(buf.data(), buf.data(), buf.size(), nonce_, start_block, key_);
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(skip), buf.end(), out.begin());
    counter_ += out.size();
}

void SystemRng::fill(std::span<std::uint8_t> out) {
    ensure_crypto_runtime();
    randombytes_buf(out.data(), out.size());
}

}  // namespace borg
