#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace borg {

// Source of random bytes. Library code only ever draws through this
// interface so every run can be made reproducible by injecting a seeded
// instance.
class RandomSource {
  public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;

    std::vector<std::uint8_t> bytes(std::size_t n) {
        std::vector<std::uint8_t> v(n);
        fill(v);
        return v;
    }

    // Uniform draw from [0, bound) via rejection sampling; bound must be > 0.
    std::uint64_t uniform(std::uint64_t bound);
};

// Deterministic stream cipher keystream (ChaCha20). The same seed always
// yields the same byte stream, on every platform, which is what the
// reproducibility guarantees in the CLI and simulator rest on.
class DeterministicRng final : public RandomSource {
  public:
    explicit DeterministicRng(std::uint64_t seed);
    void fill(std::span<std::uint8_t> out) override;

  private:
    std::uint8_t key_[32];
    std::uint8_t nonce_[8];
    std::uint64_t counter_ = 0;  // absolute keystream byte offset
};

// Operating system entropy, for real deployments of the key generator.
class SystemRng final : public RandomSource {
  public:
    void fill(std::span<std::uint8_t> out) override;
};

}  // namespace borg
