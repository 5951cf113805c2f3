#include <sodium.h>

#include <algorithm>
#include <cstring>

#include "borg/errors.hpp"
#include "borg/group.hpp"
#include "borg/hash.hpp"

namespace borg {
namespace {

constexpr std::size_t kBytes = 32;

// Group order L = 2^252 + 27742317777372353535851937790883648493, big-endian.
constexpr std::uint8_t kOrderBe[kBytes] = {
    0x10, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
    0x14, 0xde, 0xf9, 0xde, 0xa2, 0xf7, 0x9c, 0xd6, 0x58, 0x12, 0x63, 0x1a, 0x5c, 0xf5, 0xd3, 0xed,
};

// libsodium's scalar API is little-endian; the canonical encoding here is
// big-endian, so every boundary crossing reverses the 32 bytes.
void to_le(const Scalar& s, std::uint8_t out[kBytes]) {
    for (std::size_t i = 0; i < kBytes; ++i) out[i] = s.bytes[kBytes - 1 - i];
}

Scalar from_le(const std::uint8_t in[kBytes]) {
    Scalar s{std::vector<std::uint8_t>(kBytes)};
    for (std::size_t i = 0; i < kBytes; ++i) s.bytes[i] = in[kBytes - 1 - i];
    return s;
}

class Ristretto255Group final : public Group {
  public:
    Ristretto255Group()
        : Group(GroupParams{"ristretto255", kBytes, kBytes,
                            std::vector<std::uint8_t>(kOrderBe, kOrderBe + kBytes)}) {
        ensure_crypto_runtime();
        std::uint8_t one_le[kBytes] = {1};
        if (crypto_scalarmult_ristretto255_base(generator_, one_le) != 0) {
            throw Error("ristretto255: cannot derive generator");
        }
    }

    GroupElement generator() const override {
        return GroupElement{std::vector<std::uint8_t>(generator_, generator_ + kBytes)};
    }

    GroupElement identity() const override {
        return GroupElement{std::vector<std::uint8_t>(kBytes, 0)};
    }

    bool element_valid(std::span<const std::uint8_t> enc) const override {
        if (enc.size() != kBytes) return false;
        return crypto_core_ristretto255_is_valid_point(enc.data()) == 1;
    }

    GroupElement mul(const GroupElement& a, const GroupElement& b) const override {
        check_element(a);
        check_element(b);
        GroupElement r{std::vector<std::uint8_t>(kBytes)};
        if (crypto_core_ristretto255_add(r.bytes.data(), a.bytes.data(), b.bytes.data()) != 0) {
            throw Error("ristretto255: point addition failed");
        }
        return r;
    }

    GroupElement exp(const GroupElement& base, const Scalar& s) const override {
        check_element(base);
        check_scalar(s);
        // scalarmult reports the identity result as an error, but in a
        // prime-order group that only happens for a zero exponent or an
        // identity base; both map to the identity.
        if (scalar_is_zero(s) || base == identity()) return identity();
        std::uint8_t n_le[kBytes];
        to_le(s, n_le);
        GroupElement r{std::vector<std::uint8_t>(kBytes)};
        if (crypto_scalarmult_ristretto255(r.bytes.data(), n_le, base.bytes.data()) != 0) {
            throw Error("ristretto255: scalar multiplication failed");
        }
        return r;
    }

    GroupElement exp_base(const Scalar& s) const override {
        check_scalar(s);
        if (scalar_is_zero(s)) return identity();
        std::uint8_t n_le[kBytes];
        to_le(s, n_le);
        GroupElement r{std::vector<std::uint8_t>(kBytes)};
        if (crypto_scalarmult_ristretto255_base(r.bytes.data(), n_le) != 0) {
            throw Error("ristretto255: base multiplication failed");
        }
        return r;
    }

    Scalar scalar_add(const Scalar& a, const Scalar& b) const override {
        check_scalar(a);
        check_scalar(b);
        std::uint8_t x[kBytes], y[kBytes], z[kBytes];
        to_le(a, x);
        to_le(b, y);
        crypto_core_ristretto255_scalar_add(z, x, y);
        return from_le(z);
    }

    Scalar scalar_sub(const Scalar& a, const Scalar& b) const override {
        check_scalar(a);
        check_scalar(b);
        std::uint8_t x[kBytes], y[kBytes], z[kBytes];
        to_le(a, x);
        to_le(b, y);
        crypto_core_ristretto255_scalar_sub(z, x, y);
        return from_le(z);
    }

    Scalar scalar_mul(const Scalar& a, const Scalar& b) const override {
        check_scalar(a);
        check_scalar(b);
        std::uint8_t x[kBytes], y[kBytes], z[kBytes];
        to_le(a, x);
        to_le(b, y);
        crypto_core_ristretto255_scalar_mul(z, x, y);
        return from_le(z);
    }

    Scalar scalar_negate(const Scalar& a) const override {
        check_scalar(a);
        std::uint8_t x[kBytes], z[kBytes];
        to_le(a, x);
        crypto_core_ristretto255_scalar_negate(z, x);
        return from_le(z);
    }

    Scalar scalar_invert(const Scalar& a) const override {
        check_scalar(a);
        std::uint8_t x[kBytes], z[kBytes];
        to_le(a, x);
        if (crypto_core_ristretto255_scalar_invert(z, x) != 0) {
            throw Error("ristretto255: zero has no inverse");
        }
        return from_le(z);
    }

    bool scalar_valid(std::span<const std::uint8_t> enc) const override {
        if (enc.size() != kBytes) return false;
        // Canonical iff the big-endian value is below the group order.
        return std::lexicographical_compare(enc.begin(), enc.end(), kOrderBe, kOrderBe + kBytes);
    }

    Scalar scalar_reduce_wide(std::span<const std::uint8_t> wide64) const override {
        if (wide64.size() != 64) throw Error("scalar_reduce_wide: need 64 bytes");
        std::uint8_t in_le[64], out_le[kBytes];
        for (std::size_t i = 0; i < 64; ++i) in_le[i] = wide64[63 - i];
        crypto_core_ristretto255_scalar_reduce(out_le, in_le);
        return from_le(out_le);
    }

  private:
    void check_element(const GroupElement& e) const {
        if (!element_valid(e.bytes)) throw Error("ristretto255: invalid group element");
    }
    void check_scalar(const Scalar& s) const {
        if (!scalar_valid(s.bytes)) throw Error("ristretto255: non-canonical scalar");
    }

    std::uint8_t generator_[kBytes];
};

}  // namespace

const Group& ristretto255_group() {
    static const Ristretto255Group g;
    return g;
}

}  // namespace borg
