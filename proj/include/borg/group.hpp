#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "borg/rng.hpp"

namespace borg {

// Canonical fixed-width byte encodings. Scalars are big-endian integers in
// [0, q); elements are the backend's canonical point encoding. Both compare
// bytewise, so equal values always have equal encodings and vice versa.
struct Scalar {
    std::vector<std::uint8_t> bytes;
    bool operator==(const Scalar&) const = default;
};

struct GroupElement {
    std::vector<std::uint8_t> bytes;
    bool operator==(const GroupElement&) const = default;
};

struct GroupParams {
    std::string name;
    std::size_t scalar_bytes;
    std::size_t element_bytes;
    std::vector<std::uint8_t> order_be;  // group order q, big-endian, scalar_bytes wide
};

// A prime-order group with hard discrete log, exposed abstractly so the
// signing stack is generic over the backend. Implementations are stateless
// after construction; all methods are safe to call concurrently.
class Group {
  public:
    virtual ~Group() = default;

    const GroupParams& params() const { return params_; }
    const std::string& name() const { return params_.name; }
    std::size_t scalar_bytes() const { return params_.scalar_bytes; }
    std::size_t element_bytes() const { return params_.element_bytes; }

    virtual GroupElement generator() const = 0;
    virtual GroupElement identity() const = 0;
    virtual bool element_valid(std::span<const std::uint8_t> encoding) const = 0;

    // Group operation and exponentiation. Operands must be valid encodings
    // of this group (checked; Error on violation).
    virtual GroupElement mul(const GroupElement& a, const GroupElement& b) const = 0;
    virtual GroupElement exp(const GroupElement& base, const Scalar& s) const = 0;
    virtual GroupElement exp_base(const Scalar& s) const = 0;

    // Scalar field arithmetic mod q.
    virtual Scalar scalar_add(const Scalar& a, const Scalar& b) const = 0;
    virtual Scalar scalar_sub(const Scalar& a, const Scalar& b) const = 0;
    virtual Scalar scalar_mul(const Scalar& a, const Scalar& b) const = 0;
    virtual Scalar scalar_negate(const Scalar& a) const = 0;
    virtual Scalar scalar_invert(const Scalar& a) const = 0;  // Error on zero
    virtual bool scalar_valid(std::span<const std::uint8_t> encoding) const = 0;

    // Reduce a 64-byte big-endian integer mod q. Wide enough input that the
    // result is statistically uniform when the input is.
    virtual Scalar scalar_reduce_wide(std::span<const std::uint8_t> wide64) const = 0;

    Scalar scalar_zero() const;
    Scalar scalar_one() const;
    Scalar scalar_from_u64(std::uint64_t v) const;
    bool scalar_is_zero(const Scalar& s) const;

    // Uniform scalar via 64-byte draw + wide reduction.
    Scalar sample_scalar(RandomSource& rng) const;

    // Domain-separated hashes into the scalar field:
    //   H1 = SHA-256("BORG-H1" || data), H2 = SHA-256("BORG-H2" || data),
    // each read as a big-endian integer and reduced mod q.
    Scalar h1(std::span<const std::uint8_t> data) const;
    Scalar h2(std::span<const std::uint8_t> data) const;

  protected:
    explicit Group(GroupParams params) : params_(std::move(params)) {}
    Scalar hash_to_scalar(std::string_view tag, std::span<const std::uint8_t> data) const;

    GroupParams params_;
};

// Backend registry. Both accessors return process-lifetime singletons.
const Group& ristretto255_group();
const Group& secp224k1_group();
const Group& group_by_name(std::string_view name);  // Error on unknown name

}  // namespace borg
