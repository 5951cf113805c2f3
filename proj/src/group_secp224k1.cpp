#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <algorithm>
#include <memory>

#include "borg/errors.hpp"
#include "borg/group.hpp"

namespace borg {
namespace {

// secp224k1: 225-bit prime group order, so scalars are 29 bytes; compressed
// points are 1 + 28 = 29 bytes. The point at infinity has no SEC1 encoding
// of that width, so the all-zero string stands in for it (disjoint from real
// points, whose first byte is 0x02 or 0x03).
constexpr std::size_t kScalarBytes = 29;
constexpr std::size_t kElementBytes = 29;

struct BnDeleter {
    void operator()(BIGNUM* p) const { BN_free(p); }
};
struct CtxDeleter {
    void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct PointDeleter {
    void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using CtxPtr = std::unique_ptr<BN_CTX, CtxDeleter>;
using PointPtr = std::unique_ptr<EC_POINT, PointDeleter>;

bool all_zero(std::span<const std::uint8_t> b) {
    return std::all_of(b.begin(), b.end(), [](std::uint8_t x) { return x == 0; });
}

class Secp224k1Group final : public Group {
  public:
    Secp224k1Group() : Group(GroupParams{"secp224k1", kScalarBytes, kElementBytes, {}}) {
        ec_ = EC_GROUP_new_by_curve_name(NID_secp224k1);
        if (!ec_) throw Error("secp224k1: curve unavailable");
        order_.reset(BN_new());
        CtxPtr ctx(BN_CTX_new());
        if (!order_ || !ctx || EC_GROUP_get_order(ec_, order_.get(), ctx.get()) != 1) {
            throw Error("secp224k1: cannot read group order");
        }
        params_.order_be = bn_to_scalar(order_.get()).bytes;
        generator_ = encode_point(EC_GROUP_get0_generator(ec_), ctx.get());
    }

    ~Secp224k1Group() override { EC_GROUP_free(ec_); }

    GroupElement generator() const override { return generator_; }

    GroupElement identity() const override {
        return GroupElement{std::vector<std::uint8_t>(kElementBytes, 0)};
    }

    bool element_valid(std::span<const std::uint8_t> enc) const override {
        if (enc.size() != kElementBytes) return false;
        if (all_zero(enc)) return true;
        CtxPtr ctx(BN_CTX_new());
        PointPtr p(EC_POINT_new(ec_));
        if (!ctx || !p) return false;
        // oct2point solves the curve equation for compressed input, so
        // success already implies the point is on the curve; the cofactor is
        // one, so on-curve means in the prime-order group.
        return EC_POINT_oct2point(ec_, p.get(), enc.data(), enc.size(), ctx.get()) == 1;
    }

    GroupElement mul(const GroupElement& a, const GroupElement& b) const override {
        CtxPtr ctx(BN_CTX_new());
        PointPtr pa = decode_point(a, ctx.get());
        PointPtr pb = decode_point(b, ctx.get());
        PointPtr r(EC_POINT_new(ec_));
        if (!r || EC_POINT_add(ec_, r.get(), pa.get(), pb.get(), ctx.get()) != 1) {
            throw Error("secp224k1: point addition failed");
        }
        return encode_point(r.get(), ctx.get());
    }

    GroupElement exp(const GroupElement& base, const Scalar& s) const override {
        CtxPtr ctx(BN_CTX_new());
        PointPtr p = decode_point(base, ctx.get());
        BnPtr k = scalar_to_bn(s);
        PointPtr r(EC_POINT_new(ec_));
        if (!r || EC_POINT_mul(ec_, r.get(), nullptr, p.get(), k.get(), ctx.get()) != 1) {
            throw Error("secp224k1: scalar multiplication failed");
        }
        return encode_point(r.get(), ctx.get());
    }

    GroupElement exp_base(const Scalar& s) const override {
        CtxPtr ctx(BN_CTX_new());
        BnPtr k = scalar_to_bn(s);
        PointPtr r(EC_POINT_new(ec_));
        if (!r || EC_POINT_mul(ec_, r.get(), k.get(), nullptr, nullptr, ctx.get()) != 1) {
            throw Error("secp224k1: base multiplication failed");
        }
        return encode_point(r.get(), ctx.get());
    }

    Scalar scalar_add(const Scalar& a, const Scalar& b) const override {
        return mod_op(a, b, [](BIGNUM* r, const BIGNUM* x, const BIGNUM* y, const BIGNUM* m,
                               BN_CTX* c) { return BN_mod_add(r, x, y, m, c); });
    }

    Scalar scalar_sub(const Scalar& a, const Scalar& b) const override {
        return mod_op(a, b, [](BIGNUM* r, const BIGNUM* x, const BIGNUM* y, const BIGNUM* m,
                               BN_CTX* c) { return BN_mod_sub(r, x, y, m, c); });
    }

    Scalar scalar_mul(const Scalar& a, const Scalar& b) const override {
        return mod_op(a, b, [](BIGNUM* r, const BIGNUM* x, const BIGNUM* y, const BIGNUM* m,
                               BN_CTX* c) { return BN_mod_mul(r, x, y, m, c); });
    }

    Scalar scalar_negate(const Scalar& a) const override { return scalar_sub(scalar_zero(), a); }

    Scalar scalar_invert(const Scalar& a) const override {
        if (scalar_is_zero(a)) throw Error("secp224k1: zero has no inverse");
        CtxPtr ctx(BN_CTX_new());
        BnPtr x = scalar_to_bn(a);
        BnPtr r(BN_new());
        if (!r || !BN_mod_inverse(r.get(), x.get(), order_.get(), ctx.get())) {
            throw Error("secp224k1: inversion failed");
        }
        return bn_to_scalar(r.get());
    }

    bool scalar_valid(std::span<const std::uint8_t> enc) const override {
        if (enc.size() != kScalarBytes) return false;
        return std::lexicographical_compare(enc.begin(), enc.end(), params_.order_be.begin(),
                                            params_.order_be.end());
    }

    Scalar scalar_reduce_wide(std::span<const std::uint8_t> wide64) const override {
        if (wide64.size() != 64) throw Error("scalar_reduce_wide: need 64 bytes");
        CtxPtr ctx(BN_CTX_new());
        BnPtr x(BN_bin2bn(wide64.data(), static_cast<int>(wide64.size()), nullptr));
        BnPtr r(BN_new());
        if (!x || !r || !BN_mod(r.get(), x.get(), order_.get(), ctx.get())) {
            throw Error("secp224k1: wide reduction failed");
        }
        return bn_to_scalar(r.get());
    }

  private:
    BnPtr scalar_to_bn(const Scalar& s) const {
        if (!scalar_valid(s.bytes)) throw Error("secp224k1: non-canonical scalar");
        BnPtr b(BN_bin2bn(s.bytes.data(), static_cast<int>(s.bytes.size()), nullptr));
        if (!b) throw Error("secp224k1: out of memory");
        return b;
    }

    Scalar bn_to_scalar(const BIGNUM* b) const {
        Scalar s{std::vector<std::uint8_t>(kScalarBytes)};
        if (BN_bn2binpad(b, s.bytes.data(), static_cast<int>(kScalarBytes)) < 0) {
            throw Error("secp224k1: scalar out of range");
        }
        return s;
    }

    PointPtr decode_point(const GroupElement& e, BN_CTX* ctx) const {
        if (e.bytes.size() != kElementBytes) throw Error("secp224k1: invalid group element");
        PointPtr p(EC_POINT_new(ec_));
        if (!p) throw Error("secp224k1: out of memory");
        if (all_zero(e.bytes)) {
            if (EC_POINT_set_to_infinity(ec_, p.get()) != 1) {
                throw Error("secp224k1: cannot build identity");
            }
            return p;
        }
        if (EC_POINT_oct2point(ec_, p.get(), e.bytes.data(), e.bytes.size(), ctx) != 1) {
            throw Error("secp224k1: invalid group element");
        }
        return p;
    }

    GroupElement encode_point(const EC_POINT* p, BN_CTX* ctx) const {
        if (EC_POINT_is_at_infinity(ec_, p)) return identity();
        GroupElement e{std::vector<std::uint8_t>(kElementBytes)};
        std::size_t n = EC_POINT_point2oct(ec_, p, POINT_CONVERSION_COMPRESSED, e.bytes.data(),
                                           kElementBytes, ctx);
        if (n != kElementBytes) throw Error("secp224k1: point encoding failed");
        return e;
    }

    template <typename Op>
    Scalar mod_op(const Scalar& a, const Scalar& b, Op op) const {
        CtxPtr ctx(BN_CTX_new());
        BnPtr x = scalar_to_bn(a);
        BnPtr y = scalar_to_bn(b);
        BnPtr r(BN_new());
        if (!ctx || !r || op(r.get(), x.get(), y.get(), order_.get(), ctx.get()) != 1) {
            throw Error("secp224k1: scalar arithmetic failed");
        }
        return bn_to_scalar(r.get());
    }

    EC_GROUP* ec_ = nullptr;
    BnPtr order_;
    GroupElement generator_;
};

}  // namespace

const Group& secp224k1_group() {
    static const Secp224k1Group g;
    return g;
}

}  // namespace borg
