#include "borg/hierarchy.hpp"

#include <cstring>
#include <set>

#include "borg/bytes.hpp"
#include "borg/errors.hpp"

namespace borg {

IdentityVector IdentityVector::child(std::span<const std::uint8_t> id) const {
    IdentityVector c = *this;
    c.ids.emplace_back(id.begin(), id.end());
    return c;
}

IdentityVector IdentityVector::prefix(std::size_t level) const {
    if (level > ids.size()) throw Error("identity prefix longer than path");
    IdentityVector p;
    p.ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(level));
    return p;
}

IdentityVector identity_path(std::initializer_list<const char*> labels) {
    IdentityVector v;
    for (const char* l : labels) v.ids.push_back(to_bytes(l));
    return v;
}

GroupKeyChain GroupKeyChain::prefix(std::size_t level) const {
    if (q.size() < level + 1) throw MalformedChain("chain shorter than requested prefix");
    GroupKeyChain p;
    p.q.assign(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(level + 1));
    return p;
}

bool KeyShare::same_context(const KeyShare& other) const {
    return threshold == other.threshold && group_size == other.group_size && ids == other.ids &&
           chain == other.chain;
}

MasterKey setup(const Group& g, RandomSource& rng) {
    MasterKey mk;
    mk.alpha = g.sample_scalar(rng);
    mk.sk = g.h1(mk.alpha.bytes);
    mk.pk = g.exp_base(mk.sk);
    return mk;
}

Scalar identity_hash(const Group& g, std::span<const std::uint8_t> id,
                     const GroupKeyChain& chain) {
    ByteWriter w;
    w.bytes(id);
    w.u32(static_cast<std::uint32_t>(chain.q.size()));
    for (const GroupElement& e : chain.q) w.raw(e.bytes);
    return g.h1(w.out());
}

std::vector<Scalar> chain_identity_hashes(const Group& g, const IdentityVector& ids,
                                          const GroupKeyChain& chain) {
    if (chain.q.size() != ids.level() + 1) {
        throw MalformedChain("key chain length does not match identity path");
    }
    std::vector<Scalar> hs;
    hs.reserve(ids.level());
    for (std::size_t l = 1; l <= ids.level(); ++l) {
        hs.push_back(identity_hash(g, ids.ids[l - 1], chain.prefix(l)));
    }
    return hs;
}

GroupElement chain_public_key(const Group& g, const IdentityVector& ids,
                              const GroupKeyChain& chain) {
    const std::size_t k = ids.level();
    if (k == 0) throw MalformedChain("verification needs at least one delegation level");
    const auto hs = chain_identity_hashes(g, ids, chain);  // validates lengths

    // Suffix products of level hashes: suffix[l] = h_{l+1} * ... * h_k.
    std::vector<Scalar> suffix(k + 1, g.scalar_one());
    for (std::size_t l = k; l-- > 0;) suffix[l] = g.scalar_mul(hs[l], suffix[l + 1]);

    GroupElement acc = chain.q[k];  // leaf level element, exponent 1
    for (std::size_t l = 1; l < k; ++l) {
        acc = g.mul(acc, g.exp(chain.q[l], suffix[l]));
    }
    return g.mul(acc, g.exp(chain.root(), suffix[0]));
}

ExtractResult extract(const Group& g, std::span<const std::uint8_t> child_id,
                      const IdentityVector& parent_ids, const GroupKeyChain& parent_chain,
                      const Scalar& parent_sk, std::uint32_t threshold, std::uint32_t group_size,
                      std::int64_t expiry_ms, RandomSource& rng) {
    if (threshold < 1 || threshold > group_size) {
        throw InvalidThreshold("need 1 <= threshold <= group size");
    }
    if (parent_chain.q.size() != parent_ids.level() + 1) {
        throw MalformedChain("parent chain length does not match parent identity path");
    }

    ExtractResult out;
    out.level_secret.alpha = g.sample_scalar(rng);
    const Scalar r = g.h1(out.level_secret.alpha.bytes);

    out.chain = parent_chain;
    out.chain.q.push_back(g.exp_base(r));
    const IdentityVector ids = parent_ids.child(child_id);
    const Scalar h = identity_hash(g, child_id, out.chain);
    out.level_secret.sk = g.scalar_add(g.scalar_mul(parent_sk, h), r);

    // Shamir polynomial f with f(0) = level secret, degree threshold - 1.
    std::vector<Scalar> coeff;
    coeff.push_back(out.level_secret.sk);
    for (std::uint32_t i = 1; i < threshold; ++i) coeff.push_back(g.sample_scalar(rng));

    out.shares.reserve(group_size);
    out.share_pks.reserve(group_size);
    for (std::uint32_t i = 1; i <= group_size; ++i) {
        // Horner evaluation at x = i.
        const Scalar x = g.scalar_from_u64(i);
        Scalar y = coeff.back();
        for (std::size_t c = coeff.size() - 1; c-- > 0;) {
            y = g.scalar_add(g.scalar_mul(y, x), coeff[c]);
        }
        KeyShare s;
        s.index = i;
        s.sk_share = y;
        s.pk_share = g.exp_base(y);
        s.threshold = threshold;
        s.group_size = group_size;
        s.ids = ids;
        s.chain = out.chain;
        s.expiry_ms = expiry_ms;
        out.share_pks.push_back(s.pk_share);
        out.shares.push_back(std::move(s));
    }
    return out;
}

std::vector<Scalar> lagrange_coefficients(const Group& g,
                                          std::span<const std::uint32_t> indices) {
    if (indices.empty()) throw Error("lagrange: empty index set");
    std::set<std::uint32_t> seen;
    for (std::uint32_t i : indices) {
        if (i == 0) throw Error("lagrange: indices are 1-based");
        if (!seen.insert(i).second) throw DuplicateIndex("lagrange: repeated index");
    }
    std::vector<Scalar> lambdas;
    lambdas.reserve(indices.size());
    for (std::uint32_t i : indices) {
        Scalar num = g.scalar_one();
        Scalar den = g.scalar_one();
        const Scalar xi = g.scalar_from_u64(i);
        for (std::uint32_t j : indices) {
            if (j == i) continue;
            const Scalar xj = g.scalar_from_u64(j);
            num = g.scalar_mul(num, xj);
            den = g.scalar_mul(den, g.scalar_sub(xj, xi));
        }
        lambdas.push_back(g.scalar_mul(num, g.scalar_invert(den)));
    }
    return lambdas;
}

Scalar reconstruct_secret(const Group& g, std::span<const KeyShare> shares) {
    if (shares.empty()) throw InsufficientShares("no shares given");
    for (const KeyShare& s : shares) {
        if (!s.same_context(shares.front())) {
            throw MixedContext("shares come from different dealings");
        }
    }
    if (shares.size() < shares.front().threshold) {
        throw InsufficientShares("fewer shares than the reconstruction threshold");
    }
    std::vector<std::uint32_t> indices;
    indices.reserve(shares.size());
    for (const KeyShare& s : shares) indices.push_back(s.index);
    const auto lambdas = lagrange_coefficients(g, indices);  // rejects duplicates

    Scalar acc = g.scalar_zero();
    for (std::size_t i = 0; i < shares.size(); ++i) {
        acc = g.scalar_add(acc, g.scalar_mul(lambdas[i], shares[i].sk_share));
    }
    return acc;
}

}  // namespace borg
