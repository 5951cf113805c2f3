#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "borg/group.hpp"
#include "borg/rng.hpp"

namespace borg {

// Identity path from the root authority down to a node, e.g.
// {"amf-west", "gnb-cluster-7"}. Level k is the number of path components.
struct IdentityVector {
    std::vector<std::vector<std::uint8_t>> ids;

    std::size_t level() const { return ids.size(); }
    IdentityVector child(std::span<const std::uint8_t> id) const;
    IdentityVector prefix(std::size_t level) const;
    bool operator==(const IdentityVector&) const = default;
};

IdentityVector identity_path(std::initializer_list<const char*> labels);

// Public key chain published alongside signatures: the root public key
// followed by one level element per delegation, so size() == level + 1.
struct GroupKeyChain {
    std::vector<GroupElement> q;

    std::size_t level() const { return q.empty() ? 0 : q.size() - 1; }
    const GroupElement& root() const { return q.front(); }
    const GroupElement& leaf() const { return q.back(); }
    GroupKeyChain prefix(std::size_t level) const;
    bool operator==(const GroupKeyChain&) const = default;
};

struct MasterKey {
    Scalar alpha;  // root entropy, retained for dispute resolution
    Scalar sk;
    GroupElement pk;
};

// What the dealer of level k keeps: the level entropy alpha_k (needed to
// adjudicate forgery proofs) and the level secret it shared out. Production
// deployments persist alpha and discard sk once shares are issued.
struct LevelSecret {
    Scalar alpha;
    Scalar sk;
};

struct KeyShare {
    std::uint32_t index = 0;  // 1-based share index
    Scalar sk_share;
    GroupElement pk_share;
    std::uint32_t threshold = 0;
    std::uint32_t group_size = 0;
    IdentityVector ids;
    GroupKeyChain chain;
    std::int64_t expiry_ms = 0;  // unix epoch ms; 0 means no expiry

    bool same_context(const KeyShare& other) const;
};

struct ExtractResult {
    std::vector<KeyShare> shares;           // index i at shares[i-1]
    std::vector<GroupElement> share_pks;    // g^{f(i)} at share_pks[i-1]
    GroupKeyChain chain;
    LevelSecret level_secret;
};

// Root key generation: sk = H1(alpha) for fresh entropy alpha, pk = g^sk.
MasterKey setup(const Group& g, RandomSource& rng);

// Per-level identity hash h_ID = H1(id || chain-so-far). `chain` must be the
// chain up to and including this identity's level element.
Scalar identity_hash(const Group& g, std::span<const std::uint8_t> id, const GroupKeyChain& chain);

// All level hashes h_1..h_k for a node. Throws MalformedChain when the chain
// length does not match the identity path.
std::vector<Scalar> chain_identity_hashes(const Group& g, const IdentityVector& ids,
                                          const GroupKeyChain& chain);

// The public key a verifier reconstructs for a node from public data only:
//   (prod of intermediate level elements raised to suffix hash products)
//   * leaf level element * root_pk^(h_1 * ... * h_k).
// Equals g^sk for the honestly derived level secret sk.
GroupElement chain_public_key(const Group& g, const IdentityVector& ids,
                              const GroupKeyChain& chain);

// Delegation: the holder of the parent secret derives the child level secret
//   sk_child = parent_sk * h_child + r   with r = H1(alpha), level element g^r,
// then deals it into n Shamir shares with reconstruction threshold t.
ExtractResult extract(const Group& g, std::span<const std::uint8_t> child_id,
                      const IdentityVector& parent_ids, const GroupKeyChain& parent_chain,
                      const Scalar& parent_sk, std::uint32_t threshold, std::uint32_t group_size,
                      std::int64_t expiry_ms, RandomSource& rng);

// Lagrange interpolation weights at x = 0 for the given distinct 1-based
// indices. Order of the result matches the order of `indices`.
std::vector<Scalar> lagrange_coefficients(const Group& g, std::span<const std::uint32_t> indices);

// Interpolates the level secret from any >= threshold shares of one context.
Scalar reconstruct_secret(const Group& g, std::span<const KeyShare> shares);

}  // namespace borg
