#pragma once

// End-to-end signing fixture shared by the test suites: a two-level
// hierarchy (root -> amf -> base-station group) with preprocessing done and
// commitments published, plus a one-call two-round signing helper.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "borg/bytes.hpp"
#include "borg/failstop.hpp"
#include "borg/group.hpp"
#include "borg/hierarchy.hpp"
#include "borg/rng.hpp"
#include "borg/thresh_sign.hpp"

namespace testutil {

struct SigningGroup {
    const borg::Group& g;
    borg::DeterministicRng rng;
    borg::MasterKey mk;
    borg::ExtractResult amf;
    borg::ExtractResult bs;
    borg::CommitmentBulletin bulletin;
    std::vector<borg::NonceStore> nonces;  // signer i at nonces[i-1]

    SigningGroup(const borg::Group& group, std::uint32_t t, std::uint32_t n,
                 std::uint32_t batch = 8, std::uint64_t seed = 1)
        : g(group), rng(seed), mk(borg::setup(g, rng)), bulletin("test") {
        borg::GroupKeyChain root{{mk.pk}};
        amf = borg::extract(g, borg::to_bytes("amf-west"), {}, root, mk.sk, 1, 1, 0, rng);
        bs = borg::extract(g, borg::to_bytes("gnb-cluster-7"), amf.shares[0].ids, amf.chain,
                           amf.level_secret.sk, t, n, 0, rng);
        for (const borg::KeyShare& s : bs.shares) {
            auto pre = borg::preprocess(g, s, batch, rng);
            bulletin.publish(g, pre.commitments);
            nonces.push_back(std::move(pre.nonces));
        }
    }

    const borg::IdentityVector& ids() const { return bs.shares[0].ids; }
    const borg::GroupKeyChain& chain() const { return bs.chain; }

    std::map<std::uint32_t, borg::GroupElement> pk_map() const {
        std::map<std::uint32_t, borg::GroupElement> m;
        for (const auto& s : bs.shares) m.emplace(s.index, s.pk_share);
        return m;
    }

    std::vector<borg::SignatureShare> round_two(std::span<const std::uint8_t> message,
                                                std::uint32_t slot,
                                                std::span<const std::uint32_t> set) {
        std::vector<borg::SignatureShare> shares;
        for (std::uint32_t i : set) {
            shares.push_back(borg::sign_share(g, message, slot, bulletin, set,
                                              bs.shares[i - 1], nonces[i - 1]));
        }
        return shares;
    }

    borg::ThresholdSignature sign(std::span<const std::uint8_t> message, std::uint32_t slot,
                                  std::span<const std::uint32_t> set) {
        auto shares = round_two(message, slot, set);
        return borg::aggregate(g, message, slot, bulletin, set, pk_map(), bs.chain, shares);
    }

    std::vector<borg::RevealedNonces> reveal_all() const {
        std::vector<borg::RevealedNonces> out;
        for (const auto& store : nonces) {
            auto [e, d] = store.reveal();
            out.push_back({store.owner(), e, d});
        }
        return out;
    }
};

// A signature that passes public verification but was not produced by the
// group: stands in for an adversary who broke the discrete log (the tests
// know the dealt secret, a real attacker would have computed it).
inline borg::ThresholdSignature forge_signature(SigningGroup& sg,
                                                std::span<const std::uint8_t> message,
                                                std::uint32_t slot,
                                                std::vector<std::uint32_t> claimed_set,
                                                std::uint64_t forge_seed = 777) {
    borg::DeterministicRng rng(forge_seed);
    const borg::Scalar sk = borg::reconstruct_secret(sg.g, sg.bs.shares);
    const borg::Scalar k = sg.g.sample_scalar(rng);
    borg::ThresholdSignature sig;
    sig.r = sg.g.exp_base(k);
    const borg::Scalar h = borg::challenge_scalar(sg.g, sig.r, sg.chain().leaf(), message);
    sig.z = sg.g.scalar_add(k, sg.g.scalar_mul(sk, h));
    sig.slot = slot;
    sig.signer_set = std::move(claimed_set);
    return sig;
}

}  // namespace testutil
