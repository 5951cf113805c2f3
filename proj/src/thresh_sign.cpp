#include "borg/thresh_sign.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "borg/bytes.hpp"
#include "borg/errors.hpp"
#include "borg/hex.hpp"

namespace borg {

namespace {

// Sorted, duplicate-free copy of a signer set.
std::vector<std::uint32_t> normalize_set(std::span<const std::uint32_t> signer_set) {
    std::vector<std::uint32_t> s(signer_set.begin(), signer_set.end());
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
        throw DuplicateIndex("signer set contains a repeated index");
    }
    return s;
}

}  // namespace

std::vector<std::uint8_t> participant_id_bytes(const IdentityVector& ids, std::uint32_t index) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(ids.level()));
    for (const auto& id : ids.ids) w.bytes(id);
    w.u32(index);
    return w.take();
}

Scalar derive_nonce(const Group& g, const Scalar& seed_hat, std::uint32_t slot,
                    std::span<const std::uint8_t> id_bytes) {
    ByteWriter w;
    w.raw(seed_hat.bytes);
    w.u32(slot);
    w.raw(id_bytes);
    return g.h1(w.out());
}

NonceStore::NonceStore(const Group& g, std::uint32_t owner, std::vector<std::uint8_t> id_bytes,
                       Scalar e_hat, Scalar d_hat, std::uint32_t capacity)
    : owner_(owner),
      id_bytes_(std::move(id_bytes)),
      e_hat_(std::move(e_hat)),
      d_hat_(std::move(d_hat)),
      consumed_(capacity, false) {
    if (!g.scalar_valid(e_hat_.bytes) || !g.scalar_valid(d_hat_.bytes)) {
        throw Error("nonce store: seeds must be canonical scalars");
    }
}

void NonceStore::check_slot(std::uint32_t slot) const {
    if (slot < 1 || slot > consumed_.size()) {
        throw UnknownMessageIndex("slot outside the preprocessed batch");
    }
}

bool NonceStore::consumed(std::uint32_t slot) const {
    check_slot(slot);
    return consumed_[slot - 1];
}

void NonceStore::mark_consumed(std::uint32_t slot) {
    check_slot(slot);
    if (consumed_[slot - 1]) throw NonceReuse("slot already used for signing");
    consumed_[slot - 1] = true;
}

std::pair<Scalar, Scalar> NonceStore::nonce_scalars(const Group& g, std::uint32_t slot) const {
    check_slot(slot);
    return {derive_nonce(g, e_hat_, slot, id_bytes_), derive_nonce(g, d_hat_, slot, id_bytes_)};
}

PreprocessOutput preprocess(const Group& g, const KeyShare& share, std::uint32_t capacity,
                            RandomSource& rng) {
    if (capacity == 0) throw Error("preprocess: batch capacity must be positive");
    auto id_bytes = participant_id_bytes(share.ids, share.index);
    PreprocessOutput out{
        NonceStore(g, share.index, id_bytes, g.sample_scalar(rng), g.sample_scalar(rng),
                   capacity),
        CommitmentList{share.index, {}}};
    out.commitments.entries.reserve(capacity);
    for (std::uint32_t slot = 1; slot <= capacity; ++slot) {
        auto [e, d] = out.nonces.nonce_scalars(g, slot);
        out.commitments.entries.push_back({g.exp_base(e), g.exp_base(d)});
    }
    return out;
}

bool validate_commitments(const Group& g, const CommitmentList& list) {
    if (list.signer == 0 || list.entries.empty()) return false;
    for (const CommitmentPair& p : list.entries) {
        if (!g.element_valid(p.e_commit.bytes) || !g.element_valid(p.d_commit.bytes)) {
            return false;
        }
    }
    return true;
}

CommitmentBulletin::CommitmentBulletin(const CommitmentBulletin& other) {
    std::shared_lock lock(other.mutex_);
    context_ = other.context_;
    lists_ = other.lists_;
}

void CommitmentBulletin::publish(const Group& g, CommitmentList list) {
    if (!validate_commitments(g, list)) {
        throw Error("bulletin: rejected commitment batch with invalid entries");
    }
    std::unique_lock lock(mutex_);
    lists_[list.signer] = std::move(list);
}

std::map<std::uint32_t, CommitmentPair> CommitmentBulletin::slot_pairs(
    std::span<const std::uint32_t> signer_set, std::uint32_t slot) const {
    std::shared_lock lock(mutex_);
    std::map<std::uint32_t, CommitmentPair> out;
    for (std::uint32_t i : signer_set) {
        auto it = lists_.find(i);
        if (it == lists_.end()) {
            throw IncompleteSet("no commitment batch published for signer " + std::to_string(i));
        }
        if (slot < 1 || slot > it->second.entries.size()) {
            throw UnknownMessageIndex("slot outside signer " + std::to_string(i) + "'s batch");
        }
        out.emplace(i, it->second.entries[slot - 1]);
    }
    return out;
}

std::vector<std::uint32_t> CommitmentBulletin::signers() const {
    std::shared_lock lock(mutex_);
    std::vector<std::uint32_t> out;
    out.reserve(lists_.size());
    for (const auto& [i, _] : lists_) out.push_back(i);
    return out;
}

void CommitmentBulletin::save(const std::string& path) const {
    std::shared_lock lock(mutex_);
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write bulletin file: " + path);
    for (const auto& [signer, list] : lists_) {
        nlohmann::ordered_json rec;
        rec["version"] = 1;
        rec["context"] = context_;
        rec["signer"] = signer;
        auto& arr = rec["commitments"] = nlohmann::ordered_json::array();
        for (const CommitmentPair& p : list.entries) {
            arr.push_back({to_hex(p.e_commit.bytes), to_hex(p.d_commit.bytes)});
        }
        f << rec.dump() << '\n';
    }
}

CommitmentBulletin CommitmentBulletin::load(const Group& g, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read bulletin file: " + path);
    CommitmentBulletin b;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
            if (rec.at("version").get<int>() != 1) {
                throw ParseError("bulletin: unsupported record version");
            }
            CommitmentList list;
            list.signer = rec.at("signer").get<std::uint32_t>();
            for (const auto& pair : rec.at("commitments")) {
                list.entries.push_back({GroupElement{from_hex(pair.at(0).get<std::string>())},
                                        GroupElement{from_hex(pair.at(1).get<std::string>())}});
            }
            if (first) {
                b.context_ = rec.at("context").get<std::string>();
                first = false;
            }
            b.publish(g, std::move(list));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bulletin: malformed record: ") + e.what());
        }
    }
    return b;
}

GroupCommitment derive_group_commitment(
    const Group& g, std::span<const std::uint8_t> message, std::uint32_t slot,
    const std::map<std::uint32_t, CommitmentPair>& slot_pairs) {
    if (slot_pairs.empty()) throw IncompleteSet("cannot derive a commitment from no signers");
    // The binding suffix commits every signer to the message, the slot, and
    // the full commitment set: rho_i = H1(i || suffix).
    ByteWriter suffix;
    suffix.bytes(message);
    suffix.u32(slot);
    suffix.u32(static_cast<std::uint32_t>(slot_pairs.size()));
    for (const auto& [i, pair] : slot_pairs) {  // std::map iterates ascending
        suffix.u32(i);
        suffix.raw(pair.e_commit.bytes);
        suffix.raw(pair.d_commit.bytes);
    }

    GroupCommitment out;
    bool have_total = false;
    for (const auto& [i, pair] : slot_pairs) {
        ByteWriter w;
        w.u32(i);
        w.raw(suffix.out());
        const Scalar rho = g.h1(w.out());
        const GroupElement r_i = g.mul(pair.d_commit, g.exp(pair.e_commit, rho));
        out.rho.emplace(i, rho);
        out.r_each.emplace(i, r_i);
        out.r_total = have_total ? g.mul(out.r_total, r_i) : r_i;
        have_total = true;
    }
    return out;
}

Scalar challenge_scalar(const Group& g, const GroupElement& r, const GroupElement& leaf,
                        std::span<const std::uint8_t> message) {
    ByteWriter w;
    w.raw(r.bytes);
    w.raw(leaf.bytes);
    w.bytes(message);
    return g.h2(w.out());
}

SignatureShare sign_share(const Group& g, std::span<const std::uint8_t> message,
                          std::uint32_t slot, const CommitmentBulletin& bulletin,
                          std::span<const std::uint32_t> signer_set, const KeyShare& share,
                          NonceStore& nonces) {
    const auto set = normalize_set(signer_set);
    if (set.size() < share.threshold) {
        throw BelowThreshold("signer set smaller than the signing threshold");
    }
    if (!std::binary_search(set.begin(), set.end(), share.index)) {
        throw NotInSignerSet("own index missing from the signer set");
    }
    if (nonces.owner() != share.index) {
        throw NotInSignerSet("nonce store belongs to a different signer");
    }

    const auto pairs = bulletin.slot_pairs(set, slot);
    // Burn the slot before any use; a crash below must never allow reuse.
    nonces.mark_consumed(slot);

    const GroupCommitment gc = derive_group_commitment(g, message, slot, pairs);
    const Scalar h = challenge_scalar(g, gc.r_total, share.chain.leaf(), message);

    const auto lambdas = lagrange_coefficients(g, set);
    Scalar lambda;
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (set[k] == share.index) lambda = lambdas[k];
    }

    const auto [e, d] = nonces.nonce_scalars(g, slot);
    // z = d + e*rho + lambda*sk*h
    Scalar z = g.scalar_add(d, g.scalar_mul(e, gc.rho.at(share.index)));
    z = g.scalar_add(z, g.scalar_mul(g.scalar_mul(lambda, share.sk_share), h));
    return SignatureShare{share.index, slot, z, gc.r_each.at(share.index)};
}

bool verify_share(const Group& g, const SignatureShare& share, const GroupElement& pk_share,
                  const Scalar& lambda, const Scalar& challenge) {
    const GroupElement lhs = g.exp_base(share.z);
    const GroupElement rhs =
        g.mul(share.commitment, g.exp(pk_share, g.scalar_mul(lambda, challenge)));
    return lhs == rhs;
}

ThresholdSignature aggregate(const Group& g, std::span<const std::uint8_t> message,
                             std::uint32_t slot, const CommitmentBulletin& bulletin,
                             std::span<const std::uint32_t> signer_set,
                             const std::map<std::uint32_t, GroupElement>& share_pks,
                             const GroupKeyChain& chain,
                             std::span<const SignatureShare> shares) {
    const auto set = normalize_set(signer_set);
    if (shares.size() != set.size()) {
        throw IncompleteSet("number of shares does not match the signer set");
    }
    std::map<std::uint32_t, const SignatureShare*> by_signer;
    for (const SignatureShare& s : shares) {
        if (s.slot != slot) throw IncompleteSet("share for a different slot");
        if (!by_signer.emplace(s.signer, &s).second) {
            throw DuplicateIndex("two shares from one signer");
        }
    }
    for (std::uint32_t i : set) {
        if (!by_signer.count(i)) {
            throw IncompleteSet("missing share from signer " + std::to_string(i));
        }
    }

    const auto pairs = bulletin.slot_pairs(set, slot);
    const GroupCommitment gc = derive_group_commitment(g, message, slot, pairs);
    const Scalar h = challenge_scalar(g, gc.r_total, chain.leaf(), message);
    const auto lambdas = lagrange_coefficients(g, set);

    Scalar z = g.scalar_zero();
    for (std::size_t k = 0; k < set.size(); ++k) {
        const std::uint32_t i = set[k];
        const SignatureShare& s = *by_signer.at(i);
        auto pk = share_pks.find(i);
        if (pk == share_pks.end()) {
            throw IncompleteSet("no share public key for signer " + std::to_string(i));
        }
        // The share must speak about the commitment everyone derives from
        // the bulletin; a private view of R cannot be combined.
        if (s.commitment != gc.r_each.at(i)) {
            throw ShareVerificationFailed("signer " + std::to_string(i) +
                                          ": commitment diverges from the published batch");
        }
        if (!verify_share(g, s, pk->second, lambdas[k], h)) {
            throw ShareVerificationFailed("signer " + std::to_string(i) +
                                          ": response fails the share equation");
        }
        z = g.scalar_add(z, s.z);
    }
    return ThresholdSignature{gc.r_total, z, slot, set};
}

bool mverify(const Group& g, std::span<const std::uint8_t> message, const IdentityVector& ids,
             const GroupKeyChain& chain, const ThresholdSignature& sig) {
    if (!g.element_valid(sig.r.bytes) || !g.scalar_valid(sig.z.bytes)) return false;
    const GroupElement pk = chain_public_key(g, ids, chain);  // throws MalformedChain
    const Scalar h = challenge_scalar(g, sig.r, chain.leaf(), message);
    return g.exp_base(sig.z) == g.mul(sig.r, g.exp(pk, h));
}

std::vector<std::uint8_t> signature_wire_bytes(const ThresholdSignature& sig) {
    std::vector<std::uint8_t> out;
    out.reserve(sig.r.bytes.size() + sig.z.bytes.size());
    out.insert(out.end(), sig.r.bytes.begin(), sig.r.bytes.end());
    out.insert(out.end(), sig.z.bytes.begin(), sig.z.bytes.end());
    return out;
}

ThresholdSignature signature_from_wire(const Group& g, std::span<const std::uint8_t> wire,
                                       std::uint32_t slot,
                                       std::vector<std::uint32_t> signer_set) {
    const std::size_t eb = g.element_bytes(), sb = g.scalar_bytes();
    if (wire.size() != eb + sb) throw ParseError("signature wire bytes have the wrong length");
    ThresholdSignature sig;
    sig.r.bytes.assign(wire.begin(), wire.begin() + static_cast<std::ptrdiff_t>(eb));
    sig.z.bytes.assign(wire.begin() + static_cast<std::ptrdiff_t>(eb), wire.end());
    sig.slot = slot;
    sig.signer_set = std::move(signer_set);
    return sig;
}

}  // namespace borg
