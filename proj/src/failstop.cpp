#include "borg/failstop.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "borg/errors.hpp"
#include "borg/hex.hpp"

namespace borg {

void SignatureHistory::append(HistoryRecord record) {
    const std::uint32_t slot = record.sig.slot;
    if (!records_.emplace(slot, std::move(record)).second) {
        throw DuplicateIndex("history already holds slot " + std::to_string(slot));
    }
}

const HistoryRecord* SignatureHistory::find(std::uint32_t slot) const {
    auto it = records_.find(slot);
    return it == records_.end() ? nullptr : &it->second;
}

const HistoryRecord& SignatureHistory::at(std::uint32_t slot) const {
    const HistoryRecord* r = find(slot);
    if (!r) throw UnknownMessageIndex("no signature recorded for slot " + std::to_string(slot));
    return *r;
}

namespace {

// E, D for every signer, re-derived from surrendered seeds exactly as
// preprocessing derived them.
std::map<std::uint32_t, CommitmentPair> commitments_from_seeds(
    const Group& g, const IdentityVector& ids, std::uint32_t slot,
    std::span<const std::uint32_t> signer_set, std::span<const Scalar> e_hats,
    std::span<const Scalar> d_hats) {
    std::map<std::uint32_t, CommitmentPair> pairs;
    for (std::size_t k = 0; k < signer_set.size(); ++k) {
        const auto id_bytes = participant_id_bytes(ids, signer_set[k]);
        pairs.emplace(signer_set[k],
                      CommitmentPair{g.exp_base(derive_nonce(g, e_hats[k], slot, id_bytes)),
                                     g.exp_base(derive_nonce(g, d_hats[k], slot, id_bytes))});
    }
    return pairs;
}

}  // namespace

std::optional<ForgeryProof> pof(const Group& g, const ThresholdSignature& suspect,
                                std::span<const std::uint8_t> message,
                                const SignatureHistory& hist,
                                std::span<const RevealedNonces> reveals,
                                const IdentityVector& ids) {
    const HistoryRecord& record = hist.at(suspect.slot);
    if (!std::equal(record.message.begin(), record.message.end(), message.begin(),
                    message.end())) {
        throw UnknownMessageIndex("slot " + std::to_string(suspect.slot) +
                                  " was signed for a different message");
    }

    ForgeryProof proof;
    proof.slot = suspect.slot;
    proof.signer_set = record.sig.signer_set;
    for (std::uint32_t i : proof.signer_set) {
        auto it = std::find_if(reveals.begin(), reveals.end(),
                               [i](const RevealedNonces& r) { return r.signer == i; });
        if (it == reveals.end()) {
            throw IncompleteNonceReveal("signer " + std::to_string(i) +
                                        " has not surrendered its seeds");
        }
        proof.e_hats.push_back(it->e_hat);
        proof.d_hats.push_back(it->d_hat);
    }

    const auto pairs = commitments_from_seeds(g, ids, proof.slot, proof.signer_set,
                                              proof.e_hats, proof.d_hats);
    const GroupCommitment gc = derive_group_commitment(g, message, proof.slot, pairs);
    if (gc.r_total == suspect.r) return std::nullopt;  // our own signature
    return proof;
}

PofVerdict pof_verify(const Group& g, const Scalar& alpha, const Scalar& parent_sk,
                      const IdentityVector& ids, const GroupKeyChain& chain,
                      const std::map<std::uint32_t, GroupElement>& share_pks,
                      std::span<const std::uint8_t> message, const ThresholdSignature& suspect,
                      const std::optional<ForgeryProof>& proof) {
    if (!proof) return PofVerdict::rejected;

    const std::size_t beta = proof->signer_set.size();
    if (beta == 0 || proof->e_hats.size() != beta || proof->d_hats.size() != beta) {
        throw MalformedProof("signer set and revealed seeds disagree in size");
    }
    if (!std::is_sorted(proof->signer_set.begin(), proof->signer_set.end()) ||
        std::adjacent_find(proof->signer_set.begin(), proof->signer_set.end()) !=
            proof->signer_set.end()) {
        throw MalformedProof("signer set must be strictly ascending");
    }
    for (std::size_t k = 0; k < beta; ++k) {
        if (!g.scalar_valid(proof->e_hats[k].bytes) || !g.scalar_valid(proof->d_hats[k].bytes)) {
            throw MalformedProof("revealed seed is not a canonical scalar");
        }
    }
    if (ids.level() == 0 || chain.q.size() != ids.level() + 1) {
        throw MalformedProof("identity path and key chain are inconsistent");
    }

    // Key consistency: the claimed share keys must interpolate to the key
    // this dealer actually delegated, g^(parent_sk * h + r).
    std::vector<GroupElement> pks;
    for (std::uint32_t i : proof->signer_set) {
        auto it = share_pks.find(i);
        if (it == share_pks.end()) {
            throw MalformedProof("no share public key for signer " + std::to_string(i));
        }
        pks.push_back(it->second);
    }
    const auto lambdas = lagrange_coefficients(g, proof->signer_set);
    GroupElement interpolated = g.identity();
    for (std::size_t k = 0; k < beta; ++k) {
        interpolated = g.mul(interpolated, g.exp(pks[k], lambdas[k]));
    }
    const Scalar r = g.h1(alpha.bytes);
    const Scalar h = identity_hash(g, ids.ids.back(), chain);
    const GroupElement dealt =
        g.mul(g.exp_base(g.scalar_mul(h, parent_sk)), g.exp_base(r));
    if (interpolated != dealt) return PofVerdict::rejected;

    const auto pairs = commitments_from_seeds(g, ids, proof->slot, proof->signer_set,
                                              proof->e_hats, proof->d_hats);
    const GroupCommitment gc = derive_group_commitment(g, message, proof->slot, pairs);
    return gc.r_total == suspect.r ? PofVerdict::rejected : PofVerdict::forgery_confirmed;
}

void save_proof(const std::string& path, const Group& g, const ForgeryProof& proof) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["group"] = g.name();
    j["slot"] = proof.slot;
    j["signer_set"] = proof.signer_set;
    auto hexify = [](const std::vector<Scalar>& v) {
        std::vector<std::string> out;
        out.reserve(v.size());
        for (const Scalar& s : v) out.push_back(to_hex(s.bytes));
        return out;
    };
    j["e_hats"] = hexify(proof.e_hats);
    j["d_hats"] = hexify(proof.d_hats);
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write proof file: " + path);
    f << j.dump(2) << '\n';
}

ForgeryProof load_proof(const Group& g, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read proof file: " + path);
    ForgeryProof proof;
    try {
        nlohmann::json j = nlohmann::json::parse(f);
        if (j.at("version").get<int>() != 1) throw ParseError("proof: unsupported version");
        if (j.at("group").get<std::string>() != g.name()) {
            throw ParseError("proof: written for group " + j["group"].get<std::string>());
        }
        proof.slot = j.at("slot").get<std::uint32_t>();
        proof.signer_set = j.at("signer_set").get<std::vector<std::uint32_t>>();
        for (const auto& h : j.at("e_hats")) {
            proof.e_hats.push_back(Scalar{from_hex(h.get<std::string>())});
        }
        for (const auto& h : j.at("d_hats")) {
            proof.d_hats.push_back(Scalar{from_hex(h.get<std::string>())});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("proof: malformed file: ") + e.what());
    }
    for (const Scalar& s : proof.e_hats) {
        if (!g.scalar_valid(s.bytes)) throw ParseError("proof: non-canonical seed scalar");
    }
    for (const Scalar& s : proof.d_hats) {
        if (!g.scalar_valid(s.bytes)) throw ParseError("proof: non-canonical seed scalar");
    }
    return proof;
}

}  // namespace borg
