#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "borg/group.hpp"
#include "borg/hierarchy.hpp"
#include "borg/thresh_sign.hpp"

namespace borg {

// Fail-stop layer: when a signature for a known message index looks wrong,
// the signers surrender their batch seeds, the group commitment is recomputed
// exactly as signing derived it, and a mismatch is a transferable proof that
// somebody signed without the dealt keys. The system halts on a confirmed
// proof instead of trusting broken hardness assumptions.

struct HistoryRecord {
    std::vector<std::uint8_t> message;
    ThresholdSignature sig;
    std::int64_t timestamp_ms = 0;
};

// What the signing group remembers about its own outputs, keyed by slot.
class SignatureHistory {
  public:
    // Throws DuplicateIndex when the slot already has a record.
    void append(HistoryRecord record);
    const HistoryRecord* find(std::uint32_t slot) const;
    // Throws UnknownMessageIndex when absent.
    const HistoryRecord& at(std::uint32_t slot) const;
    std::size_t size() const { return records_.size(); }

  private:
    std::map<std::uint32_t, HistoryRecord> records_;
};

struct RevealedNonces {
    std::uint32_t signer = 0;
    Scalar e_hat;
    Scalar d_hat;
};

struct ForgeryProof {
    std::uint32_t slot = 0;
    std::vector<std::uint32_t> signer_set;  // ascending
    std::vector<Scalar> e_hats;             // aligned with signer_set
    std::vector<Scalar> d_hats;
    bool operator==(const ForgeryProof&) const = default;
};

// Adjudication step run by the signing group when `suspect` claims to be its
// slot-j signature for `message`. Returns nullopt when the recomputed group
// commitment matches (not a forgery), otherwise the transferable proof.
// Throws UnknownMessageIndex when the history has no such record and
// IncompleteNonceReveal when a participant's seeds are missing.
std::optional<ForgeryProof> pof(const Group& g, const ThresholdSignature& suspect,
                                std::span<const std::uint8_t> message,
                                const SignatureHistory& hist,
                                std::span<const RevealedNonces> reveals,
                                const IdentityVector& ids);

enum class PofVerdict {
    rejected,           // no forgery demonstrated; keep operating
    forgery_confirmed,  // halt: signature did not come from the dealt keys
};

// Independent check of a forgery proof by the dealer of the level (it knows
// the level entropy alpha and its own parent secret). Verifies the share
// public keys interpolate to the dealt key before recomputing the
// commitment, so a proof cannot be validated against substituted keys.
PofVerdict pof_verify(const Group& g, const Scalar& alpha, const Scalar& parent_sk,
                      const IdentityVector& ids, const GroupKeyChain& chain,
                      const std::map<std::uint32_t, GroupElement>& share_pks,
                      std::span<const std::uint8_t> message, const ThresholdSignature& suspect,
                      const std::optional<ForgeryProof>& proof);

// Versioned JSON proof files.
void save_proof(const std::string& path, const Group& g, const ForgeryProof& proof);
ForgeryProof load_proof(const Group& g, const std::string& path);

}  // namespace borg
