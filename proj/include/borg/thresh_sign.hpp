#pragma once

#include <cstdint>
#include <map>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "borg/group.hpp"
#include "borg/hierarchy.hpp"
#include "borg/rng.hpp"

namespace borg {

// Two-round threshold signing over a dealt key share. Round one happens
// offline: each participant derives a batch of per-slot nonces from one
// secret seed pair and publishes the matching commitments. Round two is a
// single message: everyone computes the same group commitment from the
// published batch and sends one response scalar.

// Bytes that bind a participant to its signing context: the identity path of
// the signing group plus the 1-based share index.
std::vector<std::uint8_t> participant_id_bytes(const IdentityVector& ids, std::uint32_t index);

// Per-slot nonce derivation from the batch seed: H1(seed || slot || id).
Scalar derive_nonce(const Group& g, const Scalar& seed_hat, std::uint32_t slot,
                    std::span<const std::uint8_t> id_bytes);

// One participant's secret half of a preprocessing batch. The seed pair is
// retained even after slots are consumed: dispute resolution re-derives
// nonces from it. Consumption only guards against signing a slot twice.
class NonceStore {
  public:
    NonceStore() = default;
    NonceStore(const Group& g, std::uint32_t owner, std::vector<std::uint8_t> id_bytes,
               Scalar e_hat, Scalar d_hat, std::uint32_t capacity);

    std::uint32_t owner() const { return owner_; }
    std::uint32_t capacity() const { return static_cast<std::uint32_t>(consumed_.size()); }
    bool consumed(std::uint32_t slot) const;

    // Marks a slot used before any signing math happens. Throws NonceReuse
    // on a second call for the same slot, UnknownMessageIndex out of range.
    void mark_consumed(std::uint32_t slot);

    // (e, d) for one slot, re-derivable any number of times.
    std::pair<Scalar, Scalar> nonce_scalars(const Group& g, std::uint32_t slot) const;

    // The batch seeds, surrendered only to adjudicate a suspected forgery.
    std::pair<Scalar, Scalar> reveal() const { return {e_hat_, d_hat_}; }

  private:
    void check_slot(std::uint32_t slot) const;

    std::uint32_t owner_ = 0;
    std::vector<std::uint8_t> id_bytes_;
    Scalar e_hat_;
    Scalar d_hat_;
    std::vector<bool> consumed_;
};

struct CommitmentPair {
    GroupElement e_commit;  // E = g^e
    GroupElement d_commit;  // D = g^d
    bool operator==(const CommitmentPair&) const = default;
};

// One participant's published batch: slot j lives at entries[j-1].
struct CommitmentList {
    std::uint32_t signer = 0;
    std::vector<CommitmentPair> entries;
    bool operator==(const CommitmentList&) const = default;
};

struct PreprocessOutput {
    NonceStore nonces;
    CommitmentList commitments;
};

// Round one: sample the seed pair, derive `capacity` slots, commit.
PreprocessOutput preprocess(const Group& g, const KeyShare& share, std::uint32_t capacity,
                            RandomSource& rng);

// Checks every commitment in the list is a valid element of the group.
bool validate_commitments(const Group& g, const CommitmentList& list);

// Shared bulletin the signing group publishes commitment batches to.
// Concurrent readers are fine; writers are serialized. Persisted as JSON
// lines, one record per signer.
class CommitmentBulletin {
  public:
    explicit CommitmentBulletin(std::string context = {}) : context_(std::move(context)) {}
    CommitmentBulletin(const CommitmentBulletin& other);

    const std::string& context() const { return context_; }

    // Publishing a signer's batch replaces any previous batch of that signer.
    void publish(const Group& g, CommitmentList list);

    // Slot data for a signer set, keyed by signer index. Throws IncompleteSet
    // when a signer never published, UnknownMessageIndex when the slot is
    // beyond a published batch.
    std::map<std::uint32_t, CommitmentPair> slot_pairs(std::span<const std::uint32_t> signer_set,
                                                       std::uint32_t slot) const;

    std::vector<std::uint32_t> signers() const;

    void save(const std::string& path) const;
    static CommitmentBulletin load(const Group& g, const std::string& path);

  private:
    std::string context_;
    std::map<std::uint32_t, CommitmentList> lists_;
    mutable std::shared_mutex mutex_;
};

struct SignatureShare {
    std::uint32_t signer = 0;
    std::uint32_t slot = 0;
    Scalar z;
    GroupElement commitment;  // this signer's slice R_i of the group commitment
};

struct ThresholdSignature {
    GroupElement r;
    Scalar z;
    std::uint32_t slot = 0;
    std::vector<std::uint32_t> signer_set;  // ascending
    bool operator==(const ThresholdSignature&) const = default;
};

// Everything deterministic both rounds agree on for one slot: the per-signer
// binding scalars and commitment slices, and their product.
struct GroupCommitment {
    GroupElement r_total;
    std::map<std::uint32_t, GroupElement> r_each;
    std::map<std::uint32_t, Scalar> rho;
};

// The single source of truth for commitment derivation. Signing, share
// verification, and forgery adjudication all call this; no other code
// computes R.
GroupCommitment derive_group_commitment(const Group& g, std::span<const std::uint8_t> message,
                                        std::uint32_t slot,
                                        const std::map<std::uint32_t, CommitmentPair>& slot_pairs);

// Challenge h = H2(R || leaf level element || message).
Scalar challenge_scalar(const Group& g, const GroupElement& r, const GroupElement& leaf,
                        std::span<const std::uint8_t> message);

// Round two, one participant. Consumes the slot in `nonces`.
SignatureShare sign_share(const Group& g, std::span<const std::uint8_t> message,
                          std::uint32_t slot, const CommitmentBulletin& bulletin,
                          std::span<const std::uint32_t> signer_set, const KeyShare& share,
                          NonceStore& nonces);

// Public check of one response: g^z == R_i * pk_i^(lambda_i * h).
bool verify_share(const Group& g, const SignatureShare& share, const GroupElement& pk_share,
                  const Scalar& lambda, const Scalar& challenge);

// Combines verified shares into the final signature. Throws
// ShareVerificationFailed naming the offending signer if any share fails,
// IncompleteSet when shares and signer set disagree.
ThresholdSignature aggregate(const Group& g, std::span<const std::uint8_t> message,
                             std::uint32_t slot, const CommitmentBulletin& bulletin,
                             std::span<const std::uint32_t> signer_set,
                             const std::map<std::uint32_t, GroupElement>& share_pks,
                             const GroupKeyChain& chain,
                             std::span<const SignatureShare> shares);

// Verification against public data only: the identity path, the key chain,
// and the root public key inside it. Malformed signature encodings verify
// false; structurally impossible chains throw MalformedChain.
bool mverify(const Group& g, std::span<const std::uint8_t> message, const IdentityVector& ids,
             const GroupKeyChain& chain, const ThresholdSignature& sig);

// Wire encoding R || z (64 bytes on the default profile).
std::vector<std::uint8_t> signature_wire_bytes(const ThresholdSignature& sig);
ThresholdSignature signature_from_wire(const Group& g, std::span<const std::uint8_t> wire,
                                       std::uint32_t slot,
                                       std::vector<std::uint32_t> signer_set);

}  // namespace borg
