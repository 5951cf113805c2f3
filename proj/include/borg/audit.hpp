#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "borg/rng.hpp"

namespace borg {

// Threshold signature scheme used by the audit layer. The interface is the
// integration point for a post-quantum backend; the signing core never
// depends on which scheme sits behind it.
struct ThpqKeyMaterial {
    std::vector<std::uint8_t> public_key;
    std::vector<std::vector<std::uint8_t>> shares;  // share i at shares[i-1]
    std::uint32_t threshold = 0;
};

class ThpqScheme {
  public:
    virtual ~ThpqScheme() = default;
    virtual std::string name() const = 0;
    virtual ThpqKeyMaterial keygen(std::uint32_t threshold, std::uint32_t group_size,
                                   RandomSource& rng) const = 0;
    virtual std::vector<std::uint8_t> sign_share(std::span<const std::uint8_t> share,
                                                 std::span<const std::uint8_t> message) const = 0;
    // Combines partial signatures; throws InsufficientShares when fewer
    // distinct signers than the threshold contributed.
    virtual std::vector<std::uint8_t> aggregate(
        std::span<const std::vector<std::uint8_t>> partials) const = 0;
    virtual bool verify(std::span<const std::uint8_t> public_key,
                        std::span<const std::uint8_t> message,
                        std::span<const std::uint8_t> signature) const = 0;
};

// INSECURE stand-in used by tests and the simulator: partial signatures are
// plain hashes keyed by material that is embedded in the public key, so
// anybody can forge them. It exists to exercise the audit plumbing with the
// real call pattern (per-signer partials, threshold aggregation, mixed
// message failures) and must never leave a test or demo environment.
class InsecureHashThpq final : public ThpqScheme {
  public:
    std::string name() const override { return "insecure-hash-double"; }
    ThpqKeyMaterial keygen(std::uint32_t threshold, std::uint32_t group_size,
                           RandomSource& rng) const override;
    std::vector<std::uint8_t> sign_share(std::span<const std::uint8_t> share,
                                         std::span<const std::uint8_t> message) const override;
    std::vector<std::uint8_t> aggregate(
        std::span<const std::vector<std::uint8_t>> partials) const override;
    bool verify(std::span<const std::uint8_t> public_key, std::span<const std::uint8_t> message,
                std::span<const std::uint8_t> signature) const override;
};

// One broadcast's worth of audit data, before chaining.
struct AuditEntryContent {
    std::uint32_t slot = 0;
    std::int64_t timestamp_ms = 0;
    std::vector<std::uint8_t> bs_signature;  // broadcast signature wire bytes
    std::vector<std::string> bs_ids;         // which stations formed the quorum
    bool operator==(const AuditEntryContent&) const = default;
};

// Bytes the audit quorum signs for one entry.
std::vector<std::uint8_t> audit_entry_message(const AuditEntryContent& content);

struct AuditEntry {
    AuditEntryContent content;
    std::vector<std::uint8_t> audit_signature;
    std::array<std::uint8_t, 32> prev_digest{};  // zeros for the first entry
    std::array<std::uint8_t, 32> digest{};
    bool operator==(const AuditEntry&) const = default;
};

// Digest over content, audit signature, and the previous link.
std::array<std::uint8_t, 32> audit_entry_digest(const AuditEntry& entry);

struct AuditCheckResult {
    bool ok = true;
    std::size_t bad_height = 0;  // first failing entry when !ok
    std::string reason;
};

// Hash-chained, append-only log. Every append verifies the audit signature
// and links the new entry to the previous digest; `verify` re-validates the
// whole chain from scratch.
class AuditLog {
  public:
    AuditLog() = default;

    // Throws BadAuditSignature when the quorum signature does not check out.
    const AuditEntry& append(const ThpqScheme& scheme,
                             std::span<const std::uint8_t> audit_public_key,
                             AuditEntryContent content, std::vector<std::uint8_t> audit_sig);

    // Exhaustive validation: digests, links, and every audit signature.
    AuditCheckResult verify(const ThpqScheme& scheme,
                            std::span<const std::uint8_t> audit_public_key) const;

    std::size_t size() const { return entries_.size(); }
    const std::vector<AuditEntry>& entries() const { return entries_; }
    const AuditEntry* find_slot(std::uint32_t slot) const;

    void save(const std::string& path) const;  // JSON lines
    static AuditLog load(const std::string& path);

    // Unchecked assembly, for loaders and tamper tests; verify() is the
    // gatekeeper for trusting the result.
    static AuditLog from_entries(std::vector<AuditEntry> entries);

  private:
    std::vector<AuditEntry> entries_;
};

struct ConsistencyReport {
    bool consistent = false;
    std::vector<std::size_t> fork_heights;  // divergent digests at equal height
    std::vector<std::pair<std::size_t, std::size_t>> missing;  // (replica, its length)
    std::vector<std::uint32_t> duplicate_slots;
    std::string summary() const;
};

// Key-less integrity check of a single log: every entry digest matches its
// content and the previous-digest links hold. Catches tampering by anyone
// who cannot re-sign entries; quorum signatures need AuditLog::verify.
AuditCheckResult audit_chain_check(const AuditLog& log);

// Compares replicas of what should be one log: forks, missing suffixes,
// duplicate slot numbers.
ConsistencyReport audit_cross_validate(std::span<const AuditLog> replicas);

// Signs entries with the audit quorum's shares and appends them to every
// replica. Synchronous by default; batch_size > 1 buffers appends until
// flush() or the buffer fills.
class ReplicatedAuditStore {
  public:
    ReplicatedAuditStore(const ThpqScheme& scheme, ThpqKeyMaterial keys, std::size_t replicas,
                         std::size_t batch_size = 1);

    void append(AuditEntryContent content);
    void flush();
    std::size_t pending() const { return buffer_.size(); }

    const std::vector<AuditLog>& replicas() const { return replicas_; }
    const ThpqKeyMaterial& keys() const { return keys_; }
    const ThpqScheme& scheme() const { return scheme_; }

  private:
    const ThpqScheme& scheme_;
    ThpqKeyMaterial keys_;
    std::vector<AuditLog> replicas_;
    std::size_t batch_size_;
    std::vector<std::pair<AuditEntryContent, std::vector<std::uint8_t>>> buffer_;
};

}  // namespace borg
