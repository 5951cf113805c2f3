#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "borg/hierarchy.hpp"
#include "borg/rng.hpp"
#include "borg/thresh_sign.hpp"

namespace borg {

// Byte and timing budget of the 5G SIB1 broadcast: at most 372 bytes per
// message, repeated every 20 to 160 ms. A minimally configured base payload
// leaves about 290 bytes of free space for authentication data.
inline constexpr std::uint64_t kSib1CapacityBytes = 372;
inline constexpr std::uint64_t kSib1DefaultFreeBytes = 290;
inline constexpr int kSib1MinPeriodMs = 20;
inline constexpr int kSib1MaxPeriodMs = 160;

struct Sib1Message {
    std::vector<std::uint8_t> base;
    std::vector<std::uint8_t> attached;
    std::uint64_t total_bytes() const { return base.size() + attached.size(); }
};

// Piggybacks the signature, the key chain (minus the pre-installed root key),
// and the identity labels onto a SIB1 base payload. Throws OversizeSib1 when
// the result cannot fit the 372-byte cap; that is the signal a scheme needs
// fragmentation instead.
Sib1Message build_authenticated_sib1(std::span<const std::uint8_t> base,
                                     const ThresholdSignature& sig, const GroupKeyChain& chain,
                                     const IdentityVector& ids);

// Exact rational for packet expectations (e.g. 247/13).
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational reduced(std::int64_t num, std::int64_t den);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool integral() const { return den == 1; }
    std::string str() const;
    bool operator==(const Rational&) const = default;
};

struct PacketStats {
    std::uint32_t best = 0;
    std::uint32_t worst = 0;
    Rational expected;
    bool operator==(const PacketStats&) const = default;
};

// Packets a receiver needs to collect F fragments broadcast cyclically
// (1, 2, ..., F, 1, 2, ...) when it tunes in at a uniformly random phase and
// discards everything heard before fragment 1 (anchor-first). best = F,
// worst = 2F - 1, expected = (F + sum_{s=2..F} (2F+1-s)) / F.
PacketStats expected_packets_cyclic(std::uint32_t fragments);

enum class ReassemblyPolicy {
    anchor_first,    // discard fragments heard before fragment 1
    sliding_window,  // buffer everything; order does not matter
};

// One receiver walk: the first packet heard is fragment `start_phase`
// (1-based). Returns how many packets it listens to until reassembly.
std::uint32_t simulate_reassembly(std::uint32_t fragments, std::uint32_t start_phase,
                                  ReassemblyPolicy policy);

// Mean of simulate_reassembly over uniformly random start phases.
double mean_packets_monte_carlo(std::uint32_t fragments, ReassemblyPolicy policy,
                                std::uint32_t trials, RandomSource& rng);

// Air time between the first and last of `packets` periodic broadcasts.
// The period must lie in the SIB1 range [20, 160] ms.
std::int64_t broadcast_delay_ms(std::uint32_t packets, int period_ms);

enum class Freshness { fresh, expired };

// Fresh iff 0 <= receiver_clock - timestamp <= window (inclusive); future
// timestamps are rejected as clock skew.
Freshness freshness_check(std::int64_t timestamp_ms, std::int64_t window_ms,
                          std::int64_t receiver_clock_ms);

// Validity windows per broadcaster: one SIB1 period plus a per-identity
// signing/propagation allowance kept in a lookup table.
struct FreshnessPolicy {
    int period_ms = kSib1MinPeriodMs;
    std::int64_t default_allowance_ms = 30;
    std::map<std::string, std::int64_t> allowance_ms;  // overrides by identity

    std::int64_t window_for(const std::string& id) const {
        auto it = allowance_ms.find(id);
        return period_ms + (it == allowance_ms.end() ? default_allowance_ms : it->second);
    }
};

// Declarative size profile of an authentication scheme: enough to compute
// its SIB1 byte overhead without running the scheme. Crypto overhead =
// signature + cert_levels * per_cert + id bytes. Externally published
// figures can ride along for cross-checking; they are never used in math.
struct SchemeSizeProfile {
    std::string name;
    std::string note;
    std::uint64_t signature_bytes = 0;
    std::uint64_t public_key_bytes = 0;  // informational (report column)
    std::uint32_t cert_levels = 0;
    std::uint64_t per_cert_bytes = 0;
    std::uint64_t id_bytes = 0;
    std::optional<std::uint64_t> declared_crypto_bytes;
    std::optional<std::uint64_t> declared_comm_bytes;
    std::optional<std::uint32_t> declared_extra_packets;

    std::uint64_t crypto_overhead_bytes() const {
        return signature_bytes + std::uint64_t(cert_levels) * per_cert_bytes + id_bytes;
    }
    bool operator==(const SchemeSizeProfile&) const = default;
};

struct SizeRegistry {
    int version = 1;
    std::uint64_t capacity_bytes = kSib1CapacityBytes;
    std::uint64_t free_bytes = kSib1DefaultFreeBytes;
    std::vector<SchemeSizeProfile> schemes;
    bool operator==(const SizeRegistry&) const = default;
};

// The registry shipped with the tool (data/scheme_profiles.json mirrors it).
SizeRegistry builtin_registry();
SizeRegistry load_registry(const std::string& path);
void save_registry(const SizeRegistry& registry, const std::string& path);

// How a payload travels: piggybacked (0 fragments) iff it fits the free
// space, otherwise ceil(payload/free) dedicated fragment packets.
struct FragmentPlan {
    std::uint64_t payload_bytes = 0;
    std::uint64_t free_bytes = 0;
    std::uint32_t fragment_count = 0;
    PacketStats packets;           // zeroed when nothing is fragmented
    std::int64_t delay_min_ms = 0;  // fragment air time at 20 ms
    std::int64_t delay_max_ms = 0;  // and at 160 ms
};

FragmentPlan fragment_plan(std::uint64_t payload_bytes, std::uint64_t free_bytes);

struct SchemeReportRow {
    std::string scheme;
    std::string note;
    std::uint64_t crypto_bytes = 0;
    bool piggybacks = false;
    FragmentPlan plan;
    std::uint64_t comm_bytes = 0;  // fragment_count * capacity
    std::optional<std::uint64_t> declared_crypto_bytes;
    std::optional<std::uint64_t> declared_comm_bytes;
    std::optional<std::uint32_t> declared_extra_packets;
    bool declared_mismatch = false;  // computed vs declared disagree
};

struct SchemeReport {
    std::uint64_t base_bytes = 0;
    std::uint64_t capacity_bytes = 0;
    std::uint64_t free_bytes = 0;
    std::vector<SchemeReportRow> rows;
};

SchemeReport scheme_report(const SizeRegistry& registry, std::uint64_t base_bytes);
std::string render_report_text(const SchemeReport& report);
std::string render_report_csv(const SchemeReport& report);

}  // namespace borg
