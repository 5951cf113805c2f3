#include "borg/audit.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "borg/bytes.hpp"
#include "borg/errors.hpp"
#include "borg/hash.hpp"
#include "borg/hex.hpp"

namespace borg {

namespace {

constexpr std::string_view kThpqTag = "ITQ-SIG";
constexpr std::size_t kDigestLen = 32;

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t off) {
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

}  // namespace

ThpqKeyMaterial InsecureHashThpq::keygen(std::uint32_t threshold, std::uint32_t group_size,
                                         RandomSource& rng) const {
    if (threshold < 1 || threshold > group_size) {
        throw InvalidThreshold("audit quorum needs 1 <= threshold <= group size");
    }
    // The "key" is a public MAC key: embedding it in the public key is what
    // makes this double insecure, and is also what keeps it dependency-free.
    const auto key = rng.bytes(32);
    ThpqKeyMaterial m;
    m.threshold = threshold;
    ByteWriter pk;
    pk.u32(threshold);
    pk.raw(key);
    m.public_key = pk.take();
    for (std::uint32_t i = 1; i <= group_size; ++i) {
        ByteWriter share;
        share.u32(threshold);
        share.u32(i);
        share.raw(key);
        m.shares.push_back(share.take());
    }
    return m;
}

std::vector<std::uint8_t> InsecureHashThpq::sign_share(
    std::span<const std::uint8_t> share, std::span<const std::uint8_t> message) const {
    if (share.size() != 4 + 4 + 32) throw Error("thpq: malformed share");
    const std::uint32_t threshold = read_u32(share, 0);
    const std::uint32_t index = read_u32(share, 4);
    ByteWriter pre;
    pre.str(kThpqTag);
    pre.raw(share.subspan(8));  // the shared MAC key
    pre.u32(index);
    pre.bytes(message);
    const auto digest = sha256(pre.out());
    ByteWriter out;
    out.u32(threshold);
    out.u32(index);
    out.raw(digest);
    return out.take();
}

std::vector<std::uint8_t> InsecureHashThpq::aggregate(
    std::span<const std::vector<std::uint8_t>> partials) const {
    if (partials.empty()) throw InsufficientShares("thpq: no partial signatures");
    std::map<std::uint32_t, std::span<const std::uint8_t>> by_index;
    std::uint32_t threshold = 0;
    for (const auto& p : partials) {
        if (p.size() != 4 + 4 + kDigestLen) throw Error("thpq: malformed partial signature");
        threshold = read_u32(p, 0);
        by_index.emplace(read_u32(p, 4), std::span<const std::uint8_t>(p).subspan(8));
    }
    if (by_index.size() < threshold) {
        throw InsufficientShares("thpq: fewer distinct signers than the threshold");
    }
    ByteWriter out;
    out.u32(static_cast<std::uint32_t>(by_index.size()));
    for (const auto& [index, digest] : by_index) {
        out.u32(index);
        out.raw(digest);
    }
    return out.take();
}

bool InsecureHashThpq::verify(std::span<const std::uint8_t> public_key,
                              std::span<const std::uint8_t> message,
                              std::span<const std::uint8_t> signature) const {
    if (public_key.size() != 4 + 32 || signature.size() < 4) return false;
    const std::uint32_t threshold = read_u32(public_key, 0);
    const auto key = public_key.subspan(4);
    const std::uint32_t count = read_u32(signature, 0);
    if (signature.size() != 4 + std::size_t(count) * (4 + kDigestLen)) return false;
    std::set<std::uint32_t> seen;
    for (std::uint32_t k = 0; k < count; ++k) {
        const std::size_t off = 4 + k * (4 + kDigestLen);
        const std::uint32_t index = read_u32(signature, off);
        if (!seen.insert(index).second) return false;
        ByteWriter pre;
        pre.str(kThpqTag);
        pre.raw(key);
        pre.u32(index);
        pre.bytes(message);
        const auto want = sha256(pre.out());
        if (!std::equal(want.begin(), want.end(), signature.begin() + off + 4)) return false;
    }
    return seen.size() >= threshold;
}

std::vector<std::uint8_t> audit_entry_message(const AuditEntryContent& content) {
    ByteWriter w;
    w.u32(content.slot);
    w.i64(content.timestamp_ms);
    w.bytes(content.bs_signature);
    w.u32(static_cast<std::uint32_t>(content.bs_ids.size()));
    for (const std::string& id : content.bs_ids) w.str(id);
    return w.take();
}

std::array<std::uint8_t, 32> audit_entry_digest(const AuditEntry& entry) {
    ByteWriter w;
    w.raw(audit_entry_message(entry.content));
    w.bytes(entry.audit_signature);
    w.raw(entry.prev_digest);
    return sha256(w.out());
}

const AuditEntry& AuditLog::append(const ThpqScheme& scheme,
                                   std::span<const std::uint8_t> audit_public_key,
                                   AuditEntryContent content,
                                   std::vector<std::uint8_t> audit_sig) {
    if (!scheme.verify(audit_public_key, audit_entry_message(content), audit_sig)) {
        throw BadAuditSignature("audit quorum signature rejected for slot " +
                                std::to_string(content.slot));
    }
    AuditEntry e;
    e.content = std::move(content);
    e.audit_signature = std::move(audit_sig);
    if (!entries_.empty()) e.prev_digest = entries_.back().digest;
    e.digest = audit_entry_digest(e);
    entries_.push_back(std::move(e));
    return entries_.back();
}

AuditCheckResult AuditLog::verify(const ThpqScheme& scheme,
                                  std::span<const std::uint8_t> audit_public_key) const {
    std::array<std::uint8_t, 32> prev{};
    for (std::size_t h = 0; h < entries_.size(); ++h) {
        const AuditEntry& e = entries_[h];
        if (e.prev_digest != prev) {
            return {false, h, "previous-digest link broken"};
        }
        if (e.digest != audit_entry_digest(e)) {
            return {false, h, "entry digest does not match its content"};
        }
        if (!scheme.verify(audit_public_key, audit_entry_message(e.content),
                           e.audit_signature)) {
            return {false, h, "audit quorum signature invalid"};
        }
        prev = e.digest;
    }
    return {};
}

const AuditEntry* AuditLog::find_slot(std::uint32_t slot) const {
    for (const AuditEntry& e : entries_) {
        if (e.content.slot == slot) return &e;
    }
    return nullptr;
}

void AuditLog::save(const std::string& path) const {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot write audit log: " + path);
    for (const AuditEntry& e : entries_) {
        nlohmann::ordered_json j;
        j["version"] = 1;
        j["slot"] = e.content.slot;
        j["timestamp_ms"] = e.content.timestamp_ms;
        j["bs_ids"] = e.content.bs_ids;
        j["bs_signature"] = to_hex(e.content.bs_signature);
        j["audit_signature"] = to_hex(e.audit_signature);
        j["prev_digest"] = to_hex(e.prev_digest);
        j["digest"] = to_hex(e.digest);
        f << j.dump() << '\n';
    }
}

AuditLog AuditLog::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read audit log: " + path);
    std::vector<AuditEntry> entries;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            if (j.at("version").get<int>() != 1) throw ParseError("audit log: bad version");
            AuditEntry e;
            e.content.slot = j.at("slot").get<std::uint32_t>();
            e.content.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
            e.content.bs_ids = j.at("bs_ids").get<std::vector<std::string>>();
            e.content.bs_signature = from_hex(j.at("bs_signature").get<std::string>());
            e.audit_signature = from_hex(j.at("audit_signature").get<std::string>());
            auto prev = from_hex(j.at("prev_digest").get<std::string>());
            auto dig = from_hex(j.at("digest").get<std::string>());
            if (prev.size() != 32 || dig.size() != 32) {
                throw ParseError("audit log: digest fields must be 32 bytes");
            }
            std::copy(prev.begin(), prev.end(), e.prev_digest.begin());
            std::copy(dig.begin(), dig.end(), e.digest.begin());
            entries.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(std::string("audit log: malformed line: ") + ex.what());
        }
    }
    return from_entries(std::move(entries));
}

AuditLog AuditLog::from_entries(std::vector<AuditEntry> entries) {
    AuditLog log;
    log.entries_ = std::move(entries);
    return log;
}

std::string ConsistencyReport::summary() const {
    if (consistent) return "consistent";
    std::ostringstream os;
    os << "inconsistent:";
    for (std::size_t h : fork_heights) os << " fork@" << h;
    for (const auto& [replica, len] : missing) {
        os << " replica-" << replica << "-truncated-at-" << len;
    }
    for (std::uint32_t s : duplicate_slots) os << " duplicate-slot-" << s;
    return os.str();
}

AuditCheckResult audit_chain_check(const AuditLog& log) {
    std::array<std::uint8_t, 32> prev{};
    for (std::size_t h = 0; h < log.size(); ++h) {
        const AuditEntry& e = log.entries()[h];
        if (e.prev_digest != prev) {
            return {false, h, "previous-digest link broken"};
        }
        if (e.digest != audit_entry_digest(e)) {
            return {false, h, "entry digest does not match its content"};
        }
        prev = e.digest;
    }
    return {};
}

ConsistencyReport audit_cross_validate(std::span<const AuditLog> replicas) {
    ConsistencyReport rep;
    if (replicas.empty()) return rep;  // nothing to agree on
    std::size_t max_len = 0;
    for (const AuditLog& r : replicas) max_len = std::max(max_len, r.size());

    for (std::size_t h = 0; h < max_len; ++h) {
        const std::array<std::uint8_t, 32>* first = nullptr;
        bool fork = false;
        for (const AuditLog& r : replicas) {
            if (h >= r.size()) continue;
            if (!first) {
                first = &r.entries()[h].digest;
            } else if (*first != r.entries()[h].digest) {
                fork = true;
            }
        }
        if (fork) rep.fork_heights.push_back(h);
    }
    for (std::size_t i = 0; i < replicas.size(); ++i) {
        if (replicas[i].size() < max_len) rep.missing.emplace_back(i, replicas[i].size());
    }
    std::set<std::uint32_t> reported;
    for (const AuditLog& r : replicas) {
        std::set<std::uint32_t> seen;
        for (const AuditEntry& e : r.entries()) {
            if (!seen.insert(e.content.slot).second && reported.insert(e.content.slot).second) {
                rep.duplicate_slots.push_back(e.content.slot);
            }
        }
    }
    rep.consistent =
        rep.fork_heights.empty() && rep.missing.empty() && rep.duplicate_slots.empty();
    return rep;
}

ReplicatedAuditStore::ReplicatedAuditStore(const ThpqScheme& scheme, ThpqKeyMaterial keys,
                                           std::size_t replicas, std::size_t batch_size)
    : scheme_(scheme),
      keys_(std::move(keys)),
      replicas_(replicas),
      batch_size_(batch_size == 0 ? 1 : batch_size) {
    if (replicas == 0) throw Error("audit store needs at least one replica");
    if (keys_.shares.size() < keys_.threshold) {
        throw InvalidThreshold("audit store holds fewer shares than its threshold");
    }
}

void ReplicatedAuditStore::append(AuditEntryContent content) {
    const auto message = audit_entry_message(content);
    std::vector<std::vector<std::uint8_t>> partials;
    partials.reserve(keys_.threshold);
    for (std::uint32_t i = 0; i < keys_.threshold; ++i) {
        partials.push_back(scheme_.sign_share(keys_.shares[i], message));
    }
    buffer_.emplace_back(std::move(content), scheme_.aggregate(partials));
    if (buffer_.size() >= batch_size_) flush();
}

void ReplicatedAuditStore::flush() {
    for (auto& [content, sig] : buffer_) {
        for (AuditLog& log : replicas_) {
            log.append(scheme_, keys_.public_key, content, sig);
        }
    }
    buffer_.clear();
}

}  // namespace borg
