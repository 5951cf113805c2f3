#include "borg/sib_model.hpp"

#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "borg/errors.hpp"

namespace borg {

using ordered_json = nlohmann::ordered_json;

Sib1Message build_authenticated_sib1(std::span<const std::uint8_t> base,
                                     const ThresholdSignature& sig, const GroupKeyChain& chain,
                                     const IdentityVector& ids) {
    if (chain.q.size() != ids.level() + 1) {
        throw MalformedChain("key chain length does not match identity path");
    }
    Sib1Message msg;
    msg.base.assign(base.begin(), base.end());
    // Signature, the delegated level elements (the root key is pre-installed
    // on receivers and never broadcast), then the identity labels. All fields
    // are fixed width in a deployment profile, so raw concatenation is the
    // honest byte count.
    msg.attached.insert(msg.attached.end(), sig.r.bytes.begin(), sig.r.bytes.end());
    msg.attached.insert(msg.attached.end(), sig.z.bytes.begin(), sig.z.bytes.end());
    for (std::size_t i = 1; i < chain.q.size(); ++i) {
        msg.attached.insert(msg.attached.end(), chain.q[i].bytes.begin(), chain.q[i].bytes.end());
    }
    for (const auto& id : ids.ids) {
        msg.attached.insert(msg.attached.end(), id.begin(), id.end());
    }
    if (msg.total_bytes() > kSib1CapacityBytes) {
        throw OversizeSib1("authenticated SIB1 is " + std::to_string(msg.total_bytes()) +
                           " bytes, cap is " + std::to_string(kSib1CapacityBytes));
    }
    return msg;
}

Rational Rational::reduced(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num, den);
    if (g == 0) g = 1;
    return Rational{num / g, den / g};
}

std::string Rational::str() const {
    if (integral()) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

PacketStats expected_packets_cyclic(std::uint32_t fragments) {
    if (fragments == 0) throw Error("fragment count must be >= 1");
    const std::int64_t f = fragments;
    // Tuning in at phase s: s == 1 costs F packets; s in 2..F costs the
    // (F - s + 1) packets until fragment 1 comes around plus F more, i.e.
    // 2F + 1 - s. Averaging over uniform s gives
    //   (F + (F-1)(2F+1) - (F(F+1)/2 - 1)) / F.
    const std::int64_t num = f + (f - 1) * (2 * f + 1) - (f * (f + 1) / 2 - 1);
    PacketStats stats;
    stats.best = fragments;
    stats.worst = 2 * fragments - 1;
    stats.expected = Rational::reduced(num, f);
    return stats;
}

std::uint32_t simulate_reassembly(std::uint32_t fragments, std::uint32_t start_phase,
                                  ReassemblyPolicy policy) {
    if (fragments == 0) throw Error("fragment count must be >= 1");
    if (start_phase < 1 || start_phase > fragments) {
        throw Error("start phase must be in [1, fragments]");
    }
    // Walk the cyclic schedule packet by packet, independently of the closed
    // form above.
    std::vector<bool> have(fragments + 1, false);
    std::uint32_t heard = 0;
    std::uint32_t collected = 0;
    bool anchored = policy == ReassemblyPolicy::sliding_window;
    for (std::uint32_t frag = start_phase;; frag = frag % fragments + 1) {
        ++heard;
        if (frag == 1) anchored = true;
        if (anchored && !have[frag]) {
            have[frag] = true;
            ++collected;
        }
        if (collected == fragments) return heard;
    }
}

double mean_packets_monte_carlo(std::uint32_t fragments, ReassemblyPolicy policy,
                                std::uint32_t trials, RandomSource& rng) {
    if (trials == 0) throw Error("trial count must be >= 1");
    std::uint64_t total = 0;
    for (std::uint32_t i = 0; i < trials; ++i) {
        auto phase = static_cast<std::uint32_t>(rng.uniform(fragments)) + 1;
        total += simulate_reassembly(fragments, phase, policy);
    }
    return static_cast<double>(total) / trials;
}

std::int64_t broadcast_delay_ms(std::uint32_t packets, int period_ms) {
    if (packets == 0) throw Error("packet count must be >= 1");
    if (period_ms < kSib1MinPeriodMs || period_ms > kSib1MaxPeriodMs) {
        throw Error("SIB1 period must be in [20, 160] ms");
    }
    return static_cast<std::int64_t>(packets - 1) * period_ms;
}

Freshness freshness_check(std::int64_t timestamp_ms, std::int64_t window_ms,
                          std::int64_t receiver_clock_ms) {
    const std::int64_t age = receiver_clock_ms - timestamp_ms;
    return (age >= 0 && age <= window_ms) ? Freshness::fresh : Freshness::expired;
}

SizeRegistry builtin_registry() {
    SizeRegistry reg;
    reg.version = 1;
    reg.capacity_bytes = kSib1CapacityBytes;
    reg.free_bytes = kSib1DefaultFreeBytes;
    auto row = [&reg](const char* name, const char* note, std::uint64_t sig, std::uint64_t pk,
                      std::uint32_t certs, std::uint64_t per_cert,
                      std::uint64_t ids) -> SchemeSizeProfile& {
        SchemeSizeProfile p;
        p.name = name;
        p.note = note;
        p.signature_bytes = sig;
        p.public_key_bytes = pk;
        p.cert_levels = certs;
        p.per_cert_bytes = per_cert;
        p.id_bytes = ids;
        reg.schemes.push_back(std::move(p));
        return reg.schemes.back();
    };

    // One 32-byte curve element per delegation level, two 8-byte identity
    // labels: 64 + 2*32 + 16 = 144 bytes of overhead.
    auto& ours = row("borg",
                     "threshold Schnorr over an identity-derived key chain (this implementation)",
                     64, 32, 2, 32, 16);
    ours.declared_crypto_bytes = 144;
    ours.declared_comm_bytes = 0;
    ours.declared_extra_packets = 0;

    row("ec-schnorr-cert", "single-signer Schnorr with a 2-level certificate chain", 64, 32, 2, 96,
        0)
        .declared_crypto_bytes = 256;
    row("bls-cert", "BLS12-381 with a 2-level certificate chain", 48, 96, 2, 96, 0)
        .declared_crypto_bytes = 240;

    auto& mldsa = row("ml-dsa-44", "lattice signature alone, verification key assumed pre-installed",
                      2420, 1312, 0, 0, 0);
    mldsa.declared_comm_bytes = 2976;
    mldsa.declared_extra_packets = 8;

    row("ml-dsa-44-with-key", "lattice signature plus its verification key", 2420, 1312, 1, 1312, 0)
        .declared_extra_packets = 12;

    auto& chain2 = row("ml-dsa-44-cert-chain",
                       "lattice signature with a 2-level certificate chain (key + signature each)",
                       2420, 1312, 2, 3732, 0);
    chain2.declared_comm_bytes = 12276;
    chain2.declared_extra_packets = 33;

    row("fn-dsa-512", "compact lattice signature, key pre-installed", 666, 897, 0, 0, 0);
    row("fn-dsa-1024", "compact lattice signature at the higher security level", 1280, 1793, 0, 0,
        0);
    row("slh-dsa-128s", "hash-based signature, key pre-installed", 7856, 32, 0, 0, 0);
    return reg;
}

namespace {

ordered_json registry_json(const SizeRegistry& reg) {
    ordered_json j;
    j["version"] = reg.version;
    j["capacity_bytes"] = reg.capacity_bytes;
    j["free_bytes"] = reg.free_bytes;
    j["schemes"] = ordered_json::array();
    for (const auto& s : reg.schemes) {
        ordered_json row;
        row["name"] = s.name;
        row["note"] = s.note;
        row["signature_bytes"] = s.signature_bytes;
        row["public_key_bytes"] = s.public_key_bytes;
        row["cert_levels"] = s.cert_levels;
        row["per_cert_bytes"] = s.per_cert_bytes;
        row["id_bytes"] = s.id_bytes;
        if (s.declared_crypto_bytes) row["declared_crypto_bytes"] = *s.declared_crypto_bytes;
        if (s.declared_comm_bytes) row["declared_comm_bytes"] = *s.declared_comm_bytes;
        if (s.declared_extra_packets) row["declared_extra_packets"] = *s.declared_extra_packets;
        j["schemes"].push_back(std::move(row));
    }
    return j;
}

SizeRegistry registry_from_json(const ordered_json& j) {
    SizeRegistry reg;
    try {
        reg.version = j.at("version").get<int>();
        reg.capacity_bytes = j.at("capacity_bytes").get<std::uint64_t>();
        reg.free_bytes = j.at("free_bytes").get<std::uint64_t>();
        for (const auto& row : j.at("schemes")) {
            SchemeSizeProfile s;
            s.name = row.at("name").get<std::string>();
            s.note = row.value("note", std::string{});
            s.signature_bytes = row.at("signature_bytes").get<std::uint64_t>();
            s.public_key_bytes = row.value("public_key_bytes", std::uint64_t{0});
            s.cert_levels = row.value("cert_levels", std::uint32_t{0});
            s.per_cert_bytes = row.value("per_cert_bytes", std::uint64_t{0});
            s.id_bytes = row.value("id_bytes", std::uint64_t{0});
            if (row.contains("declared_crypto_bytes")) {
                s.declared_crypto_bytes = row.at("declared_crypto_bytes").get<std::uint64_t>();
            }
            if (row.contains("declared_comm_bytes")) {
                s.declared_comm_bytes = row.at("declared_comm_bytes").get<std::uint64_t>();
            }
            if (row.contains("declared_extra_packets")) {
                s.declared_extra_packets = row.at("declared_extra_packets").get<std::uint32_t>();
            }
            reg.schemes.push_back(std::move(s));
        }
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("bad scheme registry: ") + e.what());
    }
    if (reg.version != 1) throw ParseError("unsupported scheme registry version");
    if (reg.capacity_bytes == 0 || reg.free_bytes == 0 || reg.free_bytes > reg.capacity_bytes) {
        throw ParseError("scheme registry has inconsistent byte budget");
    }
    return reg;
}

}  // namespace

SizeRegistry load_registry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("bad scheme registry: ") + e.what());
    }
    return registry_from_json(j);
}

void save_registry(const SizeRegistry& registry, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << registry_json(registry).dump(2) << '\n';
}

FragmentPlan fragment_plan(std::uint64_t payload_bytes, std::uint64_t free_bytes) {
    if (free_bytes == 0) throw Error("free space per packet must be >= 1 byte");
    FragmentPlan plan;
    plan.payload_bytes = payload_bytes;
    plan.free_bytes = free_bytes;
    if (payload_bytes <= free_bytes) return plan;  // piggybacks, zero fragments
    plan.fragment_count = static_cast<std::uint32_t>((payload_bytes + free_bytes - 1) / free_bytes);
    plan.packets = expected_packets_cyclic(plan.fragment_count);
    plan.delay_min_ms = broadcast_delay_ms(plan.fragment_count, kSib1MinPeriodMs);
    plan.delay_max_ms = broadcast_delay_ms(plan.fragment_count, kSib1MaxPeriodMs);
    return plan;
}

SchemeReport scheme_report(const SizeRegistry& registry, std::uint64_t base_bytes) {
    if (base_bytes >= registry.capacity_bytes) {
        throw OversizeSib1("base payload leaves no free space in the packet");
    }
    SchemeReport report;
    report.base_bytes = base_bytes;
    report.capacity_bytes = registry.capacity_bytes;
    report.free_bytes = registry.capacity_bytes - base_bytes;
    for (const auto& s : registry.schemes) {
        SchemeReportRow row;
        row.scheme = s.name;
        row.note = s.note;
        row.crypto_bytes = s.crypto_overhead_bytes();
        row.plan = fragment_plan(row.crypto_bytes, report.free_bytes);
        row.piggybacks = row.plan.fragment_count == 0;
        row.comm_bytes = std::uint64_t(row.plan.fragment_count) * registry.capacity_bytes;
        row.declared_crypto_bytes = s.declared_crypto_bytes;
        row.declared_comm_bytes = s.declared_comm_bytes;
        row.declared_extra_packets = s.declared_extra_packets;
        row.declared_mismatch =
            (s.declared_crypto_bytes && *s.declared_crypto_bytes != row.crypto_bytes) ||
            (s.declared_comm_bytes && *s.declared_comm_bytes != row.comm_bytes) ||
            (s.declared_extra_packets && *s.declared_extra_packets != row.plan.fragment_count);
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string render_report_text(const SchemeReport& report) {
    std::ostringstream out;
    out << "SIB1 budget: capacity " << report.capacity_bytes << " B, base payload "
        << report.base_bytes << " B, free " << report.free_bytes << " B\n\n";
    out << std::left << std::setw(22) << "scheme" << std::right << std::setw(9) << "crypto B"
        << std::setw(7) << "fits" << std::setw(7) << "frags" << std::setw(17) << "pkts b/e/w"
        << std::setw(9) << "comm B" << "  declared\n";
    for (const auto& row : report.rows) {
        std::string pkts = "-";
        if (row.plan.fragment_count > 0) {
            // The expected value is always a half-integer, so one decimal is
            // exact and avoids a second "/" inside the b/e/w column.
            const Rational& e = row.plan.packets.expected;
            std::ostringstream es;
            es << std::fixed << std::setprecision(e.integral() ? 0 : 1) << e.value();
            pkts = std::to_string(row.plan.packets.best) + "/" + es.str() + "/" +
                   std::to_string(row.plan.packets.worst);
        }
        std::string declared;
        if (row.declared_crypto_bytes || row.declared_comm_bytes || row.declared_extra_packets) {
            std::ostringstream d;
            if (row.declared_crypto_bytes) d << " crypto=" << *row.declared_crypto_bytes;
            if (row.declared_extra_packets) d << " pkts=" << *row.declared_extra_packets;
            if (row.declared_comm_bytes) d << " comm=" << *row.declared_comm_bytes;
            declared = d.str().substr(1);
            if (row.declared_mismatch) declared += " (differs from computed)";
        }
        out << std::left << std::setw(22) << row.scheme << std::right << std::setw(9)
            << row.crypto_bytes << std::setw(7) << (row.piggybacks ? "yes" : "no") << std::setw(7)
            << row.plan.fragment_count << std::setw(17) << pkts << std::setw(9) << row.comm_bytes
            << "  " << declared << '\n';
    }
    bool any_delay = false;
    for (const auto& row : report.rows) {
        if (row.plan.fragment_count == 0) continue;
        if (!any_delay) {
            out << "\nfragmented schemes, added broadcast delay over the 20-160 ms period range:\n";
            any_delay = true;
        }
        out << "  " << std::left << std::setw(22) << row.scheme << std::right
            << row.plan.delay_min_ms << " ms to " << row.plan.delay_max_ms << " ms\n";
    }
    return out.str();
}

std::string render_report_csv(const SchemeReport& report) {
    std::ostringstream out;
    out << "scheme,crypto_bytes,piggybacks,fragments,packets_best,packets_expected,"
           "packets_worst,delay_min_ms,delay_max_ms,comm_bytes,declared_crypto_bytes,"
           "declared_comm_bytes,declared_extra_packets,declared_mismatch\n";
    auto opt = [](const auto& v) { return v ? std::to_string(*v) : std::string{}; };
    for (const auto& row : report.rows) {
        out << row.scheme << ',' << row.crypto_bytes << ',' << (row.piggybacks ? 1 : 0) << ','
            << row.plan.fragment_count << ',';
        if (row.plan.fragment_count > 0) {
            out << row.plan.packets.best << ',' << row.plan.packets.expected.str() << ','
                << row.plan.packets.worst << ',' << row.plan.delay_min_ms << ','
                << row.plan.delay_max_ms << ',';
        } else {
            out << ",,,,,";
        }
        out << row.comm_bytes << ',' << opt(row.declared_crypto_bytes) << ','
            << opt(row.declared_comm_bytes) << ',' << opt(row.declared_extra_packets) << ','
            << (row.declared_mismatch ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace borg
