#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "borg/errors.hpp"
#include "borg/sib_model.hpp"
#include "borg/simnet.hpp"

using namespace borg;

namespace {

ScenarioConfig small_config() {
    ScenarioConfig cfg;
    cfg.threshold = 2;
    cfg.group_size = 3;
    cfg.broadcasts = 8;
    cfg.batch_slots = 8;
    cfg.seed = 11;
    return cfg;
}

std::size_t count_kind(const ScenarioResult& r, const std::string& kind) {
    std::size_t n = 0;
    for (const auto& ev : r.transcript.events) n += ev.kind == kind ? 1 : 0;
    return n;
}

void check_transcript_wellformed(const ScenarioResult& r) {
    std::int64_t prev = 0;
    for (const auto& ev : r.transcript.events) {
        CHECK(ev.t_us >= prev);
        prev = ev.t_us;
        CHECK_FALSE(ev.actor.empty());
        CHECK_FALSE(ev.kind.empty());
    }
    for (const auto& o : r.transcript.outcomes) {
        CHECK(o.e2e_us == o.delays.total_us());
    }
}

}  // namespace

TEST_SUITE("simnet") {

TEST_CASE("bootstrap verifies every broadcast and replays byte-identically") {
    const ScenarioConfig cfg = small_config();
    const ScenarioResult a = run_bootstrap_scenario(cfg);
    const ScenarioResult b = run_bootstrap_scenario(cfg);

    CHECK(a.scenario == "bootstrap");
    REQUIRE(a.transcript.outcomes.size() == 8);
    for (const auto& o : a.transcript.outcomes) {
        CHECK(o.verified);
        CHECK(o.fresh);
        CHECK(o.attached_bytes == 144);
        CHECK(o.packets == 1);
        CHECK(o.signer_set == std::vector<std::uint32_t>{1, 2});
    }
    check_transcript_wellformed(a);
    CHECK(count_kind(a, "verify-ok") == 8);
    CHECK(count_kind(a, "audit-append") == 8);
    CHECK(count_kind(a, "verify-failed") == 0);
    CHECK_FALSE(a.halt.halted);
    CHECK(a.halt.failure.empty());

    // Same seed, same bytes; the host timings on the side are free to differ.
    CHECK(transcript_jsonl(a) == transcript_jsonl(b));

    ScenarioConfig other = cfg;
    other.seed = 12;
    CHECK(transcript_jsonl(run_bootstrap_scenario(other)) != transcript_jsonl(a));

    // Host timings were collected for the real library calls.
    CHECK(a.measured.at("sign").calls == 16);
    CHECK(a.measured.at("verify").calls == 8);
    CHECK(a.measured.at("setup").calls == 1);
}

TEST_CASE("modeled delay breakdown sums exactly and follows the configuration") {
    ScenarioConfig cfg = small_config();
    cfg.broadcasts = 3;
    cfg.sign_cost_us = 700;
    cfg.packet_cost_us = 150;
    cfg.verify_cost_us = 450;
    cfg.link_latency_ms = 7;
    const ScenarioResult r = run_bootstrap_scenario(cfg);
    REQUIRE(r.transcript.outcomes.size() == 3);
    for (const auto& o : r.transcript.outcomes) {
        CHECK(o.delays.sign_us == 700);
        CHECK(o.delays.aggregation_us == 14000);
        CHECK(o.delays.packet_us == 150);  // one piggybacked packet
        CHECK(o.delays.transmission_us == 0);
        CHECK(o.delays.verification_us == 450);
        CHECK(o.e2e_us == 700 + 14000 + 150 + 0 + 450);
    }

    // A deep hierarchy no longer fits the packet and pays fragmentation:
    // transmission spans whole broadcast periods.
    ScenarioConfig deep = small_config();
    deep.depth = 6;
    deep.broadcasts = 2;
    const ScenarioResult rd = run_bootstrap_scenario(deep);
    REQUIRE(rd.transcript.outcomes.size() == 2);
    for (const auto& o : rd.transcript.outcomes) {
        const FragmentPlan plan =
            fragment_plan(o.attached_bytes, kSib1CapacityBytes - deep.base_bytes);
        REQUIRE(plan.fragment_count == 2);
        CHECK(o.packets == plan.fragment_count);
        CHECK(o.delays.transmission_us ==
              broadcast_delay_ms(o.packets, deep.period_ms) * 1000);
        CHECK(o.delays.packet_us == std::int64_t(o.packets) * deep.packet_cost_us);
        CHECK(o.verified);
        CHECK(o.fresh);  // one extra period of air time still inside the window
        CHECK(o.e2e_us == o.delays.total_us());
    }

    // Enough fragments push the air time past the freshness window: the
    // handset still verifies the signature but flags the payload stale.
    ScenarioConfig stale = small_config();
    stale.depth = 20;
    stale.broadcasts = 1;
    const ScenarioResult rs = run_bootstrap_scenario(stale);
    REQUIRE(rs.transcript.outcomes.size() == 1);
    const auto& o = rs.transcript.outcomes.front();
    CHECK(o.packets == 4);
    CHECK(o.delays.transmission_us == 60000);
    CHECK(o.verified);
    CHECK_FALSE(o.fresh);
}

TEST_CASE("single signer degenerates to the centralized path") {
    ScenarioConfig cfg = small_config();
    cfg.threshold = 1;
    cfg.group_size = 1;
    cfg.broadcasts = 4;
    const ScenarioResult r = run_bootstrap_scenario(cfg);
    REQUIRE(r.transcript.outcomes.size() == 4);
    for (const auto& o : r.transcript.outcomes) {
        CHECK(o.verified);
        CHECK(o.delays.aggregation_us == 0);  // no inter-station hops
        CHECK(o.signer_set == std::vector<std::uint32_t>{1});
    }
}

TEST_CASE("threshold resilience, exhaustive over offline subsets up to five stations") {
    for (std::uint32_t n = 1; n <= 5; ++n) {
        for (std::uint32_t t = 1; t <= n; ++t) {
            for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
                std::vector<std::uint32_t> offline;
                for (std::uint32_t i = 0; i < n; ++i) {
                    if (mask & (1u << i)) offline.push_back(i + 1);
                }
                CAPTURE(n);
                CAPTURE(t);
                CAPTURE(mask);
                ScenarioConfig cfg;
                cfg.threshold = t;
                cfg.group_size = n;
                cfg.broadcasts = 2;
                cfg.batch_slots = 2;
                cfg.seed = 100 + mask;
                const ScenarioResult r = run_unavailability_scenario(cfg, offline);
                check_transcript_wellformed(r);
                CHECK(r.halt.failure.empty());
                if (n - offline.size() >= t) {
                    REQUIRE(r.transcript.outcomes.size() == 2);
                    for (const auto& o : r.transcript.outcomes) CHECK(o.verified);
                    CHECK(r.halt.unavailable == 0);
                } else {
                    CHECK(r.transcript.outcomes.empty());
                    CHECK(r.halt.unavailable == 2);
                    CHECK(count_kind(r, "auth-unavailable") == 2);
                    CHECK(count_kind(r, "rescan") == 2);
                }
            }
        }
    }
}

TEST_CASE("empty offline set reproduces the bootstrap transcript") {
    const ScenarioConfig cfg = small_config();
    CHECK(transcript_jsonl(run_unavailability_scenario(cfg, {})) ==
          transcript_jsonl(run_bootstrap_scenario(cfg)));
}

TEST_CASE("offline station drops out of the signer set") {
    ScenarioConfig cfg = small_config();
    cfg.broadcasts = 3;
    const ScenarioResult r = run_unavailability_scenario(cfg, {1});
    CHECK(r.scenario == "unavailability");
    REQUIRE(r.transcript.outcomes.size() == 3);
    for (const auto& o : r.transcript.outcomes) {
        CHECK(o.verified);
        CHECK(o.signer_set == std::vector<std::uint32_t>{2, 3});
    }
    CHECK_THROWS_AS(run_unavailability_scenario(cfg, {9}), Error);
}

TEST_CASE("forged broadcast is confirmed, halts signing, and refuses new requests") {
    ScenarioConfig cfg = small_config();
    TamperSpec tamper;
    tamper.broadcast_index = 4;
    tamper.reporter = 3;
    const ScenarioResult r = run_forgery_scenario(cfg, tamper);

    CHECK(r.scenario == "forgery");
    CHECK(r.halt.tampered);
    CHECK(r.halt.forgery_confirmed);
    CHECK(r.halt.halted);
    CHECK(r.halt.refused_requests == 1);
    CHECK(r.halt.failure.empty());
    REQUIRE(r.transcript.outcomes.size() == 8);  // the post-halt request was refused

    CHECK(count_kind(r, "forgery-flagged") == 1);
    CHECK(count_kind(r, "nonce-reveal") == 3);
    CHECK(count_kind(r, "proof-generated") == 1);
    CHECK(count_kind(r, "proof-verified") == 1);
    CHECK(count_kind(r, "halt") == 1);
    CHECK(count_kind(r, "sign-refused") == 1);
    check_transcript_wellformed(r);

    // The flag was raised by the configured reporter.
    for (const auto& ev : r.transcript.events) {
        if (ev.kind == "forgery-flagged") CHECK(ev.actor == "bs-3");
    }
}

TEST_CASE("honest signature through the adjudication pipeline does not halt") {
    ScenarioConfig cfg = small_config();
    TamperSpec tamper;
    tamper.broadcast_index = 2;
    tamper.forge = false;
    const ScenarioResult r = run_forgery_scenario(cfg, tamper);

    CHECK_FALSE(r.halt.tampered);
    CHECK_FALSE(r.halt.forgery_confirmed);
    CHECK_FALSE(r.halt.halted);
    CHECK(r.halt.refused_requests == 0);
    CHECK(count_kind(r, "not-a-forgery") == 1);
    CHECK(count_kind(r, "halt") == 0);
    // Signing continued: the extra request became a real broadcast.
    CHECK(r.transcript.outcomes.size() == 9);
    CHECK(r.transcript.outcomes.back().verified);
}

TEST_CASE("every seeded forgery run is detected, honest runs never halt") {
    std::uint32_t detected = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        ScenarioConfig cfg;
        cfg.threshold = 2;
        cfg.group_size = 3;
        cfg.broadcasts = 2;
        cfg.batch_slots = 2;
        cfg.seed = seed;
        TamperSpec tamper;
        tamper.broadcast_index = seed % 2 == 0 ? 0 : 1;
        tamper.forge_seed = seed * 31 + 7;
        const ScenarioResult r = run_forgery_scenario(cfg, tamper);
        detected += (r.halt.forgery_confirmed && r.halt.halted) ? 1 : 0;

        TamperSpec honest = tamper;
        honest.forge = false;
        const ScenarioResult h = run_forgery_scenario(cfg, honest);
        CHECK_FALSE(h.halt.halted);
        CHECK_FALSE(h.halt.forgery_confirmed);
    }
    CHECK(detected == 200);
}

TEST_CASE("tampering with an unknown broadcast index is a scenario failure") {
    ScenarioConfig cfg = small_config();
    TamperSpec tamper;
    tamper.broadcast_index = 99;
    const ScenarioResult r = run_forgery_scenario(cfg, tamper);
    CHECK_FALSE(r.halt.halted);
    CHECK_FALSE(r.halt.failure.empty());
    CHECK(count_kind(r, "scenario-failure") == 1);
    CHECK(r.halt.failure.find("no recorded broadcast") != std::string::npos);
}

TEST_CASE("batch exhaustion triggers fresh preprocessing") {
    ScenarioConfig cfg = small_config();
    cfg.batch_slots = 2;
    cfg.broadcasts = 5;
    const ScenarioResult r = run_bootstrap_scenario(cfg);
    REQUIRE(r.transcript.outcomes.size() == 5);
    // Initial batch for all 3 stations plus two refills at broadcasts 2 and 4.
    CHECK(count_kind(r, "preprocess") == 3 + 3 + 3);
    std::set<std::pair<std::uint32_t, std::uint32_t>> batch_slots;
    for (const auto& o : r.transcript.outcomes) {
        CHECK(o.verified);
        CHECK(batch_slots.emplace(o.batch, o.slot).second);  // never reused
        CHECK(o.slot >= 1);
        CHECK(o.slot <= 2);
    }
}

TEST_CASE("transcript file is JSON lines closed by a summary object") {
    ScenarioConfig cfg = small_config();
    cfg.broadcasts = 3;
    const ScenarioResult r = run_bootstrap_scenario(cfg);
    const std::string path = "simnet_transcript.jsonl";
    save_transcript(r, path);

    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream whole;
    whole << in.rdbuf();
    CHECK(whole.str() == transcript_jsonl(r));

    std::istringstream lines(whole.str());
    std::string line;
    std::vector<nlohmann::json> parsed;
    while (std::getline(lines, line)) parsed.push_back(nlohmann::json::parse(line));
    REQUIRE(parsed.size() == r.transcript.events.size() + 1);
    for (std::size_t i = 0; i < parsed.size() - 1; ++i) {
        CHECK(parsed[i].contains("t_us"));
        CHECK(parsed[i].contains("actor"));
        CHECK(parsed[i].contains("kind"));
    }
    const auto& summary = parsed.back().at("summary");
    CHECK(summary.at("scenario") == "bootstrap");
    CHECK(summary.at("verified") == 3);
    CHECK(summary.at("outcomes").size() == 3);
    CHECK(summary.at("halted") == false);
    std::remove(path.c_str());
}

TEST_CASE("configuration validation") {
    ScenarioConfig cfg = small_config();
    cfg.threshold = 4;  // > group_size
    CHECK_THROWS_AS(run_bootstrap_scenario(cfg), InvalidThreshold);
    cfg = small_config();
    cfg.depth = 1;
    CHECK_THROWS_AS(run_bootstrap_scenario(cfg), Error);
    cfg = small_config();
    cfg.period_ms = 10;
    CHECK_THROWS_AS(run_bootstrap_scenario(cfg), Error);
    cfg = small_config();
    cfg.signers = 1;  // below threshold
    CHECK_THROWS_AS(run_bootstrap_scenario(cfg), InvalidThreshold);
    cfg = small_config();
    cfg.base_bytes = 400;
    CHECK_THROWS_AS(run_bootstrap_scenario(cfg), OversizeSib1);
    cfg = small_config();
    cfg.curve = "secp224k1";
    const ScenarioResult r = run_bootstrap_scenario(cfg);
    for (const auto& o : r.transcript.outcomes) {
        CHECK(o.verified);
        CHECK(o.attached_bytes == 2 * 29 + 2 * 29 + 16);  // 29-byte wire scalars/elements
    }
}

}  // TEST_SUITE
