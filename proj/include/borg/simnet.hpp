#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "borg/audit.hpp"

namespace borg {

// Deterministic discrete-event simulation of the full broadcast
// authentication lifecycle: a central key generator delegates down a chain of
// core-network actors to a threshold group of base stations, which sign
// periodic SIB1 broadcasts that a handset verifies. Scenarios also exercise
// the failure paths: forged signatures adjudicated through nonce reveal, and
// signer outages against the threshold.
//
// Transcripts are a pure function of the configuration: every event time is
// a modeled delay taken from the config, never from the host clock. Host
// timings of the underlying crypto calls are collected on the side in
// ScenarioResult::measured and stay out of the transcript.

struct ScenarioConfig {
    std::uint32_t threshold = 2;
    std::uint32_t group_size = 3;
    std::uint32_t depth = 2;       // delegation levels below the root (>= 2)
    std::uint32_t batch_slots = 8;  // nonce slots preprocessed per batch
    std::uint32_t signers = 0;      // signers per round; 0 means threshold
    std::uint64_t base_bytes = 79;  // SIB1 payload before authentication data
    int period_ms = 20;             // SIB1 broadcast period
    int link_latency_ms = 10;       // inter-station control link, one way
    std::uint32_t broadcasts = 10;
    std::uint64_t seed = 1;
    std::string curve = "ristretto255";

    // Modeled compute costs charged in the transcript (microseconds).
    std::int64_t sign_cost_us = 500;
    std::int64_t packet_cost_us = 100;
    std::int64_t verify_cost_us = 400;
};

struct SimEvent {
    std::int64_t t_us = 0;
    std::string actor;
    std::string kind;
    std::string digest;  // first 8 bytes of SHA-256 of the event payload
    std::string detail;
};

struct DelayBreakdown {
    std::int64_t sign_us = 0;
    std::int64_t aggregation_us = 0;   // inter-station share collection
    std::int64_t packet_us = 0;        // per-packet processing
    std::int64_t transmission_us = 0;  // air time across the broadcast period
    std::int64_t verification_us = 0;

    std::int64_t total_us() const {
        return sign_us + aggregation_us + packet_us + transmission_us + verification_us;
    }
};

struct BroadcastOutcome {
    std::uint32_t index = 0;  // 0-based broadcast number
    std::uint32_t batch = 0;
    std::uint32_t slot = 0;  // 1-based slot within the batch
    std::vector<std::uint32_t> signer_set;
    std::uint64_t attached_bytes = 0;
    std::uint32_t packets = 0;
    bool verified = false;
    bool fresh = false;
    DelayBreakdown delays;
    std::int64_t e2e_us = 0;  // always equals delays.total_us()
};

struct Transcript {
    std::vector<SimEvent> events;
    std::vector<BroadcastOutcome> outcomes;
};

struct HaltReport {
    bool tampered = false;
    bool forgery_confirmed = false;
    bool halted = false;
    std::uint32_t refused_requests = 0;
    std::uint32_t unavailable = 0;
    std::string failure;  // library error that aborted the scenario, if any
};

struct MeasuredPhase {
    double total_ms = 0.0;
    std::uint64_t calls = 0;
};

struct ScenarioResult {
    std::string scenario;
    ScenarioConfig config;
    Transcript transcript;
    HaltReport halt;
    std::map<std::string, MeasuredPhase> measured;  // host timings, not replayed

    // Final state of the replicated audit log, one entry per replica, so
    // callers can persist and cross-validate what the scenario recorded.
    std::vector<AuditLog> audit_replicas;
};

// Which recorded broadcast the adversary forges a signature for, and which
// base station raises the alarm. With `forge` false the same adjudication
// pipeline runs against the honest recorded signature (expected outcome:
// not a forgery, no halt).
struct TamperSpec {
    std::uint32_t broadcast_index = 0;
    std::uint32_t reporter = 1;
    bool forge = true;
    std::uint64_t forge_seed = 777;
};

// Key generation down the hierarchy, nonce preprocessing, then `broadcasts`
// signed SIB1 rounds, each appended to the replicated audit log and verified
// by the handset actor.
ScenarioResult run_bootstrap_scenario(const ScenarioConfig& config);

// Bootstrap, then adjudication of a (possibly forged) signature for one
// recorded broadcast: flag, nonce reveal, proof generation and verification,
// and on a confirmed forgery a halt plus refusal of later signing requests.
ScenarioResult run_forgery_scenario(const ScenarioConfig& config, const TamperSpec& tamper);

// Bootstrap with the given base stations offline. Rounds proceed whenever at
// least `threshold` stations remain; otherwise the handset records
// authentication-unavailable and keeps scanning.
ScenarioResult run_unavailability_scenario(const ScenarioConfig& config,
                                           const std::vector<std::uint32_t>& offline);

// JSON lines: one object per event, then one closing summary object.
std::string transcript_jsonl(const ScenarioResult& result);
void save_transcript(const ScenarioResult& result, const std::string& path);

}  // namespace borg
