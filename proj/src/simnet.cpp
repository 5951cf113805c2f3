#include "borg/simnet.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <optional>
#include <queue>
#include <tuple>

#include <nlohmann/json.hpp>

#include "borg/audit.hpp"
#include "borg/bytes.hpp"
#include "borg/errors.hpp"
#include "borg/failstop.hpp"
#include "borg/group.hpp"
#include "borg/hash.hpp"
#include "borg/hex.hpp"
#include "borg/hierarchy.hpp"
#include "borg/sib_model.hpp"
#include "borg/thresh_sign.hpp"

namespace borg {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string short_digest(std::span<const std::uint8_t> payload) {
    const auto d = sha256(payload);
    return to_hex(std::span(d).first(8));
}

void validate(const ScenarioConfig& c) {
    if (c.threshold < 1 || c.threshold > c.group_size) {
        throw InvalidThreshold("threshold must satisfy 1 <= t <= n");
    }
    if (c.signers != 0 && (c.signers < c.threshold || c.signers > c.group_size)) {
        throw InvalidThreshold("signers per round must lie in [threshold, group size]");
    }
    if (c.depth < 2) {
        throw Error("hierarchy depth must be >= 2 (key generator -> core -> stations)");
    }
    if (c.batch_slots < 1) throw Error("preprocess batch needs at least one slot");
    if (c.broadcasts < 1) throw Error("scenario needs at least one broadcast");
    if (c.period_ms < kSib1MinPeriodMs || c.period_ms > kSib1MaxPeriodMs) {
        throw Error("SIB1 period must be in [20, 160] ms");
    }
    if (c.link_latency_ms < 0) throw Error("link latency cannot be negative");
    if (c.sign_cost_us < 0 || c.packet_cost_us < 0 || c.verify_cost_us < 0) {
        throw Error("modeled compute costs cannot be negative");
    }
    if (c.base_bytes >= kSib1CapacityBytes) {
        throw OversizeSib1("base payload leaves no room in the SIB1 packet");
    }
}

// Accumulates host wall time of a library call into result.measured. These
// numbers never feed back into event times, so transcripts stay replayable.
class PhaseTimer {
  public:
    PhaseTimer(ScenarioResult& result, const char* key)
        : phase_(result.measured[key]), start_(std::chrono::steady_clock::now()) {}
    ~PhaseTimer() {
        const auto dt = std::chrono::steady_clock::now() - start_;
        phase_.total_ms += std::chrono::duration<double, std::milli>(dt).count();
        phase_.calls += 1;
    }

  private:
    MeasuredPhase& phase_;
    std::chrono::steady_clock::time_point start_;
};

// Minimal discrete-event core: timed tasks ordered by (time, actor rank,
// schedule order). Tasks may schedule further tasks while running.
class EventLoop {
  public:
    void schedule(std::int64_t t_us, int rank, std::function<void()> fn) {
        heap_.push(Task{t_us, rank, seq_++, std::move(fn)});
    }

    void run() {
        while (!heap_.empty()) {
            auto fn = std::move(const_cast<Task&>(heap_.top()).fn);
            heap_.pop();
            fn();
        }
    }

  private:
    struct Task {
        std::int64_t t;
        int rank;
        std::uint64_t seq;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Task& a, const Task& b) const {
            return std::tie(a.t, a.rank, a.seq) > std::tie(b.t, b.rank, b.seq);
        }
    };
    std::priority_queue<Task, std::vector<Task>, Later> heap_;
    std::uint64_t seq_ = 0;
};

// One preprocessing generation: its bulletin, each online station's nonce
// store, and the signatures produced from it. Old batches are retained
// because forgery adjudication needs exactly the seeds of the disputed slot.
struct BatchState {
    CommitmentBulletin bulletin;
    std::vector<std::optional<NonceStore>> stores;  // station i at stores[i-1]
    SignatureHistory history;

    explicit BatchState(std::string context, std::size_t n)
        : bulletin(std::move(context)), stores(n) {}
};

struct SignedRound {
    std::uint32_t index = 0;
    std::uint32_t batch = 0;
    std::uint32_t slot = 0;
    std::vector<std::uint32_t> signer_set;
    std::vector<std::uint8_t> message;
    ThresholdSignature sig;
};

class Simulation {
  public:
    Simulation(const ScenarioConfig& cfg, std::vector<std::uint32_t> offline)
        : cfg_(cfg), g_(group_by_name(cfg.curve)), rng_(cfg.seed), offline_(std::move(offline)) {
        validate(cfg_);
        std::sort(offline_.begin(), offline_.end());
        offline_.erase(std::unique(offline_.begin(), offline_.end()), offline_.end());
        for (std::uint32_t i : offline_) {
            if (i < 1 || i > cfg_.group_size) throw Error("offline station index out of range");
        }
        for (std::uint32_t i = 1; i <= cfg_.group_size; ++i) {
            if (!std::binary_search(offline_.begin(), offline_.end(), i)) {
                available_.push_back(i);
            }
        }
        beta_ = cfg_.signers == 0 ? cfg_.threshold : cfg_.signers;
        period_us_ = std::int64_t{1000} * cfg_.period_ms;
        link_us_ = std::int64_t{1000} * cfg_.link_latency_ms;
    }

    ScenarioResult run(std::string scenario, const std::optional<TamperSpec>& tamper) {
        result_.scenario = std::move(scenario);
        result_.config = cfg_;
        try {
            setup_phase();
            for (std::uint32_t b = 0; b < cfg_.broadcasts; ++b) {
                schedule_round(b, std::int64_t(b) * period_us_);
            }
            if (tamper) {
                const std::int64_t t_f = std::int64_t{cfg_.broadcasts} * period_us_;
                const TamperSpec spec = *tamper;
                loop_.schedule(t_f, rank_bs(spec.reporter),
                               [this, spec, t_f] { adjudicate(spec, t_f); });
            }
        } catch (const Error& e) {
            fail(0, e.what());
        }
        loop_.run();
        result_.halt = halt_;
        if (audit_) {
            audit_->flush();
            result_.audit_replicas = audit_->replicas();
        }
        return std::move(result_);
    }

  private:
    // Actor ranks break timestamp ties: key generator, core actors by level,
    // stations by index, then the audit service and the handset.
    int rank_bs(std::uint32_t i) const { return int(cfg_.depth) - 1 + int(i); }
    int rank_audit() const { return int(cfg_.depth) + int(cfg_.group_size); }
    int rank_ue() const { return rank_audit() + 1; }

    std::string bs_actor(std::uint32_t i) const { return "bs-" + std::to_string(i); }

    std::string level_label(std::uint32_t level) const {
        if (level == 1) return "amf-west";
        if (level == cfg_.depth) return "gnb-grp1";
        return "core-" + std::to_string(level) + "-grp";
    }

    std::string dealer_actor(std::uint32_t level) const {
        if (level == 1) return "ckg";
        if (level == 2) return "amf";
        return "core-" + std::to_string(level - 1);
    }

    void emit(std::int64_t t, int rank, std::string actor, std::string kind,
              std::string digest = {}, std::string detail = {}) {
        SimEvent ev{t, std::move(actor), std::move(kind), std::move(digest), std::move(detail)};
        loop_.schedule(t, rank, [this, ev = std::move(ev)]() mutable {
            result_.transcript.events.push_back(std::move(ev));
        });
    }

    void fail(std::int64_t t, std::string why) {
        halt_.failure = why;
        failed_ = true;
        emit(t, 1, "amf", "scenario-failure", {}, std::move(why));
    }

    void setup_phase() {
        {
            PhaseTimer tm(result_, "setup");
            mk_ = setup(g_, rng_);
        }
        emit(0, 0, "ckg", "setup", short_digest(mk_.pk.bytes));

        IdentityVector ids;
        GroupKeyChain chain{{mk_.pk}};
        Scalar parent_sk = mk_.sk;
        for (std::uint32_t level = 1; level <= cfg_.depth; ++level) {
            const bool leaf = level == cfg_.depth;
            const std::uint32_t t = leaf ? cfg_.threshold : 1;
            const std::uint32_t n = leaf ? cfg_.group_size : 1;
            ExtractResult ex;
            {
                PhaseTimer tm(result_, "extract");
                ex = extract(g_, to_bytes(level_label(level)), ids, chain, parent_sk, t, n, 0,
                             rng_);
            }
            emit(0, int(level) - 1, dealer_actor(level), "extract",
                 short_digest(ex.chain.leaf().bytes),
                 "level " + std::to_string(level) + " \"" + level_label(level) + "\"");
            ids = ex.shares[0].ids;
            chain = ex.chain;
            if (leaf) {
                bs_ = std::move(ex);
            } else {
                parent_sk = ex.level_secret.sk;
                if (level == cfg_.depth - 1) parent_sk_ = parent_sk;
            }
        }
        ids_ = ids;
        chain_ = chain;
        for (const auto& s : bs_.shares) pk_map_.emplace(s.index, s.pk_share);

        {
            PhaseTimer tm(result_, "audit_keygen");
            thpq_keys_ = thpq_.keygen(cfg_.threshold, cfg_.group_size, rng_);
        }
        audit_.emplace(thpq_, thpq_keys_, 3, 1);
        emit(0, 1, "amf", "audit-keygen", short_digest(thpq_keys_.public_key));

        std::vector<std::uint32_t> everyone(cfg_.group_size);
        for (std::uint32_t i = 1; i <= cfg_.group_size; ++i) everyone[i - 1] = i;
        new_batch(0, everyone);
    }

    void new_batch(std::int64_t t, const std::vector<std::uint32_t>& stations) {
        const auto k = static_cast<std::uint32_t>(batches_.size());
        BatchState batch("simnet-batch-" + std::to_string(k), cfg_.group_size);
        for (std::uint32_t i : stations) {
            PreprocessOutput pre;
            {
                PhaseTimer tm(result_, "preprocess");
                pre = preprocess(g_, bs_.shares[i - 1], cfg_.batch_slots, rng_);
            }
            ByteWriter w;
            for (const auto& pair : pre.commitments.entries) {
                w.raw(pair.e_commit.bytes);
                w.raw(pair.d_commit.bytes);
            }
            emit(t, rank_bs(i), bs_actor(i), "preprocess", short_digest(w.out()),
                 "batch " + std::to_string(k) + ", " + std::to_string(cfg_.batch_slots) +
                     " slots");
            batch.bulletin.publish(g_, pre.commitments);
            batch.stores[i - 1] = std::move(pre.nonces);
        }
        batches_.push_back(std::move(batch));
    }

    void schedule_round(std::uint32_t index, std::int64_t t0) {
        loop_.schedule(t0, 1, [this, index, t0] {
            try {
                round(index, t0);
            } catch (const Error& e) {
                fail(t0, e.what());
            }
        });
    }

    void round(std::uint32_t index, std::int64_t t0) {
        if (failed_) return;
        if (halted_) {
            emit(t0, 1, "amf", "sign-refused", {}, "system halted by forgery proof");
            ++halt_.refused_requests;
            return;
        }
        if (available_.size() < cfg_.threshold) {
            emit(t0, 1, "amf", "quorum-failed", {},
                 std::to_string(available_.size()) + " of " + std::to_string(cfg_.group_size) +
                     " stations online, threshold " + std::to_string(cfg_.threshold));
            emit(t0 + period_us_, rank_ue(), "ue", "auth-unavailable", {},
                 "no authenticated SIB1 this period");
            emit(t0 + period_us_, rank_ue(), "ue", "rescan", {},
                 "scanning for alternative stations");
            ++halt_.unavailable;
            return;
        }

        const std::uint32_t batch = signed_count_ / cfg_.batch_slots;
        const std::uint32_t slot = signed_count_ % cfg_.batch_slots + 1;
        if (batch == batches_.size()) new_batch(t0, available_);
        ++signed_count_;
        BatchState& bs_batch = batches_[batch];

        const std::vector<std::uint8_t> message = rng_.bytes(cfg_.base_bytes);
        const auto use = std::min<std::size_t>(beta_, available_.size());
        const std::vector<std::uint32_t> set(available_.begin(), available_.begin() + use);
        const std::uint32_t leader = set.front();

        emit(t0, 1, "amf", "sign-request", short_digest(message),
             "broadcast " + std::to_string(index) + ", slot " + std::to_string(slot) +
                 " of batch " + std::to_string(batch));

        DelayBreakdown d;
        d.sign_us = cfg_.sign_cost_us;
        d.aggregation_us = set.size() > 1 ? 2 * link_us_ : 0;
        const std::int64_t t_share = t0 + (set.size() > 1 ? link_us_ : 0) + d.sign_us;

        std::vector<SignatureShare> shares;
        for (std::uint32_t i : set) {
            {
                PhaseTimer tm(result_, "sign");
                shares.push_back(sign_share(g_, message, slot, bs_batch.bulletin, set,
                                            bs_.shares[i - 1], *bs_batch.stores[i - 1]));
            }
            emit(t_share, rank_bs(i), bs_actor(i), "sign-share",
                 short_digest(shares.back().z.bytes));
        }

        ThresholdSignature sig;
        {
            PhaseTimer tm(result_, "aggregate");
            sig = aggregate(g_, message, slot, bs_batch.bulletin, set, pk_map_, chain_, shares);
        }
        const std::int64_t t_agg = t0 + d.sign_us + d.aggregation_us;
        const auto wire = signature_wire_bytes(sig);
        emit(t_agg, rank_bs(leader), bs_actor(leader), "aggregate", short_digest(wire));
        bs_batch.history.append({message, sig, t_agg / 1000});

        AuditEntryContent content;
        content.slot = index;
        content.timestamp_ms = t_agg / 1000;
        content.bs_signature = wire;
        for (std::uint32_t i : set) content.bs_ids.push_back(bs_actor(i));
        {
            PhaseTimer tm(result_, "audit_append");
            audit_->append(content);
        }
        emit(t_agg, rank_audit(), "audit", "audit-append",
             short_digest(audit_entry_message(content)));

        // SIB1 assembly: piggyback when the authentication data fits the
        // packet, otherwise broadcast it as extra fragments.
        std::uint64_t attached = wire.size();
        for (std::size_t i = 1; i < chain_.q.size(); ++i) attached += chain_.q[i].bytes.size();
        for (const auto& id : ids_.ids) attached += id.size();
        const FragmentPlan plan = fragment_plan(attached, kSib1CapacityBytes - cfg_.base_bytes);

        std::uint32_t packets = 1;
        std::string bcast_digest;
        std::string bcast_detail = "piggybacked, 1 packet";
        if (plan.fragment_count == 0) {
            const Sib1Message sib = build_authenticated_sib1(message, sig, chain_, ids_);
            ByteWriter w;
            w.raw(sib.base);
            w.raw(sib.attached);
            bcast_digest = short_digest(w.out());
        } else {
            packets = plan.fragment_count;
            bcast_digest = short_digest(wire);
            bcast_detail = "fragmented, " + std::to_string(packets) + " packets";
        }
        d.packet_us = std::int64_t{packets} * cfg_.packet_cost_us;
        d.transmission_us = broadcast_delay_ms(packets, cfg_.period_ms) * 1000;
        d.verification_us = cfg_.verify_cost_us;
        emit(t_agg + d.packet_us, rank_bs(leader), bs_actor(leader), "sib1-broadcast",
             bcast_digest, bcast_detail);

        bool ok;
        {
            PhaseTimer tm(result_, "verify");
            ok = chain_.root() == mk_.pk && mverify(g_, message, ids_, chain_, sig);
        }
        const std::int64_t t_done = t0 + d.total_us();
        const FreshnessPolicy policy{cfg_.period_ms, 30, {}};
        const bool fresh = freshness_check(t_agg / 1000, policy.window_for(level_label(cfg_.depth)),
                                           t_done / 1000) == Freshness::fresh;
        emit(t_done, rank_ue(), "ue", ok ? "verify-ok" : "verify-failed", short_digest(wire),
             fresh ? "fresh" : "stale");

        BroadcastOutcome outcome;
        outcome.index = index;
        outcome.batch = batch;
        outcome.slot = slot;
        outcome.signer_set = set;
        outcome.attached_bytes = attached;
        outcome.packets = packets;
        outcome.verified = ok;
        outcome.fresh = fresh;
        outcome.delays = d;
        outcome.e2e_us = d.total_us();
        result_.transcript.outcomes.push_back(outcome);

        rounds_.push_back({index, batch, slot, set, message, sig});
    }

    void adjudicate(const TamperSpec& spec, std::int64_t t_f) {
        if (failed_) return;
        try {
            const SignedRound* rec = nullptr;
            for (const auto& r : rounds_) {
                if (r.index == spec.broadcast_index) rec = &r;
            }
            if (rec == nullptr) {
                throw UnknownMessageIndex("no recorded broadcast with index " +
                                          std::to_string(spec.broadcast_index));
            }
            if (spec.reporter < 1 || spec.reporter > cfg_.group_size) {
                throw Error("reporter station index out of range");
            }

            ThresholdSignature suspect = rec->sig;
            if (spec.forge) {
                // Stands in for an adversary who computed the group secret:
                // a fresh commitment and a consistent response that passes
                // public verification but never went through the nonces.
                DeterministicRng frng(spec.forge_seed);
                const Scalar sk = reconstruct_secret(g_, bs_.shares);
                const Scalar k = g_.sample_scalar(frng);
                suspect.r = g_.exp_base(k);
                const Scalar h = challenge_scalar(g_, suspect.r, chain_.leaf(), rec->message);
                suspect.z = g_.scalar_add(k, g_.scalar_mul(sk, h));
            }
            halt_.tampered = spec.forge;
            const auto suspect_wire = signature_wire_bytes(suspect);
            emit(t_f, rank_bs(spec.reporter), bs_actor(spec.reporter), "forgery-flagged",
                 short_digest(suspect_wire),
                 "suspect signature for broadcast " + std::to_string(rec->index));

            BatchState& batch = batches_[rec->batch];
            std::vector<RevealedNonces> reveals;
            for (std::uint32_t i = 1; i <= cfg_.group_size; ++i) {
                if (!batch.stores[i - 1]) continue;
                auto [e_hat, d_hat] = batch.stores[i - 1]->reveal();
                reveals.push_back({i, e_hat, d_hat});
                emit(t_f + link_us_, rank_bs(i), bs_actor(i), "nonce-reveal", {},
                     "batch " + std::to_string(rec->batch) + " seeds");
            }

            std::optional<ForgeryProof> proof;
            {
                PhaseTimer tm(result_, "pof");
                proof = pof(g_, suspect, rec->message, batch.history, reveals, ids_);
            }
            const std::int64_t t_adj = t_f + 2 * link_us_;
            if (!proof) {
                emit(t_adj, 1, "amf", "not-a-forgery", {},
                     "recomputed commitment matches the record; keep operating");
            } else {
                ByteWriter w;
                for (const auto& s : proof->e_hats) w.raw(s.bytes);
                for (const auto& s : proof->d_hats) w.raw(s.bytes);
                emit(t_adj, 1, "amf", "proof-generated", short_digest(w.out()),
                     "slot " + std::to_string(proof->slot));
                PofVerdict verdict;
                {
                    PhaseTimer tm(result_, "pof_verify");
                    verdict = pof_verify(g_, bs_.level_secret.alpha, parent_sk_, ids_, chain_,
                                         pk_map_, rec->message, suspect, proof);
                }
                if (verdict == PofVerdict::forgery_confirmed) {
                    halt_.forgery_confirmed = true;
                    halt_.halted = true;
                    halted_ = true;
                    emit(t_adj, 1, "amf", "proof-verified", {}, "forgery confirmed");
                    emit(t_adj, 1, "amf", "halt", {}, "signing disabled pending re-keying");
                } else {
                    emit(t_adj, 1, "amf", "proof-rejected", {}, "proof does not hold");
                }
            }
            // Show the policy: one more signing request after adjudication.
            schedule_round(cfg_.broadcasts, t_adj + period_us_);
        } catch (const Error& e) {
            fail(t_f, e.what());
        }
    }

    ScenarioConfig cfg_;
    const Group& g_;
    DeterministicRng rng_;
    std::vector<std::uint32_t> offline_;
    std::vector<std::uint32_t> available_;
    std::uint32_t beta_ = 0;
    std::int64_t period_us_ = 0;
    std::int64_t link_us_ = 0;

    EventLoop loop_;
    ScenarioResult result_;
    HaltReport halt_;
    bool halted_ = false;
    bool failed_ = false;

    MasterKey mk_;
    ExtractResult bs_;
    Scalar parent_sk_;  // secret of the station group's dealer
    IdentityVector ids_;
    GroupKeyChain chain_;
    std::map<std::uint32_t, GroupElement> pk_map_;

    InsecureHashThpq thpq_;
    ThpqKeyMaterial thpq_keys_;
    std::optional<ReplicatedAuditStore> audit_;

    std::vector<BatchState> batches_;
    std::uint32_t signed_count_ = 0;
    std::vector<SignedRound> rounds_;
};

}  // namespace

ScenarioResult run_bootstrap_scenario(const ScenarioConfig& config) {
    return Simulation(config, {}).run("bootstrap", std::nullopt);
}

ScenarioResult run_forgery_scenario(const ScenarioConfig& config, const TamperSpec& tamper) {
    return Simulation(config, {}).run("forgery", tamper);
}

ScenarioResult run_unavailability_scenario(const ScenarioConfig& config,
                                           const std::vector<std::uint32_t>& offline) {
    Simulation sim(config, offline);
    return sim.run(offline.empty() ? "bootstrap" : "unavailability", std::nullopt);
}

std::string transcript_jsonl(const ScenarioResult& result) {
    std::string out;
    for (const SimEvent& ev : result.transcript.events) {
        ordered_json j;
        j["t_us"] = ev.t_us;
        j["actor"] = ev.actor;
        j["kind"] = ev.kind;
        if (!ev.digest.empty()) j["digest"] = ev.digest;
        if (!ev.detail.empty()) j["detail"] = ev.detail;
        out += j.dump();
        out += '\n';
    }

    ordered_json s;
    s["scenario"] = result.scenario;
    s["curve"] = result.config.curve;
    s["threshold"] = result.config.threshold;
    s["group_size"] = result.config.group_size;
    s["depth"] = result.config.depth;
    s["signers"] = result.config.signers == 0 ? result.config.threshold : result.config.signers;
    s["batch_slots"] = result.config.batch_slots;
    s["base_bytes"] = result.config.base_bytes;
    s["period_ms"] = result.config.period_ms;
    s["link_latency_ms"] = result.config.link_latency_ms;
    s["seed"] = result.config.seed;
    s["broadcasts_requested"] = result.config.broadcasts;
    std::uint32_t verified = 0;
    for (const auto& o : result.transcript.outcomes) verified += o.verified ? 1 : 0;
    s["verified"] = verified;
    s["unavailable"] = result.halt.unavailable;
    s["tampered"] = result.halt.tampered;
    s["forgery_confirmed"] = result.halt.forgery_confirmed;
    s["halted"] = result.halt.halted;
    s["refused"] = result.halt.refused_requests;
    if (!result.halt.failure.empty()) s["failure"] = result.halt.failure;
    s["outcomes"] = ordered_json::array();
    for (const auto& o : result.transcript.outcomes) {
        ordered_json jo;
        jo["index"] = o.index;
        jo["batch"] = o.batch;
        jo["slot"] = o.slot;
        jo["signers"] = o.signer_set;
        jo["attached_bytes"] = o.attached_bytes;
        jo["packets"] = o.packets;
        jo["verified"] = o.verified;
        jo["fresh"] = o.fresh;
        jo["delays_us"] = {{"sign", o.delays.sign_us},
                           {"aggregation", o.delays.aggregation_us},
                           {"packet", o.delays.packet_us},
                           {"transmission", o.delays.transmission_us},
                           {"verification", o.delays.verification_us}};
        jo["e2e_us"] = o.e2e_us;
        s["outcomes"].push_back(std::move(jo));
    }
    ordered_json wrap;
    wrap["summary"] = std::move(s);
    out += wrap.dump();
    out += '\n';
    return out;
}

void save_transcript(const ScenarioResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << transcript_jsonl(result);
}

}  // namespace borg
