#include "verimark/simnet.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <memory>
#include <queue>
#include <set>
#include <sstream>

namespace verimark {

const char* threat_name(ThreatId id) {
    switch (id) {
        case ThreatId::Honest: return "honest";
        case ThreatId::T1: return "T1";
        case ThreatId::T2: return "T2";
        case ThreatId::T3: return "T3";
        case ThreatId::T4: return "T4";
        case ThreatId::T5: return "T5";
        case ThreatId::T6: return "T6";
        case ThreatId::T7: return "T7";
        case ThreatId::T8: return "T8";
        case ThreatId::T9: return "T9";
    }
    return "unknown";
}

const char* threat_description(ThreatId id) {
    switch (id) {
        case ThreatId::Honest: return "all participants honest";
        case ThreatId::T1: return "contractor sends false responses to save resources";
        case ThreatId::T2: return "verifier sends false responses to save resources";
        case ThreatId::T3: return "outsourcer sends different inputs to refuse payment";
        case ThreatId::T4: return "worker tries to avoid penalties with altered records";
        case ThreatId::T5: return "participant refuses to pay";
        case ThreatId::T6: return "outsourcer and verifier collude against the contractor";
        case ThreatId::T7: return "contractor and verifier collude to save resources";
        case ThreatId::T8: return "timeout, low response rate, high response time";
        case ThreatId::T9: return "message tampering by an external attacker";
    }
    return "unknown";
}

const char* threat_techniques(ThreatId id) {
    switch (id) {
        case ThreatId::Honest: return "-";
        case ThreatId::T1: return "sampling-based re-execution, third-party verifier";
        case ThreatId::T2: return "contestation";
        case ThreatId::T3: return "digital signatures (signature chain), contestation";
        case ThreatId::T4: return "digital signatures";
        case ThreatId::T5: return "settlement entity pays on the refuser's behalf (deposits)";
        case ThreatId::T6: return "randomization, game-theoretic incentives, contestation";
        case ThreatId::T7: return "randomization, game-theoretic incentives";
        case ThreatId::T8: return "blacklisting, review system, contract abortion";
        case ThreatId::T9: return "digital signatures";
    }
    return "-";
}

std::optional<ThreatId> threat_from_name(const std::string& name) {
    static const std::pair<const char*, ThreatId> table[] = {
        {"honest", ThreatId::Honest}, {"T1", ThreatId::T1}, {"T2", ThreatId::T2},
        {"T3", ThreatId::T3},         {"T4", ThreatId::T4}, {"T5", ThreatId::T5},
        {"T6", ThreatId::T6},         {"T7", ThreatId::T7}, {"T8", ThreatId::T8},
        {"T9", ThreatId::T9},
    };
    for (const auto& [key, id] : table)
        if (name == key) return id;
    return std::nullopt;
}

NetworkModel inject_tamper(NetworkModel network, NetworkModel::Tamper rule, double rate) {
    network.tamper = rule;
    network.tamper_rate = rate;
    return network;
}

NetworkModel inject_latency(NetworkModel network, std::uint64_t latency_min,
                            std::uint64_t latency_max) {
    network.latency_min = latency_min;
    network.latency_max = std::max(latency_min, latency_max);
    return network;
}

NetworkModel inject_drop(NetworkModel network, double drop_response_rate) {
    network.drop_response_rate = drop_response_rate;
    return network;
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& what) { throw ScenarioInvariantError(what); };
    if (total_inputs == 0) fail("total_inputs must be >= 1");
    if (interval_size == 0) fail("interval_size must be >= 1");
    if (reward_per_input <= 0) fail("reward_per_input must be > 0");
    if (fee < 0 || bounty < 0 || worker_deposit < 0 || outsourcer_deposit < 0)
        fail("fee, bounty, and deposits must be >= 0");
    if (worker_deposit < fee)
        fail("worker deposit must cover the fee so the fine is enforceable");
    Currency contest_reward =
        contest_verifier_reward > 0 ? contest_verifier_reward : reward_per_input;
    if (worker_deposit < fee + bounty + 2 * contest_reward)
        fail("worker deposit must cover fee + bounty + one contestation round");
    if (outsourcer_deposit < 2 * fee)
        fail("outsourcer deposit must cover the fine for both contracts");
    if (pool_size < 3) fail("pool_size must be >= 3 for contestation");
    if (similarity_threshold < 0 || similarity_threshold > 1)
        fail("similarity_threshold must lie in [0, 1]");
    if (cheat_rate < 0 || cheat_rate > 1) fail("cheat_rate must lie in [0, 1]");
    if (network.drop_response_rate < 0 || network.drop_response_rate > 1)
        fail("drop_response_rate must lie in [0, 1]");
    if (network.tamper_rate < 0 || network.tamper_rate > 1)
        fail("tamper_rate must lie in [0, 1]");
    if (batching && batch_size == 0) fail("batch_size must be >= 1");
    qos.validate();
    if (deadline_ticks == 0) fail("deadline_ticks must be >= 1");
}

// ---------------------------------------------------------------------------
// Scenario runner
// ---------------------------------------------------------------------------

namespace {

constexpr int kOutsourcerId = 0;
constexpr int kContractorId = 1;
constexpr int kVerifierId = 2;
constexpr int kSettlementId = 3;
constexpr int kPoolBase = 4;
constexpr std::uint64_t kFirstInputTick = 10;
constexpr std::uint64_t kSettlementLatency = 1;
constexpr std::uint64_t kQosSweepPeriod = 10;

std::size_t payload_offset_for(std::uint8_t tag) {
    switch (static_cast<MsgTag>(tag)) {
        case MsgTag::SignedInput: return 53;      // len at 49
        case MsgTag::SignedResponse: return 41;   // len at 37
        case MsgTag::BatchedResponse: return 41;  // len at 37
        default: return 0;
    }
}

std::uint32_t read_u32_at(const Bytes& bytes, std::size_t at) {
    return static_cast<std::uint32_t>(bytes[at]) |
           static_cast<std::uint32_t>(bytes[at + 1]) << 8 |
           static_cast<std::uint32_t>(bytes[at + 2]) << 16 |
           static_cast<std::uint32_t>(bytes[at + 3]) << 24;
}

std::size_t overhead_for_tag(std::uint8_t tag) {
    switch (static_cast<MsgTag>(tag)) {
        case MsgTag::SignedInput: return 84;
        case MsgTag::SignedResponse: return 72;
        case MsgTag::RootCommitment: return 76;
        case MsgTag::MembershipChallenge: return 72;
        case MsgTag::MembershipProof: return 80;
        case MsgTag::Termination: return 68;
        case MsgTag::OutsourcerCommit: return 64;
        case MsgTag::ContractorCommit: return 68;
        case MsgTag::BatchedResponse: return 8;
        default: return 0;
    }
}

class ScenarioRunner {
public:
    explicit ScenarioRunner(const ScenarioConfig& config)
        : config_(config),
          root_(config.seed ^ 0x76657269ULL),
          ledger_(root_.next(),
                  LedgerParams{config.deadline_ticks, config.similarity_threshold,
                               config.contest_verifier_reward}) {
        build_actors();
    }

    ScenarioReport run();

private:
    using RunnerEvent = std::variant<ActorEvent, SettlementRequest>;

    struct Queued {
        std::uint64_t time;
        std::uint64_t seq;
        int target;
        RunnerEvent event;
    };
    struct QueuedOrder {
        bool operator()(const Queued& a, const Queued& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    void build_actors();
    void make_verifier_actor(const Contract& contract);
    Strategy contractor_strategy() const;
    Strategy verifier_strategy() const;
    Strategy outsourcer_strategy() const;
    ContestBehavior contractor_contest_behavior() const;
    ContestBehavior verifier_contest_behavior() const;

    void post(std::uint64_t time, int target, RunnerEvent event);
    void dispatch(const Queued& item);
    void route(int from, std::uint64_t now, std::vector<Outbound> outs);
    void deliver_wire(int from, int to, std::uint64_t now, std::uint64_t extra_delay,
                      Bytes bytes);
    void process_settlement(const SettlementRequest& request, std::uint64_t now);
    void emit_note(std::uint64_t now, const PublicKey& to, SettlementNote note);
    void emit_closures(std::uint64_t now);
    void drain();
    int actor_id_of(const PublicKey& pk) const;
    SplitMix64& link_rng(int from, int to);

    void assess(ScenarioReport& report) const;

    ScenarioConfig config_;
    SplitMix64 root_;
    Ledger ledger_;

    std::unique_ptr<OutsourcerActor> outsourcer_;
    std::unique_ptr<WorkerActor> contractor_;
    std::unique_ptr<WorkerActor> verifier_;
    std::vector<std::unique_ptr<PoolVerifierActor>> pool_;
    std::vector<PublicKey> pool_keys_;                 // sorted
    std::map<PublicKey, Bytes> key_seed_by_pk_;
    std::map<PublicKey, int> actor_id_by_pk_;
    std::uint64_t verifier_rng_seed_ = 0;

    std::priority_queue<Queued, std::vector<Queued>, QueuedOrder> queue_;
    std::uint64_t seq_ = 0;
    std::uint64_t now_ = 0;
    std::map<std::pair<int, int>, SplitMix64> link_rngs_;
    std::map<std::pair<int, int>, std::uint64_t> link_last_delivery_;
    SplitMix64 tamper_rng_{0};

    std::map<std::uint64_t, PublicKey> parked_contest_requests_;
    std::set<std::uint64_t> closures_emitted_;

    // metrics
    std::uint64_t messages_ = 0;
    std::uint64_t wire_bytes_ = 0;
    std::uint64_t payload_bytes_ = 0;
    std::map<std::string, std::uint64_t> messages_by_type_;
    std::uint64_t signed_inputs_ = 0;
    std::uint64_t signed_input_overhead_min_ = 0;
    std::uint64_t signed_input_overhead_max_ = 0;
    std::uint64_t max_overhead_ = 0;
    std::uint64_t tampered_delivered_ = 0;
    std::uint64_t dropped_ = 0;
    std::uint64_t accusations_ = 0;
    std::uint64_t contest_rounds_ = 0;
    std::uint64_t redeem_rejections_ = 0;
    std::uint64_t contest_rejections_ = 0;
    Currency initial_total_ = 0;
};

void ScenarioRunner::build_actors() {
    Bytes outsourcer_seed = root_.bytes(32);
    Bytes contractor_seed = root_.bytes(32);
    for (std::uint32_t i = 0; i < config_.pool_size; ++i) {
        Bytes seed = root_.bytes(32);
        PublicKey pk = KeyPair::from_seed(seed).public_key();
        key_seed_by_pk_[pk] = seed;
        pool_keys_.push_back(pk);
    }
    std::sort(pool_keys_.begin(), pool_keys_.end());

    KeyPair outsourcer_keys = KeyPair::from_seed(outsourcer_seed);
    KeyPair contractor_keys = KeyPair::from_seed(contractor_seed);
    ComputeFunction fn = make_function(config_.input);

    Contract contractor_contract;
    contractor_contract.contract_id = Digest32::from_bytes(root_.bytes(32));
    contractor_contract.outsourcer_pk = outsourcer_keys.public_key();
    contractor_contract.worker_pk = contractor_keys.public_key();
    contractor_contract.role = Role::Contractor;
    contractor_contract.reward_per_input = config_.reward_per_input;
    contractor_contract.fee = config_.fee;
    contractor_contract.bounty = config_.bounty;
    contractor_contract.deposit = config_.worker_deposit;
    contractor_contract.function_id = fn.function_id;
    contractor_contract.qos = config_.qos;

    Contract verifier_template = contractor_contract;
    verifier_template.contract_id = Digest32::from_bytes(root_.bytes(32));
    verifier_template.role = Role::Verifier;
    verifier_template.worker_pk = PublicKey{};

    OutsourcerConfig oc;
    oc.key_seed = outsourcer_seed;
    oc.contractor_contract = contractor_contract;
    oc.verifier_contract_template = verifier_template;
    oc.outsourcer_deposit_per_contract = config_.outsourcer_deposit;
    oc.input_spec = config_.input;
    oc.total_inputs = config_.total_inputs;
    oc.interval_size = config_.interval_size;
    oc.strategy = outsourcer_strategy();
    oc.batching = config_.batching;
    oc.batch_size = config_.batch_size;
    oc.similarity_threshold = config_.similarity_threshold;
    oc.local_verifier_list = pool_keys_;
    oc.rng_seed = root_.next();
    oc.schedule_seed = root_.next();
    outsourcer_ = std::make_unique<OutsourcerActor>(std::move(oc));

    WorkerConfig wc;
    wc.key_seed = contractor_seed;
    wc.contract = contractor_contract;
    wc.input_spec = config_.input;
    wc.strategy = contractor_strategy();
    wc.contest_behavior = contractor_contest_behavior();
    wc.batching = config_.batching;
    wc.batch_size = config_.batch_size;
    wc.forge_redemption = config_.threat == ThreatId::T4;
    wc.verifier_list_for_commit = pool_keys_;
    wc.rng_seed = root_.next();
    contractor_ = std::make_unique<WorkerActor>(std::move(wc));

    verifier_rng_seed_ = root_.next();
    tamper_rng_ = SplitMix64(root_.next());

    actor_id_by_pk_[outsourcer_keys.public_key()] = kOutsourcerId;
    actor_id_by_pk_[contractor_keys.public_key()] = kContractorId;
    for (std::size_t i = 0; i < pool_keys_.size(); ++i) {
        PoolVerifierConfig pc;
        pc.key_seed = key_seed_by_pk_[pool_keys_[i]];
        pc.input_spec = config_.input;
        pc.colluding = false;
        pool_.push_back(std::make_unique<PoolVerifierActor>(std::move(pc)));
        actor_id_by_pk_[pool_keys_[i]] = kPoolBase + static_cast<int>(i);
    }

    // Fund and register everyone at the settlement entity.
    ledger_.fund(outsourcer_keys.public_key(), config_.initial_balance);
    ledger_.fund(contractor_keys.public_key(), config_.initial_balance);
    for (const PublicKey& pk : pool_keys_) ledger_.fund(pk, config_.initial_balance);
    for (const PublicKey& pk : pool_keys_) ledger_.register_verifier(pk, true);
    initial_total_ = ledger_.total_currency();
}

Strategy ScenarioRunner::outsourcer_strategy() const {
    switch (config_.threat) {
        case ThreatId::T3: return Strategy::split_input();
        case ThreatId::T5: return Strategy::payment_refuser();
        case ThreatId::T6:
            if (config_.t6_hand_picked)
                return Strategy::colluder(pool_keys_.front(), true);
            return Strategy::honest();
        default: return Strategy::honest();
    }
}

Strategy ScenarioRunner::contractor_strategy() const {
    switch (config_.threat) {
        case ThreatId::T1: return Strategy::cheat_rate(config_.cheat_rate);
        case ThreatId::T4: return Strategy::cheat_rate(1.0);
        case ThreatId::T7: return Strategy::colluder(pool_keys_.front(), false);
        case ThreatId::T8:
            if (!config_.t8_drop_flavor)
                return Strategy::slow_responder(config_.slow_delay_ticks);
            return Strategy::honest();
        default: return Strategy::honest();
    }
}

Strategy ScenarioRunner::verifier_strategy() const {
    switch (config_.threat) {
        case ThreatId::T2: return Strategy::cheat_rate(1.0);
        case ThreatId::T6: return Strategy::colluder(outsourcer_->public_key(), true);
        case ThreatId::T7: return Strategy::colluder(contractor_->public_key(), false);
        default: return Strategy::honest();
    }
}

ContestBehavior ScenarioRunner::contractor_contest_behavior() const {
    switch (config_.threat) {
        case ThreatId::T1: return ContestBehavior::GiveUp;  // guilty
        case ThreatId::T4: return ContestBehavior::Forge;
        default: return ContestBehavior::ContestWhenAccused;
    }
}

ContestBehavior ScenarioRunner::verifier_contest_behavior() const {
    switch (config_.threat) {
        case ThreatId::T2:
        case ThreatId::T6: return ContestBehavior::GiveUp;  // guilty
        default: return ContestBehavior::ContestWhenAccused;
    }
}

void ScenarioRunner::make_verifier_actor(const Contract& contract) {
    if (verifier_) return;
    auto seed_it = key_seed_by_pk_.find(contract.worker_pk);
    if (seed_it == key_seed_by_pk_.end())
        throw std::logic_error("selected verifier has no known key seed");
    WorkerConfig wc;
    wc.key_seed = seed_it->second;
    wc.contract = contract;
    wc.input_spec = config_.input;
    wc.strategy = verifier_strategy();
    wc.contest_behavior = verifier_contest_behavior();
    wc.batching = false;
    wc.rng_seed = verifier_rng_seed_;
    verifier_ = std::make_unique<WorkerActor>(std::move(wc));
    actor_id_by_pk_[contract.worker_pk] = kVerifierId;
}

void ScenarioRunner::post(std::uint64_t time, int target, RunnerEvent event) {
    queue_.push(Queued{time, seq_++, target, std::move(event)});
}

int ScenarioRunner::actor_id_of(const PublicKey& pk) const {
    auto it = actor_id_by_pk_.find(pk);
    if (it == actor_id_by_pk_.end()) throw std::logic_error("unknown peer key");
    return it->second;
}

SplitMix64& ScenarioRunner::link_rng(int from, int to) {
    auto key = std::make_pair(from, to);
    auto it = link_rngs_.find(key);
    if (it == link_rngs_.end()) {
        std::uint64_t seed = config_.seed ^ (0x9e3779b97f4a7c15ULL * (from * 64 + to + 1));
        it = link_rngs_.emplace(key, SplitMix64(seed)).first;
    }
    return it->second;
}

void ScenarioRunner::deliver_wire(int from, int to, std::uint64_t now,
                                  std::uint64_t extra_delay, Bytes bytes) {
    SplitMix64& rng = link_rng(from, to);
    bool response_link = (from == kContractorId || from == kVerifierId) && to == kOutsourcerId;
    if (response_link && config_.network.drop_response_rate > 0 &&
        rng.chance(config_.network.drop_response_rate)) {
        ++dropped_;
        return;
    }

    std::uint8_t tag = bytes.empty() ? 0 : bytes.front();
    bool tamper_applies = false;
    if (config_.network.tamper == NetworkModel::Tamper::ResponsePayload)
        tamper_applies = response_link &&
                         (tag == static_cast<std::uint8_t>(MsgTag::SignedResponse) ||
                          tag == static_cast<std::uint8_t>(MsgTag::BatchedResponse));
    if (config_.network.tamper == NetworkModel::Tamper::InputPayload)
        tamper_applies = from == kOutsourcerId &&
                         tag == static_cast<std::uint8_t>(MsgTag::SignedInput);
    if (tamper_applies && tamper_rng_.chance(config_.network.tamper_rate)) {
        std::size_t offset = payload_offset_for(tag);
        if (offset >= 4 && bytes.size() > offset) {
            std::uint32_t len = read_u32_at(bytes, offset - 4);
            if (len > 0 && offset + len <= bytes.size()) {
                std::size_t at = offset + tamper_rng_.below(len);
                bytes[at] ^= static_cast<std::uint8_t>(1 + tamper_rng_.below(255));
                ++tampered_delivered_;
            }
        }
    }

    // metrics
    ++messages_;
    wire_bytes_ += bytes.size();
    messages_by_type_[tag_name(static_cast<MsgTag>(tag))] += 1;
    std::size_t overhead = overhead_for_tag(tag);
    max_overhead_ = std::max<std::uint64_t>(max_overhead_, overhead);
    std::size_t payload_at = payload_offset_for(tag);
    if (payload_at >= 4 && bytes.size() >= payload_at)
        payload_bytes_ += read_u32_at(bytes, payload_at - 4);
    if (tag == static_cast<std::uint8_t>(MsgTag::SignedInput)) {
        ++signed_inputs_;
        if (signed_inputs_ == 1) {
            signed_input_overhead_min_ = overhead;
            signed_input_overhead_max_ = overhead;
        } else {
            signed_input_overhead_min_ = std::min<std::uint64_t>(signed_input_overhead_min_,
                                                                 overhead);
            signed_input_overhead_max_ = std::max<std::uint64_t>(signed_input_overhead_max_,
                                                                 overhead);
        }
    }

    std::uint64_t latency =
        rng.range(config_.network.latency_min, config_.network.latency_max);
    std::uint64_t at = now + extra_delay + latency;
    auto key = std::make_pair(from, to);
    auto last = link_last_delivery_.find(key);
    if (last != link_last_delivery_.end()) at = std::max(at, last->second);  // FIFO per link
    link_last_delivery_[key] = at;
    post(at, to, ActorEvent{WireDelivery{std::move(bytes)}});
}

void ScenarioRunner::route(int from, std::uint64_t now, std::vector<Outbound> outs) {
    for (Outbound& out : outs) {
        int to;
        switch (out.dest) {
            case Outbound::Dest::Contractor: to = kContractorId; break;
            case Outbound::Dest::Verifier: to = kVerifierId; break;
            case Outbound::Dest::Outsourcer: to = kOutsourcerId; break;
            case Outbound::Dest::Settlement: to = kSettlementId; break;
            case Outbound::Dest::Peer: to = actor_id_of(out.peer); break;
            default: continue;
        }
        if (Bytes* bytes = std::get_if<Bytes>(&out.body)) {
            if (to == kVerifierId && !verifier_) continue;  // nobody selected yet
            deliver_wire(from, to, now, out.delay, std::move(*bytes));
        } else if (SettlementRequest* req = std::get_if<SettlementRequest>(&out.body)) {
            post(now + out.delay + kSettlementLatency, kSettlementId, std::move(*req));
        } else if (ContestAsk* ask = std::get_if<ContestAsk>(&out.body)) {
            SplitMix64& rng = link_rng(from, to);
            std::uint64_t latency =
                rng.range(config_.network.latency_min, config_.network.latency_max);
            post(now + out.delay + latency, to, ActorEvent{std::move(*ask)});
        } else if (ContestAnswer* answer = std::get_if<ContestAnswer>(&out.body)) {
            SplitMix64& rng = link_rng(from, to);
            std::uint64_t latency =
                rng.range(config_.network.latency_min, config_.network.latency_max);
            post(now + out.delay + latency, to, ActorEvent{std::move(*answer)});
        }
    }
}

void ScenarioRunner::emit_note(std::uint64_t now, const PublicKey& to, SettlementNote note) {
    auto it = actor_id_by_pk_.find(to);
    if (it == actor_id_by_pk_.end()) return;
    post(now + kSettlementLatency, it->second, ActorEvent{std::move(note)});
}

void ScenarioRunner::emit_closures(std::uint64_t now) {
    for (std::uint64_t id : ledger_.case_ids()) {
        const CaseRecord* rec = ledger_.find_case(id);
        if (rec->phase != CasePhase::Closed || closures_emitted_.count(id)) continue;
        closures_emitted_.insert(id);
        CaseClosedNote note{id, *rec->convicted, rec->party_key(*rec->convicted),
                            rec->resolution};
        emit_note(now, rec->outsourcer, note);
        emit_note(now, rec->contractor, note);
        emit_note(now, rec->verifier, note);
    }
}

void ScenarioRunner::process_settlement(const SettlementRequest& request, std::uint64_t now) {
    ledger_.advance_to(now);
    if (const auto* reg = std::get_if<RegisterVerifierReq>(&request)) {
        ledger_.register_verifier(reg->pk, reg->attestation);
    } else if (const auto* open = std::get_if<OpenContractReq>(&request)) {
        OpenContractResult result = ledger_.open_contract(open->contract,
                                                          open->outsourcer_deposit);
        if (result.ok && open->contract.role == Role::Verifier)
            make_verifier_actor(open->contract);
    } else if (const auto* redeem = std::get_if<RedeemReq>(&request)) {
        RedeemResult result = ledger_.redeem(redeem->final_input, redeem->contract, now);
        if (!result.ok) ++redeem_rejections_;
    } else if (const auto* accuse = std::get_if<AccuseReq>(&request)) {
        AccuseResult result = ledger_.accuse(accuse->accusation, now);
        if (result.ok) {
            ++accusations_;
            const CaseRecord* rec = ledger_.find_case(result.case_id);
            if (!result.outsourcer_convicted && rec)
                emit_note(now, rec->contractor,
                          CaseOpenedNote{result.case_id, rec->contractor, rec->input_payload,
                                         rec->contractor_payload});
        }
    } else if (const auto* open_contest = std::get_if<OpenContestationReq>(&request)) {
        OpenContestationResult result = ledger_.open_contestation(
            open_contest->case_id, open_contest->requester, std::nullopt, now);
        if (result.needs_entry_proof) {
            parked_contest_requests_[open_contest->case_id] = open_contest->requester;
            emit_note(now, outsourcer_->public_key(),
                      EntryProofNeededNote{open_contest->case_id});
        } else if (result.ok && result.assigned) {
            ++contest_rounds_;
            const CaseRecord* rec = ledger_.find_case(open_contest->case_id);
            emit_note(now, open_contest->requester,
                      ContestAssignedNote{open_contest->case_id, result.assigned->first,
                                          result.assigned->second, rec->input_payload});
        }
    } else if (const auto* proof = std::get_if<ProvideEntryProofReq>(&request)) {
        auto parked = parked_contest_requests_.find(proof->case_id);
        if (parked != parked_contest_requests_.end()) {
            PublicKey requester = parked->second;
            parked_contest_requests_.erase(parked);
            OpenContestationResult result =
                ledger_.open_contestation(proof->case_id, requester, proof->proof, now);
            if (result.ok && result.assigned) {
                ++contest_rounds_;
                const CaseRecord* rec = ledger_.find_case(proof->case_id);
                emit_note(now, requester,
                          ContestAssignedNote{proof->case_id, result.assigned->first,
                                              result.assigned->second, rec->input_payload});
            }
        }
    } else if (const auto* submit = std::get_if<SubmitContestReq>(&request)) {
        SubmitContestResult result =
            ledger_.submit_contest(submit->case_id, submit->requester, submit->submission,
                                   now);
        if (result.ok && result.flipped) {
            const CaseRecord* rec = ledger_.find_case(submit->case_id);
            const Bytes& payload = result.accused_now == PartyKind::Contractor
                                       ? rec->contractor_payload
                                       : rec->verifier_payload;
            emit_note(now, rec->party_key(result.accused_now),
                      CaseOpenedNote{submit->case_id, rec->party_key(result.accused_now),
                                     rec->input_payload, payload});
        } else if (result.ok && !result.flipped) {
            emit_note(now, submit->requester,
                      ContestFailedNote{submit->case_id, result.reason});
        } else {
            ++contest_rejections_;
            emit_note(now, submit->requester,
                      ContestFailedNote{submit->case_id, result.reason});
        }
    } else if (const auto* review = std::get_if<SubmitReviewReq>(&request)) {
        ledger_.submit_review(review->review);
    }
    emit_closures(now);
}

void ScenarioRunner::dispatch(const Queued& item) {
    now_ = item.time;
    if (item.target == kSettlementId) {
        process_settlement(std::get<SettlementRequest>(item.event), item.time);
        return;
    }
    const ActorEvent& event = std::get<ActorEvent>(item.event);
    std::vector<Outbound> outs;
    switch (item.target) {
        case kOutsourcerId: outs = outsourcer_->handle(item.time, event); break;
        case kContractorId: outs = contractor_->handle(item.time, event); break;
        case kVerifierId:
            if (verifier_) outs = verifier_->handle(item.time, event);
            break;
        default: {
            std::size_t index = static_cast<std::size_t>(item.target - kPoolBase);
            if (index < pool_.size()) outs = pool_[index]->handle(item.time, event);
            break;
        }
    }
    route(item.target, item.time, std::move(outs));
}

void ScenarioRunner::drain() {
    while (!queue_.empty()) {
        Queued item = queue_.top();
        queue_.pop();
        dispatch(item);
    }
}

ScenarioReport ScenarioRunner::run() {
    route(kOutsourcerId, 0, outsourcer_->begin(0));
    for (std::uint32_t k = 0; k < config_.total_inputs; ++k)
        post(kFirstInputTick + k, kOutsourcerId, ActorEvent{InputTick{}});
    std::uint64_t horizon = kFirstInputTick + config_.total_inputs +
                            2 * config_.qos.timeout + 2 * config_.slow_delay_ticks + 50;
    for (std::uint64_t t = kFirstInputTick; t <= horizon; t += kQosSweepPeriod)
        post(t, kOutsourcerId, ActorEvent{QosSweep{}});
    drain();

    post(now_ + 1, kOutsourcerId, ActorEvent{FinishNotice{}});
    drain();

    // Let contestation rounds and deadlines play out.
    for (int guard = 0;; ++guard) {
        if (guard > 1000) throw std::logic_error("settlement resolution did not converge");
        auto wake = ledger_.next_wakeup();
        if (!wake) break;
        std::uint64_t t = std::max(*wake, now_ + 1);
        now_ = t;
        ledger_.advance_to(t);
        emit_closures(t);
        drain();
    }

    post(now_ + 1, kOutsourcerId, ActorEvent{ReviewPhase{}});
    post(now_ + 1, kContractorId, ActorEvent{ReviewPhase{}});
    if (verifier_) post(now_ + 1, kVerifierId, ActorEvent{ReviewPhase{}});
    drain();
    ledger_.settle_abandoned(now_);

    ScenarioReport report;
    assess(report);
    return report;
}

void ScenarioRunner::assess(ScenarioReport& report) const {
    report.name = config_.name;
    report.threat = config_.threat;
    report.seed = config_.seed;

    const PublicKey& o_pk = outsourcer_->public_key();
    const PublicKey& c_pk = contractor_->public_key();
    std::optional<PublicKey> v_pk;
    if (verifier_) v_pk = verifier_->public_key();

    for (const Conviction& conviction : ledger_.convictions())
        report.convicted.push_back(party_name(conviction.kind));
    report.accusations = accusations_;
    report.cases_opened = accusations_;
    report.contest_rounds = contest_rounds_;

    // Scripted deviators per threat; convicting anyone else is a false
    // conviction.
    std::set<PartyKind> deviators;
    switch (config_.threat) {
        case ThreatId::T1:
        case ThreatId::T4: deviators = {PartyKind::Contractor}; break;
        case ThreatId::T2: deviators = {PartyKind::Verifier}; break;
        case ThreatId::T3:
        case ThreatId::T5: deviators = {PartyKind::Outsourcer}; break;
        case ThreatId::T6: deviators = {PartyKind::Outsourcer, PartyKind::Verifier}; break;
        case ThreatId::T7: deviators = {PartyKind::Contractor, PartyKind::Verifier}; break;
        case ThreatId::T8: deviators = {PartyKind::Contractor}; break;
        default: break;
    }
    for (const Conviction& conviction : ledger_.convictions())
        if (!deviators.count(conviction.kind)) report.false_convictions += 1;

    report.conservation_ok = ledger_.total_currency() == initial_total_;
    report.contractor_paid = ledger_.paid_out_to(c_pk);
    if (v_pk) report.verifier_paid = ledger_.paid_out_to(*v_pk);
    report.outsourcer_balance_delta = ledger_.balance_of(o_pk) - config_.initial_balance;
    report.contractor_balance_delta = ledger_.balance_of(c_pk) - config_.initial_balance;
    if (v_pk)
        report.verifier_balance_delta = ledger_.balance_of(*v_pk) - config_.initial_balance;

    report.messages = messages_;
    report.wire_bytes = wire_bytes_;
    report.payload_bytes = payload_bytes_;
    report.messages_by_type = messages_by_type_;
    report.signed_inputs = signed_inputs_;
    report.signed_input_overhead_min = signed_input_overhead_min_;
    report.signed_input_overhead_max = signed_input_overhead_max_;
    report.max_overhead_any_message = max_overhead_;

    report.qos_violations = outsourcer_->qos_events().size();
    for (const auto& [kind, why] : outsourcer_->qos_events())
        report.qos_kinds.push_back(qos_violation_name(kind));
    report.tampered_delivered = tampered_delivered_;
    report.tamper_rejections = outsourcer_->tamper_rejections() +
                               contractor_->tamper_rejections() +
                               (verifier_ ? verifier_->tamper_rejections() : 0);
    for (const ActorLogEntry& entry : outsourcer_->log())
        if (entry.kind == "batched_tamper_detected") report.batched_tamper_detections += 1;
    report.dropped_messages = dropped_;
    report.collusion_activated = (contractor_->collusion_activated()) ||
                                 (verifier_ && verifier_->collusion_activated());
    report.honesty_dominant = is_honesty_dominant(payoff_matrix(
        static_cast<double>(config_.reward_per_input),
        CostModel{config_.honest_cost, config_.dishonest_cost, config_.q},
        static_cast<double>(config_.fee), static_cast<double>(config_.bounty)));

    report.contractor_reputation = ledger_.reputation(c_pk);
    if (v_pk) report.verifier_reputation = ledger_.reputation(*v_pk);
    report.contractor_reviews = ledger_.review_count(c_pk);

    report.detection_latency =
        outsourcer_->has_accused()
            ? outsourcer_->first_accusation_at() - outsourcer_->first_cheat_seen_at()
            : 0;

    auto convicted_kind = [&](PartyKind kind) {
        for (const Conviction& conviction : ledger_.convictions())
            if (conviction.kind == kind) return true;
        return false;
    };

    switch (config_.threat) {
        case ThreatId::Honest:
            report.detected = false;
            report.mechanism = "none";
            break;
        case ThreatId::T1:
            report.detected = outsourcer_->has_accused() &&
                              convicted_kind(PartyKind::Contractor);
            report.mechanism = "sampling-based re-execution";
            break;
        case ThreatId::T2:
            report.detected = convicted_kind(PartyKind::Verifier) &&
                              !convicted_kind(PartyKind::Contractor) &&
                              !ledger_.was_fined(c_pk);
            report.mechanism = "contestation";
            break;
        case ThreatId::T3:
            report.detected = convicted_kind(PartyKind::Outsourcer);
            report.mechanism = "signature chain";
            break;
        case ThreatId::T4:
            report.detected = convicted_kind(PartyKind::Contractor) &&
                              redeem_rejections_ >= 1 && contest_rejections_ >= 1;
            report.mechanism = "digital signatures";
            break;
        case ThreatId::T5: {
            Currency expected =
                config_.reward_per_input *
                static_cast<Currency>(contractor_->last_promised_ack());
            report.detected = expected > 0 && report.contractor_paid == expected &&
                              ledger_.convictions().empty();
            report.mechanism = "settlement pays from deposit";
            break;
        }
        case ThreatId::T6:
            report.detected = !convicted_kind(PartyKind::Contractor) &&
                              !ledger_.was_fined(c_pk) &&
                              (convicted_kind(PartyKind::Verifier) ||
                               convicted_kind(PartyKind::Outsourcer));
            report.mechanism = config_.t6_hand_picked
                                   ? "randomization proof at contestation entry"
                                   : "contestation";
            break;
        case ThreatId::T7:
            report.prevented = !report.collusion_activated && accusations_ == 0 &&
                               ledger_.convictions().empty() && report.honesty_dominant;
            report.detected = report.prevented;
            report.mechanism = "randomization + incentives";
            break;
        case ThreatId::T8:
            report.detected = report.qos_violations >= 1 &&
                              report.contractor_reputation < 1.0 &&
                              report.contractor_reviews >= 1 &&
                              ledger_.convictions().empty() && !ledger_.was_fined(c_pk);
            report.mechanism = "blacklist + review + abortion";
            break;
        case ThreatId::T9:
            report.detected = tampered_delivered_ >= 1 && report.tamper_rejections >= 1 &&
                              ledger_.convictions().empty();
            report.mechanism = "digital signatures";
            break;
    }
    report.ledger_snapshot = ledger_.snapshot();
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& config) {
    config.validate();
    ScenarioRunner runner(config);
    return runner.run();
}

// ---------------------------------------------------------------------------
// Threat suite
// ---------------------------------------------------------------------------

ScenarioConfig scenario_for_threat(ThreatId threat, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.threat = threat;
    cfg.seed = seed;
    cfg.name = threat_name(threat);
    cfg.input.kind = InputSpec::Kind::Identity;
    cfg.input.input_bytes = 8;
    cfg.reward_per_input = 2;
    cfg.fee = 10;
    cfg.bounty = 4;
    cfg.worker_deposit = 60;
    cfg.outsourcer_deposit = 60;
    cfg.initial_balance = 10000;
    cfg.honest_cost = 1.0;
    cfg.dishonest_cost = 0.25;
    cfg.q = 0.5;
    cfg.qos.max_response_time = 50;
    cfg.qos.min_response_rate_ppm = 500000;
    cfg.qos.timeout = 100;
    cfg.deadline_ticks = 100;
    cfg.pool_size = 5;
    cfg.total_inputs = 40;
    cfg.interval_size = 8;

    switch (threat) {
        case ThreatId::Honest:
            cfg.total_inputs = 100;
            cfg.interval_size = 10;
            break;
        case ThreatId::T1:
            cfg.cheat_rate = 0.1;
            cfg.interval_size = 2;
            cfg.total_inputs = 88;  // 44 intervals
            break;
        case ThreatId::T2: break;
        case ThreatId::T3:
            cfg.total_inputs = 24;
            break;
        case ThreatId::T4: break;
        case ThreatId::T5:
            cfg.total_inputs = 30;
            break;
        case ThreatId::T6: break;
        case ThreatId::T7:
            cfg.total_inputs = 30;
            break;
        case ThreatId::T8:
            // Between max_response_time and timeout: responses arrive but
            // breach the per-response limit.
            cfg.slow_delay_ticks = 60;
            cfg.total_inputs = 30;
            break;
        case ThreatId::T9:
            cfg.network = inject_tamper(cfg.network, NetworkModel::Tamper::ResponsePayload,
                                        1.0);
            cfg.total_inputs = 30;
            break;
    }
    if (threat == ThreatId::T8 && cfg.t8_drop_flavor)
        cfg.network = inject_drop(cfg.network, 0.7);
    return cfg;
}

std::string ThreatSuiteRow::to_record() const {
    std::ostringstream out;
    out << "threat=" << threat_name(threat) << " runs=" << runs << " rate=";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", rate);
    out << buf;
    if (threat == ThreatId::T1) {
        std::snprintf(buf, sizeof buf, "%.4f", analytic);
        out << " analytic=" << buf;
        std::snprintf(buf, sizeof buf, "%.4f", fast_trial_rate);
        out << " fast_trials=" << buf;
    }
    if (threat == ThreatId::T7) out << " honesty_dominant=" << (honesty_dominant ? 1 : 0);
    out << " false_convictions=" << false_convictions
        << " conserved=" << (all_conserved ? 1 : 0)
        << " signed_input_overhead=" << min_signed_input_overhead << ".."
        << max_signed_input_overhead << " techniques=\"" << techniques << "\"";
    return out.str();
}

std::vector<ThreatSuiteRow> run_threat_suite(const ThreatSuiteConfig& config) {
    std::vector<ThreatSuiteRow> rows;
    const ThreatId threats[] = {ThreatId::T1, ThreatId::T2, ThreatId::T3,
                                ThreatId::T4, ThreatId::T5, ThreatId::T6,
                                ThreatId::T7, ThreatId::T8, ThreatId::T9};
    static_assert(std::size(threats) == 9, "one scenario family per threat row");

    for (ThreatId threat : threats) {
        ThreatSuiteRow row;
        row.threat = threat;
        row.description = threat_description(threat);
        row.techniques = threat_techniques(threat);
        row.all_conserved = true;

        std::uint32_t reps = config.repetitions;
        if (threat == ThreatId::T1 && config.t1_repetitions > 0)
            reps = config.t1_repetitions;
        SplitMix64 seeder(config.seed ^ (0x1000 + static_cast<std::uint64_t>(threat)));
        double latency_sum = 0;
        std::uint64_t latency_count = 0;

        for (std::uint32_t rep = 0; rep < reps; ++rep) {
            ScenarioConfig cfg = scenario_for_threat(threat, seeder.next());
            if (threat == ThreatId::T1) {
                cfg.cheat_rate = config.t1_cheat_rate;
                cfg.total_inputs = config.t1_intervals * cfg.interval_size;
            }
            if (threat == ThreatId::T6) cfg.t6_hand_picked = rep % 10 < 3;
            if (threat == ThreatId::T8) {
                cfg.t8_drop_flavor = rep % 2 == 1;
                if (cfg.t8_drop_flavor) cfg.network = inject_drop(cfg.network, 0.7);
            }
            cfg.name = std::string(threat_name(threat)) + "#" + std::to_string(rep);
            ScenarioReport report = run_scenario(cfg);

            bool succeeded = threat == ThreatId::T7 ? report.prevented : report.detected;
            row.runs += 1;
            row.succeeded += succeeded;
            row.false_convictions += report.false_convictions;
            row.all_conserved = row.all_conserved && report.conservation_ok;
            row.honesty_dominant = report.honesty_dominant;
            if (report.signed_inputs > 0) {
                if (row.max_signed_input_overhead == 0) {
                    row.min_signed_input_overhead = report.signed_input_overhead_min;
                    row.max_signed_input_overhead = report.signed_input_overhead_max;
                } else {
                    row.min_signed_input_overhead = std::min(
                        row.min_signed_input_overhead, report.signed_input_overhead_min);
                    row.max_signed_input_overhead = std::max(
                        row.max_signed_input_overhead, report.signed_input_overhead_max);
                }
            }
            if (report.detected && report.detection_latency > 0) {
                latency_sum += static_cast<double>(report.detection_latency);
                latency_count += 1;
            }
        }
        row.rate = row.runs == 0 ? 0.0
                                 : static_cast<double>(row.succeeded) /
                                       static_cast<double>(row.runs);
        row.mean_detection_latency =
            latency_count == 0 ? 0.0 : latency_sum / static_cast<double>(latency_count);

        if (threat == ThreatId::T1) {
            row.analytic = detection_probability(config.t1_cheat_rate, config.t1_intervals);
            InputSpec spec;
            spec.kind = InputSpec::Kind::Identity;
            spec.input_bytes = 4;
            DetectionTrialStats trials = run_detection_trials(
                config.seed ^ 0xfa57, config.t1_trials, config.t1_cheat_rate,
                config.t1_intervals, 200, spec);
            row.fast_trial_rate = trials.rate;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Exhaustive contestation soundness exploration
// ---------------------------------------------------------------------------

namespace {

struct ExplorationFixture {
    KeyPair outsourcer;
    KeyPair contractor;
    KeyPair verifier;
    std::vector<KeyPair> pool;
    Contract contractor_contract;
    Contract verifier_contract;
    Bytes input_payload;
    Bytes honest_payload;
    Bytes false_payload;
    EntryProof entry_proof;
    LedgerParams params;
};

void explore(Ledger ledger, std::uint64_t case_id, std::uint64_t now,
             const ExplorationFixture& fx, bool false_is_verifier,
             ContestationExplorationResult& result) {
    const CaseRecord* rec = ledger.find_case(case_id);
    if (rec->phase == CasePhase::Closed) {
        result.branches += 1;
        PartyKind false_party =
            false_is_verifier ? PartyKind::Verifier : PartyKind::Contractor;
        if (*rec->convicted == false_party)
            result.convicted_false_responder += 1;
        else
            result.convicted_other += 1;
        return;
    }

    PartyKind accused = rec->accused;
    bool accused_is_false =
        (accused == PartyKind::Verifier) == false_is_verifier &&
        accused != PartyKind::Outsourcer;
    const PublicKey requester = rec->party_key(accused);

    // A guilty accused may simply give up and be convicted at the deadline.
    if (accused_is_false) {
        Ledger give_up = ledger;
        give_up.advance_to(give_up.find_case(case_id)->deadline);
        explore(std::move(give_up), case_id, now + 1, fx, false_is_verifier, result);
    }

    // Candidates the TTP could assign next.
    std::vector<PublicKey> candidates;
    for (const KeyPair& kp : fx.pool) {
        const PublicKey pk = kp.public_key();
        if (pk == rec->contractor || pk == rec->verifier || pk == rec->outsourcer) continue;
        if (std::find(rec->consulted.begin(), rec->consulted.end(), pk) !=
            rec->consulted.end())
            continue;
        candidates.push_back(pk);
    }

    auto proof_for_round = [&](const CaseRecord* record) -> std::optional<EntryProof> {
        return record->round == 0 && !record->entry_proof_checked
                   ? std::optional<EntryProof>(fx.entry_proof)
                   : std::nullopt;
    };

    if (candidates.size() < 2) {
        Ledger exhausted = ledger;
        exhausted.open_contestation(case_id, requester, proof_for_round(rec), now);
        explore(std::move(exhausted), case_id, now + 1, fx, false_is_verifier, result);
        return;
    }

    Digest32 input_digest = sha256(fx.input_payload);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        for (std::size_t j = i + 1; j < candidates.size(); ++j) {
            Ledger branch = ledger;
            OpenContestationResult opened = branch.open_contestation(
                case_id, requester, proof_for_round(branch.find_case(case_id)), now,
                std::make_pair(candidates[i], candidates[j]));
            if (!opened.ok) throw std::logic_error("exploration: open failed " + opened.reason);
            if (opened.closed) {
                explore(std::move(branch), case_id, now + 1, fx, false_is_verifier, result);
                continue;
            }
            // Honest pool members re-execute and return the honest payload.
            ContestSubmission submission;
            ContestResponseRecord* records[2] = {&submission.first, &submission.second};
            const PublicKey assigned[2] = {opened.assigned->first, opened.assigned->second};
            for (int k = 0; k < 2; ++k) {
                const KeyPair* keys = nullptr;
                for (const KeyPair& kp : fx.pool)
                    if (kp.public_key() == assigned[k]) keys = &kp;
                records[k]->verifier = assigned[k];
                records[k]->payload = fx.honest_payload;
                records[k]->sig = keys->sign(
                    contest_response_preimage(input_digest, records[k]->payload));
            }
            SubmitContestResult submitted =
                branch.submit_contest(case_id, requester, submission, now + 1);
            if (!submitted.ok)
                throw std::logic_error("exploration: submit failed " + submitted.reason);
            explore(std::move(branch), case_id, now + 2, fx, false_is_verifier, result);
        }
    }
}

}  // namespace

ContestationExplorationResult explore_contestation(std::size_t pool_size,
                                                   bool false_responder_is_verifier,
                                                   std::uint64_t seed) {
    SplitMix64 rng(seed);
    ExplorationFixture fx;
    fx.outsourcer = KeyPair::from_seed(rng.bytes(32));
    fx.contractor = KeyPair::from_seed(rng.bytes(32));
    ComputeFunction fn = identity_function();

    // `pool_size` registered verifiers, one of which is the disputant.
    std::vector<KeyPair> registered;
    for (std::size_t i = 0; i < pool_size; ++i)
        registered.push_back(KeyPair::from_seed(rng.bytes(32)));
    fx.verifier = registered.front();
    fx.pool.assign(registered.begin() + 1, registered.end());

    std::vector<PublicKey> verifier_list;
    for (const KeyPair& kp : registered) verifier_list.push_back(kp.public_key());
    std::sort(verifier_list.begin(), verifier_list.end());

    fx.params = LedgerParams{100, 0.9, 1};
    Ledger ledger(rng.next(), fx.params);
    for (const KeyPair& kp : registered) {
        ledger.fund(kp.public_key(), 1000);
        ledger.register_verifier(kp.public_key(), true);
    }
    ledger.fund(fx.outsourcer.public_key(), 1000);
    ledger.fund(fx.contractor.public_key(), 1000);

    fx.contractor_contract.contract_id = Digest32::from_bytes(rng.bytes(32));
    fx.contractor_contract.outsourcer_pk = fx.outsourcer.public_key();
    fx.contractor_contract.worker_pk = fx.contractor.public_key();
    fx.contractor_contract.role = Role::Contractor;
    fx.contractor_contract.reward_per_input = 1;
    fx.contractor_contract.fee = 10;
    fx.contractor_contract.bounty = 4;
    fx.contractor_contract.deposit = 40;
    fx.contractor_contract.function_id = fn.function_id;
    fx.verifier_contract = fx.contractor_contract;
    fx.verifier_contract.contract_id = Digest32::from_bytes(rng.bytes(32));
    fx.verifier_contract.role = Role::Verifier;
    fx.verifier_contract.worker_pk = fx.verifier.public_key();
    ledger.open_contract(fx.contractor_contract, 40);
    ledger.open_contract(fx.verifier_contract, 40);

    // Randomization transcript whose selection lands on the disputant
    // verifier (retry x until the modular sum hits its index).
    std::size_t verifier_index = 0;
    for (std::size_t i = 0; i < verifier_list.size(); ++i)
        if (verifier_list[i] == fx.verifier.public_key()) verifier_index = i;
    std::array<std::uint8_t, 32> x{}, y{};
    for (;;) {
        x = random_value(rng);
        y = random_value(rng);
        if (select_verifier(x, y, verifier_list).first == verifier_index) break;
    }
    OutsourcerCommit oc =
        outsourcer_commit(x, contract_hash(fx.contractor_contract), fx.outsourcer);
    ContractorCommit cc =
        contractor_commit(oc, y, verifier_list, fx.contractor, fx.outsourcer.public_key());
    fx.entry_proof = EntryProof{oc, cc, x};

    // The disputed input and the two responses.
    fx.input_payload = rng.bytes(8);
    fx.honest_payload = fn.evaluate(fx.input_payload);
    fx.false_payload = wrong_answer(fn, fx.input_payload);

    SignedInput input;
    input.contract_ref = contract_hash(fx.contractor_contract);
    input.input_index = 3;
    input.ack_count = 3;
    input.interval_id = 0;
    input.payload = fx.input_payload;
    input.sig = fx.outsourcer.sign(input_sig_preimage(input));

    auto response_from = [&](const KeyPair& keys, const Contract& contract,
                             const Bytes& payload) {
        SignedResponse resp;
        resp.contract_ref = contract_hash(contract);
        resp.input_index = input.input_index;
        resp.payload = payload;
        resp.input_sig = input.sig;
        resp.sig = keys.sign(response_sig_preimage(resp));
        return resp;
    };

    Accusation accusation;
    accusation.signed_input = input;
    accusation.contractor_evidence =
        response_from(fx.contractor, fx.contractor_contract,
                      false_responder_is_verifier ? fx.honest_payload : fx.false_payload);
    accusation.verifier_response =
        response_from(fx.verifier, fx.verifier_contract,
                      false_responder_is_verifier ? fx.false_payload : fx.honest_payload);
    accusation.contractor_contract = fx.contractor_contract;
    accusation.verifier_contract = fx.verifier_contract;

    AccuseResult accused = ledger.accuse(accusation, 10);
    if (!accused.ok) throw std::logic_error("exploration: accuse failed " + accused.reason);

    ContestationExplorationResult result;
    explore(std::move(ledger), accused.case_id, 11, fx, false_responder_is_verifier, result);
    return result;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

std::string ScenarioReport::to_record() const {
    std::ostringstream out;
    out << "name=" << name << " threat=" << threat_name(threat) << " seed=" << seed
        << " detected=" << (detected ? 1 : 0) << " prevented=" << (prevented ? 1 : 0)
        << " mechanism=\"" << mechanism << "\"";
    out << " convicted=";
    if (convicted.empty())
        out << "none";
    else
        for (std::size_t i = 0; i < convicted.size(); ++i)
            out << (i ? "," : "") << convicted[i];
    out << " false_convictions=" << false_convictions << " accusations=" << accusations
        << " contest_rounds=" << contest_rounds
        << " conserved=" << (conservation_ok ? 1 : 0) << " messages=" << messages
        << " wire_bytes=" << wire_bytes << " signed_inputs=" << signed_inputs
        << " signed_input_overhead=" << signed_input_overhead_min << ".."
        << signed_input_overhead_max << " max_overhead=" << max_overhead_any_message
        << " detection_latency=" << detection_latency << " qos_violations=" << qos_violations
        << " tampered=" << tampered_delivered << " tamper_rejections=" << tamper_rejections
        << " dropped=" << dropped_messages
        << " collusion_activated=" << (collusion_activated ? 1 : 0)
        << " contractor_paid=" << contractor_paid << " verifier_paid=" << verifier_paid;
    return out.str();
}

}  // namespace verimark
