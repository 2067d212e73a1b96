#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "verimark/contract.hpp"
#include "verimark/crypto.hpp"
#include "verimark/randomization.hpp"
#include "verimark/rng.hpp"
#include "verimark/settlement.hpp"
#include "verimark/wire.hpp"

namespace verimark {

// ---------------------------------------------------------------------------
// Compute functions
// ---------------------------------------------------------------------------

/// Deterministic outsourced function. `evaluate` must be referentially
/// transparent: every actor computes the same output for the same input.
/// `cheap_answer` is the q-algorithm's output: a constant-shaped guess
/// that is correct only when the input happens to be trivial.
struct ComputeFunction {
    std::uint64_t function_id = 0;
    std::uint64_t cost_ticks = 1;
    std::string name;
    std::function<Bytes(ByteSpan)> evaluate;
    std::function<Bytes(ByteSpan)> cheap_answer;
};

ComputeFunction identity_function();
ComputeFunction iterated_hash_function(std::uint32_t iterations);
ComputeFunction grid_detector_function();

/// Deterministically wrong output for an input: the honest output with the
/// first byte flipped (or a single 0x01 byte when the honest output is
/// empty). Colluders producing "the agreed false response" use this rule.
Bytes wrong_answer(const ComputeFunction& fn, ByteSpan input);

/// Bounding box of a connected component, inclusive coordinates.
struct GridBox {
    std::uint32_t min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    auto operator<=>(const GridBox&) const = default;
};

Bytes encode_grid(std::uint32_t width, std::uint32_t height, ByteSpan cells);
Bytes encode_boxes(const std::vector<GridBox>& boxes);
std::vector<GridBox> detect_boxes(ByteSpan grid_input);

/// Scenario-level description of the workload; expands to a
/// ComputeFunction plus an input generator.
struct InputSpec {
    enum class Kind { Identity, IteratedHash, GridDetector };
    Kind kind = Kind::Identity;
    std::uint32_t input_bytes = 8;    // identity / iterated hash
    std::uint32_t iterations = 16;    // iterated hash
    std::uint32_t grid_width = 8;     // grid detector
    std::uint32_t grid_height = 8;
    double object_rate = 0.5;         // probability a grid contains objects
};

ComputeFunction make_function(const InputSpec& spec);
Bytes generate_input(const InputSpec& spec, SplitMix64& rng);

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// One secretly chosen offset per interval, drawn from the Outsourcer's
/// private seeded randomness.
struct SamplingSchedule {
    std::uint32_t total_inputs = 0;
    std::uint32_t interval_size = 1;
    std::vector<std::uint32_t> offsets;

    std::size_t interval_count() const { return offsets.size(); }
    std::uint32_t interval_of(std::uint32_t index) const { return index / interval_size; }
    bool is_sampled(std::uint32_t index) const;
    std::size_t sampled_count() const { return offsets.size(); }
};

SamplingSchedule sample_schedule(std::uint64_t rng_seed, std::uint32_t total_inputs,
                                 std::uint32_t interval_size);

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

enum class StrategyKind {
    Honest,
    CheatRate,       // wrong answer with probability `rate` per input
    QAlgorithm,      // always the cheap answer; correct with probability q
    Colluder,        // agreed false output, but only when the partner is known
    SplitInput,      // outsourcer sends different inputs to its two workers
    PaymentRefuser,  // outsourcer goes silent instead of settling
    SlowResponder,   // honest but delayed beyond the QoS threshold
};

const char* strategy_name(StrategyKind kind);

struct Strategy {
    StrategyKind kind = StrategyKind::Honest;
    double rate = 0.0;                // CheatRate
    double q = 0.0;                   // QAlgorithm
    PublicKey partner;                // Colluder
    bool knows_partner = false;       // planned collusion knows; ad-hoc does not
    std::uint64_t delay_ticks = 0;    // SlowResponder

    static Strategy honest() { return {}; }
    static Strategy cheat_rate(double rate);
    static Strategy q_algorithm(double q);
    static Strategy colluder(const PublicKey& partner, bool knows_partner);
    static Strategy split_input();
    static Strategy payment_refuser();
    static Strategy slow_responder(std::uint64_t delay_ticks);

    bool dishonest() const { return kind != StrategyKind::Honest; }
};

// ---------------------------------------------------------------------------
// QoS bookkeeping
// ---------------------------------------------------------------------------

enum class QosViolation { Timeout, LowResponseRate, HighResponseTime };

const char* qos_violation_name(QosViolation kind);

struct QosLedgerLocal {
    std::uint64_t responses_due = 0;       // inputs old enough that a reply was due
    std::uint64_t responses_received = 0;
    std::uint64_t worst_response_time = 0;
    std::uint64_t timed_out_inputs = 0;
    bool blacklisted = false;
};

struct QosResult {
    bool ok = true;
    QosViolation violation = QosViolation::Timeout;
};

QosResult qos_check(const QosLedgerLocal& ledger, const QosThresholds& thresholds);

// ---------------------------------------------------------------------------
// Response pairing
// ---------------------------------------------------------------------------

struct PendingPair {
    std::uint32_t input_index = 0;
    std::optional<SignedResponse> contractor_response;
    std::optional<SignedResponse> verifier_response;
};

enum class CompareOutcome { Incomplete, Equal, Mismatch };

/// Byte comparison of the two payloads. Throws std::logic_error when the
/// responses carry different input indices (a caller bug, not a protocol
/// outcome).
CompareOutcome compare_pair(const PendingPair& pair);

// ---------------------------------------------------------------------------
// Actor plumbing
// ---------------------------------------------------------------------------

struct ContestAsk {
    std::uint64_t case_id = 0;
    Bytes input_payload;
    PublicKey from;
};

struct ContestAnswer {
    std::uint64_t case_id = 0;
    ContestResponseRecord record;
};

struct InputTick {};
struct QosSweep {};
struct FinishNotice {};
struct ReviewPhase {};
struct WireDelivery {
    Bytes bytes;
};

using ActorEvent = std::variant<InputTick, QosSweep, FinishNotice, ReviewPhase, WireDelivery,
                                ContestAsk, ContestAnswer, SettlementNote>;

struct Outbound {
    enum class Dest { Contractor, Verifier, Outsourcer, Settlement, Peer };
    Dest dest = Dest::Settlement;
    PublicKey peer;  // set when dest == Peer
    std::uint64_t delay = 0;  // extra ticks before the message leaves (compute time)
    std::variant<Bytes, SettlementRequest, ContestAsk, ContestAnswer> body;
};

/// Events an actor wants the scenario report to know about.
struct ActorLogEntry {
    std::uint64_t at = 0;
    std::string kind;
    std::string detail;
};

// ---------------------------------------------------------------------------
// Outsourcer
// ---------------------------------------------------------------------------

struct OutsourcerConfig {
    Bytes key_seed;
    Contract contractor_contract;          // worker fixed up front
    Contract verifier_contract_template;   // worker filled after selection
    Currency outsourcer_deposit_per_contract = 0;
    InputSpec input_spec;
    std::uint32_t total_inputs = 0;
    std::uint32_t interval_size = 1;
    Strategy strategy;                      // Honest | SplitInput | PaymentRefuser | Colluder
    bool batching = false;
    std::uint32_t batch_size = 8;
    double similarity_threshold = 0.9;
    std::vector<PublicKey> local_verifier_list;  // sorted
    std::uint64_t rng_seed = 1;
    std::uint64_t schedule_seed = 1;  // kept private to the outsourcer
};

class OutsourcerActor {
public:
    explicit OutsourcerActor(OutsourcerConfig config);

    const PublicKey& public_key() const { return keys_.public_key(); }
    const Contract& contractor_contract() const { return config_.contractor_contract; }
    const std::optional<Contract>& verifier_contract() const { return verifier_contract_; }
    const SamplingSchedule& schedule() const { return schedule_; }
    const std::vector<ActorLogEntry>& log() const { return log_; }
    bool has_accused() const { return accused_; }
    std::uint64_t first_accusation_at() const { return first_accusation_at_; }
    std::uint64_t first_cheat_seen_at() const { return mismatch_input_sent_at_; }
    bool aborted(Outbound::Dest peer) const;
    const std::vector<std::pair<QosViolation, std::string>>& qos_events() const {
        return qos_events_;
    }
    std::size_t tamper_rejections() const { return tamper_rejections_; }
    bool randomization_done() const { return running_; }

    /// Kicks off the randomization exchange (or the deviant direct pick).
    std::vector<Outbound> begin(std::uint64_t now);
    std::vector<Outbound> handle(std::uint64_t now, const ActorEvent& event);

private:
    struct PeerState {
        std::uint32_t ack = 0;                       // verified responses
        std::uint32_t stream_index = 0;              // per-contract message counter
        std::map<std::uint32_t, SignedInput> sent;   // by global input index
        std::map<std::uint32_t, std::uint64_t> sent_at;
        QosLedgerLocal qos;
        bool aborted = false;
        std::optional<SignedInput> last_sent;
    };

    std::vector<Outbound> on_input_tick(std::uint64_t now);
    std::vector<Outbound> on_wire(std::uint64_t now, ByteSpan bytes);
    std::vector<Outbound> on_response(std::uint64_t now, const SignedResponse& resp);
    std::vector<Outbound> on_root_commitment(std::uint64_t now, const RootCommitment& rc);
    std::vector<Outbound> on_membership_proof(std::uint64_t now, const MembershipProof& proof);
    std::vector<Outbound> on_qos_sweep(std::uint64_t now);
    std::vector<Outbound> on_finish(std::uint64_t now);
    std::vector<Outbound> on_review_phase(std::uint64_t now);
    std::vector<Outbound> on_note(std::uint64_t now, const SettlementNote& note);
    std::vector<Outbound> maybe_compare(std::uint64_t now, std::uint32_t index);
    std::vector<Outbound> abort_peer(std::uint64_t now, bool verifier_side,
                                     QosViolation violation, const std::string& why);
    SignedInput make_signed_input(const Digest32& ch, std::uint32_t index, std::uint32_t ack,
                                  std::uint32_t interval, std::uint32_t flags,
                                  Bytes payload) const;
    Outbound to_settlement(SettlementRequest req) const;

    OutsourcerConfig config_;
    KeyPair keys_;
    SplitMix64 rng_;
    SplitMix64 input_rng_;
    SamplingSchedule schedule_;
    Digest32 contractor_ch_;
    std::optional<Contract> verifier_contract_;
    Digest32 verifier_ch_;
    std::optional<EntryProof> transcript_;
    std::optional<OutsourcerCommit> commit_;
    std::array<std::uint8_t, 32> commit_x_{};
    std::map<std::uint32_t, std::uint64_t> input_sent_tick_;
    bool running_ = false;
    bool finished_ = false;
    std::uint32_t next_index_ = 0;
    PeerState contractor_state_;
    PeerState verifier_state_;
    std::map<std::uint32_t, SignedInput> inner_sent_;  // inner message per sampled index
    std::map<std::uint32_t, PendingPair> pending_;
    // batching state: tentative unsigned payloads and commitments per batch
    std::map<std::uint32_t, Bytes> tentative_payloads_;
    std::map<std::uint32_t, RootCommitment> batch_commitments_;
    std::map<std::uint32_t, MembershipChallenge> batch_challenges_;
    bool accused_ = false;
    std::uint64_t first_accusation_at_ = 0;
    std::uint64_t mismatch_input_sent_at_ = 0;
    std::size_t tamper_rejections_ = 0;
    std::vector<std::pair<QosViolation, std::string>> qos_events_;
    std::vector<ActorLogEntry> log_;
    std::map<std::uint64_t, Bytes> case_inputs_;
    bool convicted_contractor_ = false;
    bool convicted_verifier_ = false;
};

// ---------------------------------------------------------------------------
// Worker (Contractor or Verifier, by contract role)
// ---------------------------------------------------------------------------

enum class ContestBehavior { ContestWhenAccused, GiveUp, Forge };

struct WorkerConfig {
    Bytes key_seed;
    Contract contract;
    InputSpec input_spec;
    Strategy strategy;
    ContestBehavior contest_behavior = ContestBehavior::ContestWhenAccused;
    bool batching = false;
    std::uint32_t batch_size = 8;
    bool forge_redemption = false;  // inflate ack_count in the final redeem
    std::vector<PublicKey> verifier_list_for_commit;  // contractor role only
    std::uint64_t rng_seed = 1;
};

class WorkerActor {
public:
    explicit WorkerActor(WorkerConfig config);

    const PublicKey& public_key() const { return keys_.public_key(); }
    const Contract& contract() const { return config_.contract; }
    Role role() const { return config_.contract.role; }
    const std::vector<ActorLogEntry>& log() const { return log_; }
    std::size_t responses_sent() const { return responses_sent_; }
    std::size_t signed_responses_sent() const { return signed_responses_sent_; }
    std::size_t root_commitments_sent() const { return root_commitments_sent_; }
    std::size_t inputs_processed() const { return inputs_processed_; }
    std::size_t cheats_produced() const { return cheats_produced_; }
    bool collusion_activated() const { return collusion_activated_; }
    bool aborted() const { return aborted_; }
    bool case_lost() const { return case_lost_; }
    std::uint32_t last_promised_ack() const {
        return last_input_ ? last_input_->ack_count : 0;
    }
    std::size_t tamper_rejections() const { return tamper_rejections_; }

    std::vector<Outbound> handle(std::uint64_t now, const ActorEvent& event);

private:
    struct Batch {
        std::uint32_t batch_id = 0;
        std::uint32_t first_index = 0;
        std::vector<std::uint32_t> indices;
        std::vector<Bytes> payloads;
        std::vector<Digest32> leaves;
        std::optional<MerkleTree> tree;
    };

    std::vector<Outbound> on_wire(std::uint64_t now, ByteSpan bytes);
    std::vector<Outbound> on_signed_input(std::uint64_t now, const SignedInput& msg);
    std::vector<Outbound> on_challenge(std::uint64_t now, const MembershipChallenge& msg);
    std::vector<Outbound> on_termination(std::uint64_t now, const Termination& msg);
    std::vector<Outbound> on_note(std::uint64_t now, const SettlementNote& note);
    std::vector<Outbound> on_contest_answer(std::uint64_t now, const ContestAnswer& answer);
    std::vector<Outbound> redeem_now(std::uint64_t now);
    Bytes produce_payload(ByteSpan input);
    std::vector<Outbound> respond(std::uint64_t now, const SignedInput& inner);
    std::vector<Outbound> flush_batch(std::uint64_t now);
    Outbound to_outsourcer(Bytes bytes, std::uint64_t delay) const;
    Outbound to_settlement(SettlementRequest req) const;

    WorkerConfig config_;
    KeyPair keys_;
    SplitMix64 rng_;
    ComputeFunction function_;
    Digest32 ch_;
    std::optional<SignedInput> last_input_;
    bool aborted_ = false;
    bool done_ = false;
    bool redeemed_ = false;
    std::size_t responses_sent_ = 0;
    std::size_t signed_responses_sent_ = 0;
    std::size_t root_commitments_sent_ = 0;
    std::size_t inputs_processed_ = 0;
    std::size_t cheats_produced_ = 0;
    std::size_t tamper_rejections_ = 0;
    bool collusion_activated_ = false;
    std::optional<Batch> open_batch_;
    std::map<std::uint32_t, Batch> closed_batches_;
    std::uint32_t next_batch_id_ = 0;
    // contestation state
    std::map<std::uint64_t, Bytes> case_inputs_;
    std::map<std::uint64_t, std::vector<ContestAnswer>> case_answers_;
    bool case_lost_ = false;
    std::vector<ActorLogEntry> log_;
};

// ---------------------------------------------------------------------------
// Pool verifier: answers contestation re-execution requests.
// ---------------------------------------------------------------------------

struct PoolVerifierConfig {
    Bytes key_seed;
    InputSpec input_spec;
    /// When set, the pool member is colluding: it answers with the agreed
    /// false output instead of evaluating honestly.
    bool colluding = false;
};

class PoolVerifierActor {
public:
    explicit PoolVerifierActor(PoolVerifierConfig config);

    const PublicKey& public_key() const { return keys_.public_key(); }
    std::vector<Outbound> handle(std::uint64_t now, const ActorEvent& event);

private:
    PoolVerifierConfig config_;
    KeyPair keys_;
    ComputeFunction function_;
};

// ---------------------------------------------------------------------------
// Fast detection-rate trials (no wire crypto; real schedule + strategy)
// ---------------------------------------------------------------------------

struct DetectionTrialStats {
    std::uint64_t trials = 0;
    std::uint64_t detected = 0;
    double rate = 0.0;
};

/// Runs `trials` independent contracts of the sampling process: per-input
/// cheat draws at `cheat_rate`, one sampled comparison per interval, byte
/// comparison of honest vs produced payloads. This is the Monte-Carlo
/// counterpart of detection_probability(cheat_rate, intervals).
DetectionTrialStats run_detection_trials(std::uint64_t seed, std::uint32_t trials,
                                         double cheat_rate, std::uint32_t intervals,
                                         std::uint32_t interval_size, const InputSpec& spec);

}  // namespace verimark
