#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "verimark/engine.hpp"

namespace verimark {

/// Raised when a scenario configuration violates a contract or protocol
/// invariant (CLI exit code 2).
struct ScenarioInvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ThreatId {
    Honest = 0,
    T1 = 1,  // contractor sends false responses to save resources
    T2 = 2,  // verifier sends false responses to save resources
    T3 = 3,  // outsourcer splits inputs to refuse payment
    T4 = 4,  // worker tries to dodge penalties with doctored records
    T5 = 5,  // participant refuses to pay
    T6 = 6,  // outsourcer + verifier collude against the contractor
    T7 = 7,  // contractor + verifier try to collude
    T8 = 8,  // QoS: timeout / low response rate / high response time
    T9 = 9,  // external message tampering
};

const char* threat_name(ThreatId id);
const char* threat_description(ThreatId id);
const char* threat_techniques(ThreatId id);
std::optional<ThreatId> threat_from_name(const std::string& name);

struct NetworkModel {
    std::uint64_t latency_min = 1;
    std::uint64_t latency_max = 3;
    double drop_response_rate = 0.0;  // worker->outsourcer losses

    enum class Tamper { None, ResponsePayload, InputPayload };
    Tamper tamper = Tamper::None;
    double tamper_rate = 0.0;
};

NetworkModel inject_tamper(NetworkModel network, NetworkModel::Tamper rule, double rate);
NetworkModel inject_latency(NetworkModel network, std::uint64_t latency_min,
                            std::uint64_t latency_max);
NetworkModel inject_drop(NetworkModel network, double drop_response_rate);

struct ScenarioConfig {
    std::string name = "scenario";
    ThreatId threat = ThreatId::Honest;
    std::uint64_t seed = 1;

    std::uint32_t total_inputs = 100;
    std::uint32_t interval_size = 10;
    InputSpec input;
    NetworkModel network;

    Currency reward_per_input = 2;
    Currency fee = 10;
    Currency bounty = 4;
    Currency worker_deposit = 60;
    Currency outsourcer_deposit = 60;
    Currency initial_balance = 10000;
    Currency contest_verifier_reward = 0;  // 0: contract reward_per_input
    double honest_cost = 4.0;              // per input, payoff analysis only
    double dishonest_cost = 1.0;
    double q = 0.5;

    QosThresholds qos;
    std::uint64_t deadline_ticks = 100;
    double similarity_threshold = 0.9;
    std::uint32_t pool_size = 5;
    bool batching = false;
    std::uint32_t batch_size = 8;

    // threat knobs
    double cheat_rate = 0.1;
    std::uint64_t slow_delay_ticks = 0;
    /// T6 flavor selector: false = colluding verifier frames the contractor,
    /// true = outsourcer skips randomization and hand-picks its partner.
    bool t6_hand_picked = false;
    /// T8 flavor selector: false = slow responder, true = response drops.
    bool t8_drop_flavor = false;

    void validate() const;  // throws ScenarioInvariantError
};

struct ScenarioReport {
    std::string name;
    ThreatId threat = ThreatId::Honest;
    std::uint64_t seed = 0;

    bool detected = false;
    bool prevented = false;
    std::string mechanism;
    std::uint64_t detection_latency = 0;

    std::vector<std::string> convicted;  // party names, settlement order
    std::uint64_t false_convictions = 0;
    std::uint64_t accusations = 0;
    std::uint64_t cases_opened = 0;
    std::uint64_t contest_rounds = 0;

    bool conservation_ok = false;
    Currency contractor_paid = 0;
    Currency verifier_paid = 0;
    Currency outsourcer_balance_delta = 0;
    Currency contractor_balance_delta = 0;
    Currency verifier_balance_delta = 0;

    std::uint64_t messages = 0;
    std::uint64_t wire_bytes = 0;
    std::uint64_t payload_bytes = 0;
    std::map<std::string, std::uint64_t> messages_by_type;
    std::uint64_t signed_inputs = 0;
    std::uint64_t signed_input_overhead_min = 0;
    std::uint64_t signed_input_overhead_max = 0;
    std::uint64_t max_overhead_any_message = 0;

    std::uint64_t qos_violations = 0;
    std::vector<std::string> qos_kinds;
    std::uint64_t tampered_delivered = 0;
    std::uint64_t tamper_rejections = 0;
    std::uint64_t batched_tamper_detections = 0;
    std::uint64_t dropped_messages = 0;
    bool collusion_activated = false;
    bool honesty_dominant = false;

    double contractor_reputation = 0.0;
    double verifier_reputation = 0.0;
    std::size_t contractor_reviews = 0;

    std::vector<std::string> ledger_snapshot;

    /// One line of key=value pairs, stable field order.
    std::string to_record() const;
};

ScenarioReport run_scenario(const ScenarioConfig& config);

/// Builds the canonical scenario family for one threat row.
ScenarioConfig scenario_for_threat(ThreatId threat, std::uint64_t seed);

struct ThreatSuiteConfig {
    std::uint64_t seed = 42;
    std::uint32_t repetitions = 1000;   // per threat row
    std::uint32_t t1_repetitions = 0;   // full-protocol T1 runs; 0 = repetitions
    std::uint32_t t1_trials = 10000;    // fast sampling-process trials
    double t1_cheat_rate = 0.1;
    std::uint32_t t1_intervals = 44;
};

struct ThreatSuiteRow {
    ThreatId threat = ThreatId::T1;
    std::string description;
    std::string techniques;
    std::uint64_t runs = 0;
    std::uint64_t succeeded = 0;  // detected or prevented per the row's criterion
    double rate = 0.0;
    double analytic = 0.0;        // T1: p = 1 - (1 - c)^i
    double fast_trial_rate = 0.0; // T1: sampling-process Monte-Carlo
    bool honesty_dominant = false;
    std::uint64_t false_convictions = 0;
    bool all_conserved = false;
    std::uint64_t max_signed_input_overhead = 0;
    std::uint64_t min_signed_input_overhead = 0;
    double mean_detection_latency = 0.0;

    std::string to_record() const;
};

std::vector<ThreatSuiteRow> run_threat_suite(const ThreatSuiteConfig& config);

/// Exhaustive contestation soundness exploration: every assignment order of
/// fresh verifier pairs and every give-up choice of the false responder.
struct ContestationExplorationResult {
    std::uint64_t branches = 0;
    std::uint64_t convicted_false_responder = 0;
    std::uint64_t convicted_other = 0;
    std::uint64_t unresolved = 0;
};

ContestationExplorationResult explore_contestation(std::size_t pool_size,
                                                   bool false_responder_is_verifier,
                                                   std::uint64_t seed);

}  // namespace verimark
