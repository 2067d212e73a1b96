#pragma once

#include <cstdint>
#include <string>

#include "verimark/bytes.hpp"
#include "verimark/crypto.hpp"

namespace verimark {

/// Ledger currency in indivisible units. All settlement arithmetic is
/// exact integer math; only expected-payoff analysis uses binary64.
using Currency = std::int64_t;

enum class Role : std::uint8_t { Contractor = 0, Verifier = 1 };

const char* role_name(Role role);

struct QosThresholds {
    std::uint64_t max_response_time = 50;       // ticks
    std::uint32_t min_response_rate_ppm = 500000;  // parts per million of expected responses
    std::uint64_t timeout = 100;                // ticks

    double min_response_rate() const { return min_response_rate_ppm * 1e-6; }
    void validate() const;
};

/// Agreement between the Outsourcer and one worker (Contractor or
/// Verifier). Hashed into every signature the parties exchange.
struct Contract {
    Digest32 contract_id;
    PublicKey outsourcer_pk;
    PublicKey worker_pk;
    Role role = Role::Contractor;
    Currency reward_per_input = 0;
    Currency fee = 0;
    Currency bounty = 0;
    Currency deposit = 0;
    std::uint64_t function_id = 0;
    QosThresholds qos;

    /// Fixed-order byte layout (documented in PROTOCOL.md); integers
    /// little-endian, keys raw, role one byte.
    Bytes canonical_encoding() const;
    void validate() const;
};

Digest32 contract_hash(const Contract& contract);

/// Cost structure of one worker: honest evaluation cost, the cost of the
/// cheap cheating algorithm, and the probability q that the cheap answer
/// happens to be correct.
struct CostModel {
    double honest_cost = 0;
    double dishonest_cost = 0;
    double q = 0;

    void validate() const;
};

/// Expected payoffs, rows = this participant, columns = counterparty.
struct PayoffMatrix {
    double diligent_vs_diligent = 0;
    double diligent_vs_dishonest = 0;
    double dishonest_vs_diligent = 0;
    double dishonest_vs_dishonest = 0;
};

PayoffMatrix payoff_matrix(double reward, const CostModel& cost, double fee, double bounty);

/// True iff the Diligent row strictly dominates the Dishonest row. Ties
/// report non-dominant.
bool is_honesty_dominant(const PayoffMatrix& matrix);

/// p = 1 - (1 - c)^i: probability that at least one of i sampled
/// intervals hits a cheated input when the per-input cheat rate is c.
double detection_probability(double cheat_rate, std::uint64_t intervals);

/// Smallest interval count i with detection_probability(c, i) >= confidence.
std::uint64_t required_intervals(double cheat_rate, double confidence);

}  // namespace verimark
