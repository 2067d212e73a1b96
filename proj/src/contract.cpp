#include "verimark/contract.hpp"

#include <cmath>
#include <stdexcept>

namespace verimark {

const char* role_name(Role role) {
    return role == Role::Contractor ? "contractor" : "verifier";
}

void QosThresholds::validate() const {
    if (max_response_time == 0 || timeout == 0)
        throw std::invalid_argument("qos thresholds must be positive");
    if (min_response_rate_ppm > 1000000)
        throw std::invalid_argument("min_response_rate must be <= 1");
}

Bytes Contract::canonical_encoding() const {
    Bytes out;
    out.reserve(157);
    put_bytes(out, contract_id.span());
    put_bytes(out, outsourcer_pk.span());
    put_bytes(out, worker_pk.span());
    put_u8(out, static_cast<std::uint8_t>(role));
    put_u64(out, static_cast<std::uint64_t>(reward_per_input));
    put_u64(out, static_cast<std::uint64_t>(fee));
    put_u64(out, static_cast<std::uint64_t>(bounty));
    put_u64(out, static_cast<std::uint64_t>(deposit));
    put_u64(out, function_id);
    put_u64(out, qos.max_response_time);
    put_u32(out, qos.min_response_rate_ppm);
    put_u64(out, qos.timeout);
    return out;
}

void Contract::validate() const {
    if (reward_per_input <= 0) throw std::invalid_argument("reward_per_input must be > 0");
    if (fee < 0 || bounty < 0 || deposit < 0)
        throw std::invalid_argument("fee, bounty, and deposit must be >= 0");
    if (deposit < fee)
        throw std::invalid_argument("deposit must cover the fee so the fine is enforceable");
    qos.validate();
}

Digest32 contract_hash(const Contract& contract) {
    return sha256(contract.canonical_encoding());
}

void CostModel::validate() const {
    if (dishonest_cost < 0 || honest_cost < dishonest_cost)
        throw std::invalid_argument("costs must satisfy 0 <= dishonest <= honest");
    if (q < 0 || q > 1) throw std::invalid_argument("q must lie in [0, 1]");
}

PayoffMatrix payoff_matrix(double reward, const CostModel& cost, double fee, double bounty) {
    cost.validate();
    PayoffMatrix m;
    m.diligent_vs_diligent = reward - cost.honest_cost;
    m.diligent_vs_dishonest = reward - cost.honest_cost + bounty;
    m.dishonest_vs_diligent =
        reward * cost.q - (fee + bounty) * (1.0 - cost.q) - cost.dishonest_cost;
    m.dishonest_vs_dishonest = reward - cost.dishonest_cost;
    return m;
}

bool is_honesty_dominant(const PayoffMatrix& matrix) {
    return matrix.diligent_vs_diligent > matrix.dishonest_vs_diligent &&
           matrix.diligent_vs_dishonest > matrix.dishonest_vs_dishonest;
}

double detection_probability(double cheat_rate, std::uint64_t intervals) {
    if (cheat_rate < 0.0 || cheat_rate > 1.0)
        throw std::domain_error("cheat rate must lie in [0, 1]");
    return 1.0 - std::pow(1.0 - cheat_rate, static_cast<double>(intervals));
}

std::uint64_t required_intervals(double cheat_rate, double confidence) {
    if (cheat_rate <= 0.0 || cheat_rate >= 1.0)
        throw std::domain_error("cheat rate must lie strictly between 0 and 1");
    if (confidence <= 0.0 || confidence >= 1.0)
        throw std::domain_error("confidence must lie strictly between 0 and 1");
    std::uint64_t i = 0;
    while (detection_probability(cheat_rate, i) < confidence) ++i;
    return i;
}

}  // namespace verimark
