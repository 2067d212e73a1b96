#include <doctest.h>

#include <cmath>

#include "verimark/contract.hpp"
#include "verimark/rng.hpp"

using namespace verimark;

namespace {

Contract sample_contract(SplitMix64& rng) {
    Contract c;
    Bytes id = rng.bytes(32);
    c.contract_id = Digest32::from_bytes(id);
    c.outsourcer_pk = KeyPair::from_seed(rng.bytes(32)).public_key();
    c.worker_pk = KeyPair::from_seed(rng.bytes(32)).public_key();
    c.role = Role::Contractor;
    c.reward_per_input = 2;
    c.fee = 10;
    c.bounty = 4;
    c.deposit = 40;
    c.function_id = 1;
    return c;
}

// Brute-force expected payoff: enumerate the (cheat-succeeds, cheat-caught)
// outcomes with probabilities (q, 1-q). A diligent participant always pays
// the honest cost and earns the reward; it collects the bounty when the
// counterparty's cheat is exposed. A dishonest participant's cheap answer
// passes with probability q; otherwise it forfeits the reward and pays the
// fee plus the bounty. Two dishonest participants produce the same cheap
// answer, so nothing is ever exposed.
PayoffMatrix payoff_oracle(double r, double c_h, double c_d, double q, double f, double b) {
    PayoffMatrix m;
    m.diligent_vs_diligent = r - c_h;
    m.diligent_vs_dishonest = (r - c_h) + b;
    m.dishonest_vs_diligent = q * (r - c_d) + (1.0 - q) * (-(f + b) - c_d);
    m.dishonest_vs_dishonest = r - c_d;
    return m;
}

}  // namespace

TEST_CASE("contract hash is stable, id-sensitive, and re-encode stable") {
    SplitMix64 rng(0x5eed0101);
    Contract a = sample_contract(rng);
    Contract b = a;
    CHECK(contract_hash(a) == contract_hash(b));
    CHECK(a.canonical_encoding() == b.canonical_encoding());

    for (int i = 0; i < 1000; ++i) {
        Contract c = a;
        c.contract_id = Digest32::from_bytes(rng.bytes(32));
        if (c.contract_id == a.contract_id) continue;
        CHECK(contract_hash(c) != contract_hash(a));
    }

    // Round trip through the canonical bytes: same bytes, same hash.
    CHECK(sha256(a.canonical_encoding()) == contract_hash(a));
    CHECK(a.canonical_encoding().size() == 157);
}

TEST_CASE("contract field changes alter the canonical hash") {
    SplitMix64 rng(0x5eed0102);
    Contract base = sample_contract(rng);
    Contract role_changed = base;
    role_changed.role = Role::Verifier;
    CHECK(contract_hash(role_changed) != contract_hash(base));
    Contract reward_changed = base;
    reward_changed.reward_per_input = 3;
    CHECK(contract_hash(reward_changed) != contract_hash(base));
}

TEST_CASE("contract invariants") {
    SplitMix64 rng(0x5eed0103);
    Contract good = sample_contract(rng);
    CHECK_NOTHROW(good.validate());

    Contract no_reward = good;
    no_reward.reward_per_input = 0;
    CHECK_THROWS_AS(no_reward.validate(), std::invalid_argument);

    Contract thin_deposit = good;
    thin_deposit.deposit = thin_deposit.fee - 1;
    CHECK_THROWS_AS(thin_deposit.validate(), std::invalid_argument);
}

TEST_CASE("payoff matrix worked examples") {
    CostModel cost{4.0, 1.0, 0.5};

    PayoffMatrix m = payoff_matrix(10.0, cost, 10.0, 2.0);
    CHECK(m.diligent_vs_diligent == doctest::Approx(6.0));
    CHECK(m.diligent_vs_dishonest == doctest::Approx(8.0));
    CHECK(m.dishonest_vs_diligent == doctest::Approx(-2.0));
    CHECK(m.dishonest_vs_dishonest == doctest::Approx(9.0));
    CHECK_FALSE(is_honesty_dominant(m));  // bounty 2 below c_h - c_d = 3

    PayoffMatrix m2 = payoff_matrix(10.0, cost, 10.0, 4.0);
    CHECK(m2.diligent_vs_diligent == doctest::Approx(6.0));
    CHECK(m2.diligent_vs_dishonest == doctest::Approx(10.0));
    CHECK(m2.dishonest_vs_diligent == doctest::Approx(-3.0));
    CHECK(m2.dishonest_vs_dishonest == doctest::Approx(9.0));
    CHECK(is_honesty_dominant(m2));
}

TEST_CASE("payoff matrix degenerate cases") {
    SUBCASE("q = 1 kills the penalty term: dishonest-vs-diligent becomes r - c_d") {
        CostModel always_right{4.0, 1.0, 1.0};
        PayoffMatrix m = payoff_matrix(10.0, always_right, 0.0, 0.0);
        CHECK(m.dishonest_vs_diligent == doctest::Approx(9.0));
    }
    SUBCASE("bounty 0 flattens the diligent row") {
        CostModel cost{4.0, 1.0, 0.5};
        PayoffMatrix m = payoff_matrix(10.0, cost, 10.0, 0.0);
        CHECK(m.diligent_vs_diligent == m.diligent_vs_dishonest);
        CHECK(m.diligent_vs_diligent == doctest::Approx(6.0));
    }
    SUBCASE("equal costs make honesty dominant with any positive bounty") {
        CostModel cost{3.0, 3.0, 0.75};
        CHECK(is_honesty_dominant(payoff_matrix(5.0, cost, 0.0, 1.0)));
    }
    SUBCASE("ties report non-dominant") {
        CostModel cost{3.0, 3.0, 0.5};
        PayoffMatrix tie = payoff_matrix(5.0, cost, 0.0, 0.0);
        CHECK(tie.diligent_vs_dishonest == tie.dishonest_vs_dishonest);
        CHECK_FALSE(is_honesty_dominant(tie));
    }
}

TEST_CASE("payoff matrix equals the enumeration oracle on dyadic rational inputs") {
    // Dyadic q and modest integer currency keep every intermediate value
    // exactly representable, so both evaluation orders must agree bit for bit.
    SplitMix64 rng(0x5eed0104);
    for (int i = 0; i < 10000; ++i) {
        double r = static_cast<double>(rng.below(1 << 20));
        double c_d = static_cast<double>(rng.below(1 << 19));
        double c_h = c_d + static_cast<double>(rng.below(1 << 19));
        double q = static_cast<double>(rng.below(64)) / 64.0;
        double f = static_cast<double>(rng.below(1 << 20));
        double b = static_cast<double>(rng.below(1 << 20));

        PayoffMatrix got = payoff_matrix(r, CostModel{c_h, c_d, q}, f, b);
        PayoffMatrix want = payoff_oracle(r, c_h, c_d, q, f, b);
        CHECK(got.diligent_vs_diligent == want.diligent_vs_diligent);
        CHECK(got.diligent_vs_dishonest == want.diligent_vs_dishonest);
        CHECK(got.dishonest_vs_diligent == want.dishonest_vs_diligent);
        CHECK(got.dishonest_vs_dishonest == want.dishonest_vs_dishonest);
    }
}

TEST_CASE("honesty dominance region check") {
    // b > c_h - c_d and f + b > (c_h - c_d) / (1 - q) - r imply dominance.
    SplitMix64 rng(0x5eed0105);
    for (int i = 0; i < 10000; ++i) {
        double c_d = rng.uniform01() * 10.0;
        double c_h = c_d + rng.uniform01() * 10.0;
        double q = rng.uniform01() * 0.98;
        double r = rng.uniform01() * 20.0;
        double margin = 0.01 + rng.uniform01() * 5.0;
        double b = (c_h - c_d) + margin;
        double needed = (c_h - c_d) / (1.0 - q) - r;
        double f = std::max(0.0, needed - b) + margin;
        CHECK(is_honesty_dominant(payoff_matrix(r, CostModel{c_h, c_d, q}, f, b)));
    }
}

TEST_CASE("detection probability formula and edge cases") {
    CHECK(detection_probability(0.1, 44) == doctest::Approx(0.99028).epsilon(1e-4));
    CHECK(detection_probability(0.0, 123) == 0.0);
    CHECK(detection_probability(1.0, 1) == 1.0);
    CHECK(detection_probability(0.3, 0) == 0.0);
    CHECK_THROWS_AS(detection_probability(-0.1, 3), std::domain_error);
    CHECK_THROWS_AS(detection_probability(1.5, 3), std::domain_error);
}

TEST_CASE("detection probability is monotone in both arguments") {
    for (double c = 0.0; c <= 1.0; c += 0.05) {
        double prev = -1.0;
        for (std::uint64_t i = 0; i <= 60; i += 3) {
            double p = detection_probability(c, i);
            CHECK(p >= prev);
            prev = p;
        }
    }
    for (std::uint64_t i = 1; i <= 50; i += 7) {
        double prev = -1.0;
        for (double c = 0.0; c <= 1.0; c += 0.02) {
            double p = detection_probability(c, i);
            CHECK(p >= prev);
            prev = p;
        }
    }
}

TEST_CASE("required intervals: worked values and minimality") {
    CHECK(required_intervals(0.1, 0.99) == 44);
    CHECK(required_intervals(0.5, 0.5) == 1);

    SplitMix64 rng(0x5eed0106);
    for (int t = 0; t < 200; ++t) {
        double c = 0.01 + rng.uniform01() * 0.9;
        double confidence = 0.05 + rng.uniform01() * 0.94;
        std::uint64_t i = required_intervals(c, confidence);
        CHECK(detection_probability(c, i) >= confidence);
        if (i > 0) CHECK(detection_probability(c, i - 1) < confidence);
    }

    CHECK_THROWS_AS(required_intervals(0.0, 0.99), std::domain_error);
    CHECK_THROWS_AS(required_intervals(0.2, 1.0), std::domain_error);
}
