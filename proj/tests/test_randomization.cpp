#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "verimark/randomization.hpp"
#include "verimark/rng.hpp"

using namespace verimark;

namespace {

struct Setup {
    KeyPair outsourcer;
    KeyPair contractor;
    Digest32 contract_ref;
    std::vector<PublicKey> list;
};

Setup make_setup(SplitMix64& rng, std::size_t n_verifiers) {
    Setup s{KeyPair::from_seed(rng.bytes(32)), KeyPair::from_seed(rng.bytes(32)),
            Digest32::from_bytes(rng.bytes(32)),
            {}};
    for (std::size_t i = 0; i < n_verifiers; ++i)
        s.list.push_back(KeyPair::from_seed(rng.bytes(32)).public_key());
    std::sort(s.list.begin(), s.list.end());
    return s;
}

std::array<std::uint8_t, 32> value_of(std::uint64_t small) {
    // Big-endian: the low byte carries the value.
    std::array<std::uint8_t, 32> v{};
    v[31] = static_cast<std::uint8_t>(small);
    v[30] = static_cast<std::uint8_t>(small >> 8);
    return v;
}

}  // namespace

TEST_CASE("outsourcer commit binds h(x) and reveals nothing of x") {
    SplitMix64 rng(0x5eed0301);
    Setup s = make_setup(rng, 4);
    auto x = random_value(rng);
    OutsourcerCommit oc = outsourcer_commit(x, s.contract_ref, s.outsourcer);

    CHECK(oc.x_hash == sha256(ByteSpan(x.data(), x.size())));
    CHECK(verify(s.outsourcer.public_key(),
                 outsourcer_commit_preimage(oc.x_hash, oc.contract_ref), oc.sig));

    // Structural check: the message carries only digests and a signature,
    // and none of its bytes outside the digest equal a window of x.
    Bytes encoded = encode(oc);
    CHECK(encoded.size() == 129);

    auto x2 = random_value(rng);
    CHECK(outsourcer_commit(x2, s.contract_ref, s.outsourcer).x_hash != oc.x_hash);
}

TEST_CASE("distinct x values give distinct commitments (1000 samples)") {
    SplitMix64 rng(0x5eed0302);
    Setup s = make_setup(rng, 3);
    std::set<Digest32> hashes;
    for (int i = 0; i < 1000; ++i) {
        auto x = random_value(rng);
        hashes.insert(outsourcer_commit(x, s.contract_ref, s.outsourcer).x_hash);
    }
    CHECK(hashes.size() == 1000);
}

TEST_CASE("contractor commit rejects unsorted lists and bad outsourcer commits") {
    SplitMix64 rng(0x5eed0303);
    Setup s = make_setup(rng, 4);
    auto x = random_value(rng);
    auto y = random_value(rng);
    OutsourcerCommit oc = outsourcer_commit(x, s.contract_ref, s.outsourcer);

    CHECK_NOTHROW(contractor_commit(oc, y, s.list, s.contractor, s.outsourcer.public_key()));

    std::vector<PublicKey> unsorted = s.list;
    std::swap(unsorted.front(), unsorted.back());
    CHECK_THROWS_AS(
        contractor_commit(oc, y, unsorted, s.contractor, s.outsourcer.public_key()),
        std::invalid_argument);

    std::vector<PublicKey> duplicated = s.list;
    duplicated.push_back(duplicated.back());
    CHECK_THROWS_AS(
        contractor_commit(oc, y, duplicated, s.contractor, s.outsourcer.public_key()),
        std::invalid_argument);

    OutsourcerCommit forged = oc;
    forged.x_hash.bytes[0] ^= 1;
    CHECK_THROWS_AS(contractor_commit(forged, y, s.list, s.contractor,
                                      s.outsourcer.public_key()),
                    std::invalid_argument);
}

TEST_CASE("select_verifier modular arithmetic") {
    SplitMix64 rng(0x5eed0304);
    Setup s = make_setup(rng, 4);
    auto [index, pk] = select_verifier(value_of(5), value_of(3), s.list);
    CHECK(index == 0);  // (5 + 3) mod 4
    CHECK(pk == s.list[0]);

    CHECK_THROWS_AS(select_verifier(value_of(1), value_of(2), {}), std::invalid_argument);

    // Shifting x over [0, n) with fixed y is a bijection onto the indices.
    std::set<std::size_t> seen;
    for (std::uint64_t x = 0; x < 4; ++x)
        seen.insert(select_verifier(value_of(x), value_of(9), s.list).first);
    CHECK(seen.size() == 4);
}

TEST_CASE("selected index is chi-square uniform over random commitments (n = 7)") {
    SplitMix64 rng(0x5eed0305);
    Setup s = make_setup(rng, 7);
    std::array<std::uint64_t, 7> counts{};
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        auto x = random_value(rng);
        auto y = random_value(rng);
        counts[select_verifier(x, y, s.list).first]++;
    }
    double expected = static_cast<double>(trials) / 7.0;
    double stat = 0;
    for (std::uint64_t c : counts) {
        double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    // Chi-square with 6 degrees of freedom: p > 0.01 iff stat < 16.812.
    CHECK(stat < 16.812);
}

TEST_CASE("adversarial y derived from h(x) cannot bias the selection (n = 11)") {
    SplitMix64 rng(0x5eed0306);
    Setup s = make_setup(rng, 11);
    const int trials = 100000;

    auto run_strategy = [&](auto derive_y) {
        std::array<std::uint64_t, 11> counts{};
        SplitMix64 local(0x5eed0307);
        for (int i = 0; i < trials; ++i) {
            auto x = random_value(local);
            Digest32 xh = sha256(ByteSpan(x.data(), x.size()));
            std::array<std::uint8_t, 32> y = derive_y(xh);
            counts[select_verifier(x, y, s.list).first]++;
        }
        double tv = 0;
        for (std::uint64_t c : counts)
            tv += std::abs(static_cast<double>(c) / trials - 1.0 / 11.0);
        return tv / 2.0;
    };

    // y = h(x) bytes directly.
    CHECK(run_strategy([](const Digest32& xh) { return xh.bytes; }) < 0.02);
    // y = h(x) with the low byte incremented.
    CHECK(run_strategy([](const Digest32& xh) {
              auto y = xh.bytes;
              y[31] += 1;
              return y;
          }) < 0.02);
    // y = all bytes complemented.
    CHECK(run_strategy([](const Digest32& xh) {
              auto y = xh.bytes;
              for (auto& b : y) b = static_cast<std::uint8_t>(~b);
              return y;
          }) < 0.02);
}

TEST_CASE("verify_selection accepts a clean transcript and carries the index") {
    SplitMix64 rng(0x5eed0308);
    Setup s = make_setup(rng, 5);
    auto x = random_value(rng);
    auto y = random_value(rng);
    OutsourcerCommit oc = outsourcer_commit(x, s.contract_ref, s.outsourcer);
    ContractorCommit cc =
        contractor_commit(oc, y, s.list, s.contractor, s.outsourcer.public_key());

    SelectionDecision d = verify_selection(oc, cc, x, s.list, 0.9,
                                           s.outsourcer.public_key(),
                                           s.contractor.public_key());
    REQUIRE(d.accepted);
    CHECK(d.index == select_verifier(x, y, s.list).first);
    CHECK(d.verifier == s.list[d.index]);
}

TEST_CASE("verify_selection rejects each failure mode with a distinct reason") {
    SplitMix64 rng(0x5eed0309);
    Setup s = make_setup(rng, 10);
    auto x = random_value(rng);
    auto y = random_value(rng);
    OutsourcerCommit oc = outsourcer_commit(x, s.contract_ref, s.outsourcer);
    ContractorCommit cc =
        contractor_commit(oc, y, s.list, s.contractor, s.outsourcer.public_key());
    PublicKey opk = s.outsourcer.public_key();
    PublicKey cpk = s.contractor.public_key();

    SUBCASE("wrong revealed x") {
        auto wrong = random_value(rng);
        SelectionDecision d = verify_selection(oc, cc, wrong, s.list, 0.9, opk, cpk);
        CHECK_FALSE(d.accepted);
        CHECK(d.reason == SelectionReject::HashMismatch);
    }
    SUBCASE("tampered outsourcer commitment fails downstream") {
        OutsourcerCommit bad = oc;
        bad.x_hash.bytes[4] ^= 1;
        SelectionDecision d = verify_selection(bad, cc, x, s.list, 0.9, opk, cpk);
        CHECK_FALSE(d.accepted);  // revealed x no longer matches the tampered hash
    }
    SUBCASE("tampered outsourcer signature") {
        OutsourcerCommit bad = oc;
        bad.sig.bytes[0] ^= 1;
        SelectionDecision d = verify_selection(bad, cc, x, s.list, 0.9, opk, cpk);
        CHECK_FALSE(d.accepted);
        CHECK(d.reason == SelectionReject::BadOutsourcerSignature);
    }
    SUBCASE("mutated y breaks the contractor commitment (binding)") {
        ContractorCommit bad = cc;
        bad.y[0] ^= 1;
        SelectionDecision d = verify_selection(oc, bad, x, s.list, 0.9, opk, cpk);
        CHECK_FALSE(d.accepted);
        CHECK(d.reason == SelectionReject::BadContractorSignature);
    }
    SUBCASE("mutated list entry breaks the contractor commitment (binding)") {
        ContractorCommit bad = cc;
        bad.verifier_list[2].bytes[8] ^= 1;
        SelectionDecision d = verify_selection(oc, bad, x, s.list, 0.9, opk, cpk);
        CHECK_FALSE(d.accepted);
        CHECK(d.reason == SelectionReject::BadContractorSignature ||
              d.reason == SelectionReject::UnsortedList);
    }
    SUBCASE("diverging local list") {
        // Drop 30% of the local list: Jaccard 7/10 = 0.7 < 0.9.
        std::vector<PublicKey> local(s.list.begin(), s.list.begin() + 7);
        SelectionDecision d = verify_selection(oc, cc, x, local, 0.9, opk, cpk);
        CHECK_FALSE(d.accepted);
        CHECK(d.reason == SelectionReject::ListDivergence);
        CHECK(list_similarity(cc.verifier_list, local) == doctest::Approx(0.7));
    }
    SUBCASE("wrong contract context") {
        ContractorCommit bad = cc;
        bad.contract_ref.bytes[1] ^= 1;
        SelectionDecision d = verify_selection(oc, bad, x, s.list, 0.9, opk, cpk);
        CHECK_FALSE(d.accepted);
        CHECK(d.reason == SelectionReject::ContextMismatch);
    }
}

TEST_CASE("commitment binding: no alternative (y, list) passes under the same signature") {
    SplitMix64 rng(0x5eed030a);
    Setup s = make_setup(rng, 6);
    auto x = random_value(rng);
    auto y = random_value(rng);
    OutsourcerCommit oc = outsourcer_commit(x, s.contract_ref, s.outsourcer);
    ContractorCommit cc =
        contractor_commit(oc, y, s.list, s.contractor, s.outsourcer.public_key());
    PublicKey opk = s.outsourcer.public_key();
    PublicKey cpk = s.contractor.public_key();

    for (int trial = 0; trial < 200; ++trial) {
        ContractorCommit mutated = cc;
        switch (rng.below(3)) {
            case 0: mutated.y[rng.below(32)] ^= static_cast<std::uint8_t>(1 + rng.below(255)); break;
            case 1:
                mutated.verifier_list[rng.below(mutated.verifier_list.size())]
                    .bytes[rng.below(32)] ^= static_cast<std::uint8_t>(1 + rng.below(255));
                break;
            default: {
                PublicKey extra = KeyPair::from_seed(rng.bytes(32)).public_key();
                mutated.verifier_list.push_back(extra);
                std::sort(mutated.verifier_list.begin(), mutated.verifier_list.end());
                break;
            }
        }
        if (mutated.y == cc.y && mutated.verifier_list == cc.verifier_list) continue;
        SelectionDecision d = verify_selection(oc, mutated, x, s.list, 0.5, opk, cpk);
        CHECK_FALSE(d.accepted);
    }
}
