#include <doctest.h>

#include <set>

#include "verimark/rng.hpp"
#include "verimark/wire.hpp"

using namespace verimark;

namespace {

Digest32 digest_of(SplitMix64& rng) { return Digest32::from_bytes(rng.bytes(32)); }
Signature64 sig_of(SplitMix64& rng) { return Signature64::from_bytes(rng.bytes(64)); }

SignedInput random_input(SplitMix64& rng) {
    SignedInput m;
    m.contract_ref = digest_of(rng);
    m.input_index = static_cast<std::uint32_t>(rng.next());
    m.ack_count = static_cast<std::uint32_t>(rng.next());
    m.interval_id = static_cast<std::uint32_t>(rng.next());
    m.flags = static_cast<std::uint32_t>(rng.next());
    m.payload = rng.bytes(rng.below(64));
    m.sig = sig_of(rng);
    return m;
}

SignedResponse random_response(SplitMix64& rng) {
    SignedResponse m;
    m.contract_ref = digest_of(rng);
    m.input_index = static_cast<std::uint32_t>(rng.next());
    m.payload = rng.bytes(rng.below(64));
    m.input_sig = sig_of(rng);
    m.sig = sig_of(rng);
    return m;
}

WireMessage random_message(SplitMix64& rng) {
    switch (rng.below(9)) {
        case 0: return random_input(rng);
        case 1: return random_response(rng);
        case 2: {
            RootCommitment m;
            m.contract_ref = digest_of(rng);
            m.batch_id = static_cast<std::uint32_t>(rng.next());
            m.first_index = static_cast<std::uint32_t>(rng.next());
            m.leaf_count = static_cast<std::uint32_t>(rng.next());
            m.root = digest_of(rng);
            m.sig = sig_of(rng);
            return m;
        }
        case 3: {
            MembershipChallenge m;
            m.contract_ref = digest_of(rng);
            m.batch_id = static_cast<std::uint32_t>(rng.next());
            m.challenged_index = static_cast<std::uint32_t>(rng.next());
            m.sig = sig_of(rng);
            return m;
        }
        case 4: {
            MembershipProof m;
            m.contract_ref = digest_of(rng);
            m.batch_id = static_cast<std::uint32_t>(rng.next());
            m.challenged_index = static_cast<std::uint32_t>(rng.next());
            m.payload = rng.bytes(rng.below(64));
            std::size_t depth = rng.below(6);
            for (std::size_t i = 0; i < depth; ++i)
                m.path.nodes.push_back({digest_of(rng), rng.below(2) == 1});
            m.sig = sig_of(rng);
            return m;
        }
        case 5: {
            Termination m;
            m.contract_ref = digest_of(rng);
            m.final_ack = static_cast<std::uint32_t>(rng.next());
            m.sig = sig_of(rng);
            return m;
        }
        case 6: {
            OutsourcerCommit m;
            m.x_hash = digest_of(rng);
            m.contract_ref = digest_of(rng);
            m.sig = sig_of(rng);
            return m;
        }
        case 7: {
            ContractorCommit m;
            m.x_hash = digest_of(rng);
            m.contract_ref = digest_of(rng);
            Bytes y = rng.bytes(32);
            std::copy(y.begin(), y.end(), m.y.begin());
            std::vector<PublicKey> list;
            std::size_t n = 1 + rng.below(6);
            for (std::size_t i = 0; i < n; ++i) list.push_back(PublicKey::from_bytes(rng.bytes(32)));
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
            m.verifier_list = std::move(list);
            m.sig = sig_of(rng);
            return m;
        }
        default: {
            BatchedResponse m;
            m.contract_ref = digest_of(rng);
            m.input_index = static_cast<std::uint32_t>(rng.next());
            m.payload = rng.bytes(rng.below(64));
            return m;
        }
    }
}

}  // namespace

TEST_CASE("preimages are deterministic and field-sensitive") {
    SplitMix64 rng(0x5eed0201);
    SignedInput m = random_input(rng);
    CHECK(input_sig_preimage(m) == input_sig_preimage(m));

    SignedInput acked = m;
    acked.ack_count += 1;
    CHECK(input_sig_preimage(acked) != input_sig_preimage(m));
}

TEST_CASE("input and response preimages of identical fields differ by domain tag") {
    SplitMix64 rng(0x5eed0202);
    Digest32 ch = digest_of(rng);
    Bytes payload = rng.bytes(24);
    Bytes input_pre = input_sig_preimage(ch, 5, 0, 0, 0, payload);
    Bytes response_pre = response_sig_preimage(ch, 5, Signature64{}, payload);
    CHECK(input_pre != response_pre);
    CHECK(input_pre.front() == static_cast<std::uint8_t>(MsgTag::SignedInput));
    CHECK(response_pre.front() == static_cast<std::uint8_t>(MsgTag::SignedResponse));
}

TEST_CASE("no two generated (type, fields) pairs share a signature preimage") {
    SplitMix64 rng(0x5eed0203);
    std::set<Bytes> preimages;
    std::size_t inserted = 0;
    auto add = [&](Bytes preimage) {
        preimages.insert(std::move(preimage));
        ++inserted;
    };
    for (int i = 0; i < 300; ++i) {
        SignedInput in = random_input(rng);
        add(input_sig_preimage(in));
        SignedResponse resp = random_response(rng);
        add(response_sig_preimage(resp));
        RootCommitment rc;
        rc.contract_ref = digest_of(rng);
        rc.batch_id = static_cast<std::uint32_t>(rng.next());
        rc.first_index = static_cast<std::uint32_t>(rng.next());
        rc.leaf_count = static_cast<std::uint32_t>(rng.next());
        rc.root = digest_of(rng);
        add(root_commitment_preimage(rc));
        MembershipChallenge ch;
        ch.contract_ref = digest_of(rng);
        ch.batch_id = static_cast<std::uint32_t>(rng.next());
        ch.challenged_index = static_cast<std::uint32_t>(rng.next());
        add(membership_challenge_preimage(ch));
        ch.sig = sig_of(rng);
        add(membership_proof_preimage(ch, rng.bytes(16)));
        Termination t;
        t.contract_ref = digest_of(rng);
        t.final_ack = static_cast<std::uint32_t>(rng.next());
        add(termination_preimage(t));
        add(outsourcer_commit_preimage(digest_of(rng), digest_of(rng)));
        add(contractor_commit_preimage(digest_of(rng), digest_of(rng), digest_of(rng)));
        add(contest_response_preimage(digest_of(rng), rng.bytes(8)));
        add(review_preimage(digest_of(rng), PublicKey::from_bytes(rng.bytes(32)), 1));
    }
    CHECK(preimages.size() == inserted);
}

TEST_CASE("identical logical fields under different domains never collide") {
    SplitMix64 rng(0x5eed0204);
    Digest32 ch = digest_of(rng);
    Digest32 other = digest_of(rng);
    Bytes payload = rng.bytes(12);

    Termination t{ch, 7, Signature64{}};
    MembershipChallenge mc{ch, 7, 0, Signature64{}};
    CHECK(termination_preimage(t) != membership_challenge_preimage(mc));
    CHECK(outsourcer_commit_preimage(ch, other) !=
          contractor_commit_preimage(ch, other, sha256(payload)));
}

TEST_CASE("encode/decode round trips 1000 random messages") {
    SplitMix64 rng(0x5eed0205);
    for (int i = 0; i < 1000; ++i) {
        WireMessage m = random_message(rng);
        Bytes bytes = encode(m);
        WireMessage back = decode_message(bytes);
        CHECK(back == m);
    }
}

TEST_CASE("decode rejects truncated and over-long buffers with an offset") {
    SplitMix64 rng(0x5eed0206);
    SignedInput m = random_input(rng);
    Bytes bytes = encode(m);

    Bytes truncated(bytes.begin(), bytes.end() - 1);
    CHECK_THROWS_AS(decode_message(truncated), MalformedMessage);

    Bytes padded = bytes;
    padded.push_back(0x00);
    try {
        decode_message(padded);
        FAIL("expected MalformedMessage");
    } catch (const MalformedMessage& err) {
        CHECK(err.offset == bytes.size());
    }

    Bytes empty;
    CHECK_THROWS_AS(decode_message(empty), MalformedMessage);

    Bytes bad_tag = bytes;
    bad_tag[0] = 0x7f;
    CHECK_THROWS_AS(decode_message(bad_tag), MalformedMessage);
}

TEST_CASE("wire size is fixed header plus payload, exactly") {
    SplitMix64 rng(0x5eed0207);
    for (int i = 0; i < 50; ++i) {
        SignedInput in = random_input(rng);
        CHECK(encode(in).size() == 117 + in.payload.size());
        SignedResponse resp = random_response(rng);
        CHECK(encode(resp).size() == 169 + resp.payload.size());
        BatchedResponse br;
        br.contract_ref = digest_of(rng);
        br.payload = rng.bytes(rng.below(64));
        CHECK(encode(br).size() == 41 + br.payload.size());
    }
    Termination t;
    CHECK(encode(t).size() == 101);
    RootCommitment rc;
    CHECK(encode(rc).size() == 141);
    MembershipChallenge mc;
    CHECK(encode(mc).size() == 105);
}

TEST_CASE("overhead accounting: signature plus integer fields") {
    SplitMix64 rng(0x5eed0208);
    SignedInput in = random_input(rng);
    CHECK(overhead_bytes(in) == 84);  // 64-byte signature + five 4-byte integers

    SignedResponse resp = random_response(rng);
    CHECK(overhead_bytes(resp) == 72);
    CHECK(overhead_bytes(resp) <= 84);

    Termination t;
    CHECK(overhead_bytes(t) == 68);

    // Every protocol message stays within the 84-byte budget.
    for (int i = 0; i < 200; ++i) {
        WireMessage m = random_message(rng);
        CHECK(overhead_bytes(m) <= 84);
    }
}
