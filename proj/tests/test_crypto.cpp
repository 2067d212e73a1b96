#include <doctest.h>

#include <cmath>
#include <set>

#include "verimark/crypto.hpp"
#include "verimark/rng.hpp"

using namespace verimark;

namespace {

Bytes seed_bytes(SplitMix64& rng) { return rng.bytes(32); }

}  // namespace

TEST_CASE("sha256 is deterministic and matches the published empty-string vector") {
    Bytes data = {1, 2, 3, 4, 5};
    CHECK(sha256(data) == sha256(data));

    // FIPS 180-4 test vector for SHA-256("").
    CHECK(sha256(ByteSpan{}).hex() ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("sha256 separates a value from its zero-extended form") {
    SplitMix64 rng(0x5eed0001);
    for (int i = 0; i < 10000; ++i) {
        Bytes x = rng.bytes(1 + rng.below(48));
        Bytes extended = x;
        extended.push_back(0x00);
        CHECK(sha256(x) != sha256(extended));
    }
}

TEST_CASE("keypair derivation is deterministic per seed and distinct across seeds") {
    SplitMix64 rng(0x5eed0002);
    Bytes seed = seed_bytes(rng);
    CHECK(KeyPair::from_seed(seed).public_key() == KeyPair::from_seed(seed).public_key());

    std::set<PublicKey> keys;
    for (int i = 0; i < 1000; ++i) keys.insert(KeyPair::from_seed(seed_bytes(rng)).public_key());
    CHECK(keys.size() == 1000);

    CHECK_THROWS_AS(KeyPair::from_seed(rng.bytes(31)), std::invalid_argument);
    CHECK_THROWS_AS(KeyPair::from_seed(rng.bytes(33)), std::invalid_argument);
}

TEST_CASE("sign/verify round trip, bit-flip and wrong-key rejection") {
    SplitMix64 rng(0x5eed0003);
    KeyPair kp = KeyPair::from_seed(seed_bytes(rng));
    KeyPair other = KeyPair::from_seed(seed_bytes(rng));
    Bytes msg = rng.bytes(64);
    Signature64 sig = kp.sign(msg);

    CHECK(verify(kp.public_key(), msg, sig));

    Bytes flipped = msg;
    flipped[10] ^= 0x04;
    CHECK_FALSE(verify(kp.public_key(), flipped, sig));

    Signature64 broken = sig;
    broken.bytes[3] ^= 0x80;
    CHECK_FALSE(verify(kp.public_key(), msg, broken));

    CHECK_FALSE(verify(other.public_key(), msg, sig));

    CHECK_THROWS_AS(Signature64::from_bytes(rng.bytes(63)), std::invalid_argument);
    CHECK_THROWS_AS(PublicKey::from_bytes(rng.bytes(31)), std::invalid_argument);
}

TEST_CASE("signature scheme bulk round trips and tamper rejection") {
    SplitMix64 rng(0x5eed0004);
    int round_trips = 0;
    int tampered_accepted = 0;
    for (int i = 0; i < 1000; ++i) {
        KeyPair kp = KeyPair::from_seed(seed_bytes(rng));
        Bytes msg = rng.bytes(1 + rng.below(96));
        Signature64 sig = kp.sign(msg);
        round_trips += verify(kp.public_key(), msg, sig);

        Bytes tampered = msg;
        tampered[rng.below(tampered.size())] ^= static_cast<std::uint8_t>(1 + rng.below(255));
        tampered_accepted += verify(kp.public_key(), tampered, sig);
    }
    CHECK(round_trips == 1000);
    CHECK(tampered_accepted == 0);
}

TEST_CASE("merkle single leaf: root is the leaf, path empty") {
    Digest32 leaf = sha256(Bytes{42});
    MerkleTree tree = MerkleTree::build({leaf});
    CHECK(tree.root() == leaf);
    AuthPath path = tree.prove(0);
    CHECK(path.nodes.empty());
    CHECK(merkle_verify(tree.root(), leaf, 0, path));
    CHECK_FALSE(merkle_verify(tree.root(), leaf, 1, path));
}

TEST_CASE("merkle proof length is ceil(log2(n)); 8 leaves give length 3") {
    std::vector<Digest32> leaves;
    for (int i = 0; i < 8; ++i) leaves.push_back(sha256(Bytes{static_cast<std::uint8_t>(i)}));
    MerkleTree tree = MerkleTree::build(leaves);
    for (std::size_t i = 0; i < 8; ++i) CHECK(tree.prove(i).nodes.size() == 3);
}

TEST_CASE("merkle wrong claimed index never verifies (n <= 8, exhaustive)") {
    for (std::size_t n = 1; n <= 8; ++n) {
        std::vector<Digest32> leaves;
        for (std::size_t i = 0; i < n; ++i)
            leaves.push_back(sha256(Bytes{static_cast<std::uint8_t>(i), 0x33}));
        MerkleTree tree = MerkleTree::build(leaves);
        for (std::size_t actual = 0; actual < n; ++actual) {
            AuthPath path = tree.prove(actual);
            for (std::size_t claimed = 0; claimed < n; ++claimed) {
                bool ok = merkle_verify(tree.root(), leaves[actual], claimed, path);
                CHECK(ok == (claimed == actual));
            }
        }
    }
}

TEST_CASE("merkle prove/verify round-trips and any mutation fails (n <= 64)") {
    SplitMix64 rng(0x5eed0005);
    for (std::size_t n = 1; n <= 64; ++n) {
        std::vector<Digest32> leaves;
        for (std::size_t i = 0; i < n; ++i) {
            Bytes material = rng.bytes(16);
            material.push_back(static_cast<std::uint8_t>(i));
            leaves.push_back(sha256(material));
        }
        MerkleTree tree = MerkleTree::build(leaves);
        std::size_t expected_len =
            n == 1 ? 0 : static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n))));

        for (std::size_t i = 0; i < n; ++i) {
            AuthPath path = tree.prove(i);
            REQUIRE(path.nodes.size() == expected_len);
            REQUIRE(merkle_verify(tree.root(), leaves[i], i, path));

            // Sampled byte mutations: leaf, root, one path digest, one flag.
            Digest32 bad_leaf = leaves[i];
            bad_leaf.bytes[rng.below(32)] ^= 0x01;
            CHECK_FALSE(merkle_verify(tree.root(), bad_leaf, i, path));

            Digest32 bad_root = tree.root();
            bad_root.bytes[rng.below(32)] ^= 0x01;
            CHECK_FALSE(merkle_verify(bad_root, leaves[i], i, path));

            if (!path.nodes.empty()) {
                AuthPath bad_path = path;
                std::size_t node = rng.below(bad_path.nodes.size());
                bad_path.nodes[node].sibling.bytes[rng.below(32)] ^= 0x01;
                CHECK_FALSE(merkle_verify(tree.root(), leaves[i], i, bad_path));

                AuthPath flipped_flag = path;
                flipped_flag.nodes[node].sibling_is_right =
                    !flipped_flag.nodes[node].sibling_is_right;
                CHECK_FALSE(merkle_verify(tree.root(), leaves[i], i, flipped_flag));
            }
        }
    }

    CHECK_THROWS_AS(MerkleTree::build({}), std::invalid_argument);
    MerkleTree small = MerkleTree::build({sha256(Bytes{1}), sha256(Bytes{2})});
    CHECK_THROWS_AS(small.prove(2), std::out_of_range);
}

TEST_CASE("response leaf binds both index and payload") {
    Bytes payload = {9, 9, 9};
    CHECK(response_leaf(7, payload) == response_leaf(7, payload));
    CHECK(response_leaf(7, payload) != response_leaf(8, payload));
    Bytes other = payload;
    other[0] ^= 1;
    CHECK(response_leaf(7, payload) != response_leaf(7, other));
}
