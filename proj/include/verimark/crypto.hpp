#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "verimark/bytes.hpp"

namespace verimark {

/// 32-byte hash value. Equality is byte equality.
struct Digest32 {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest32&) const = default;
    std::string hex() const { return to_hex(bytes); }
    ByteSpan span() const { return ByteSpan(bytes.data(), bytes.size()); }

    static Digest32 from_bytes(ByteSpan raw);
};

/// Ed25519 verification key, 32 bytes.
struct PublicKey {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const PublicKey&) const = default;
    std::string hex() const { return to_hex(bytes); }
    ByteSpan span() const { return ByteSpan(bytes.data(), bytes.size()); }

    static PublicKey from_bytes(ByteSpan raw);
};

/// Ed25519 detached signature, 64 bytes.
struct Signature64 {
    std::array<std::uint8_t, 64> bytes{};

    auto operator<=>(const Signature64&) const = default;
    ByteSpan span() const { return ByteSpan(bytes.data(), bytes.size()); }

    static Signature64 from_bytes(ByteSpan raw);
};

/// Signing key pair deterministically derived from a 32-byte seed. The
/// expanded secret never leaves this object; wire messages carry only
/// public keys and signatures.
class KeyPair {
public:
    KeyPair() = default;  // empty key material; usable only after from_seed
    static KeyPair from_seed(ByteSpan seed32);

    const PublicKey& public_key() const { return public_key_; }
    Signature64 sign(ByteSpan message) const;

private:
    PublicKey public_key_;
    std::array<std::uint8_t, 64> secret_{};
};

Digest32 sha256(ByteSpan data);
bool verify(const PublicKey& key, ByteSpan message, const Signature64& sig);

/// Leaf preimage for batched response commitments:
/// sha256(input_index as 4-byte little-endian || response payload).
/// Producers and settlement must agree on this bit-exactly.
Digest32 response_leaf(std::uint32_t input_index, ByteSpan payload);

struct AuthPathNode {
    Digest32 sibling;
    bool sibling_is_right = false;

    bool operator==(const AuthPathNode&) const = default;
};

/// Membership proof path, leaf-adjacent node first.
struct AuthPath {
    std::vector<AuthPathNode> nodes;

    bool operator==(const AuthPath&) const = default;
};

/// Binary hash tree over a fixed leaf list. A level with an odd node count
/// pairs the last node with itself; the root of a 1-leaf tree is that leaf.
class MerkleTree {
public:
    static MerkleTree build(std::vector<Digest32> leaves);

    const Digest32& root() const { return levels_.back().front(); }
    std::size_t leaf_count() const { return levels_.front().size(); }
    AuthPath prove(std::size_t index) const;

private:
    MerkleTree() = default;
    std::vector<std::vector<Digest32>> levels_;  // levels_[0] = leaves
};

bool merkle_verify(const Digest32& root, const Digest32& leaf, std::size_t index,
                   const AuthPath& path);

}  // namespace verimark
