#include "verimark/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace verimark {

namespace {

void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) throw std::runtime_error("libsodium initialization failed");
}

}  // namespace

Digest32 Digest32::from_bytes(ByteSpan raw) {
    if (raw.size() != 32) throw std::invalid_argument("digest must be exactly 32 bytes");
    Digest32 d;
    std::copy(raw.begin(), raw.end(), d.bytes.begin());
    return d;
}

PublicKey PublicKey::from_bytes(ByteSpan raw) {
    if (raw.size() != 32) throw std::invalid_argument("public key must be exactly 32 bytes");
    PublicKey pk;
    std::copy(raw.begin(), raw.end(), pk.bytes.begin());
    return pk;
}

Signature64 Signature64::from_bytes(ByteSpan raw) {
    if (raw.size() != 64) throw std::invalid_argument("signature must be exactly 64 bytes");
    Signature64 sig;
    std::copy(raw.begin(), raw.end(), sig.bytes.begin());
    return sig;
}

KeyPair KeyPair::from_seed(ByteSpan seed32) {
    ensure_sodium();
    if (seed32.size() != crypto_sign_SEEDBYTES)
        throw std::invalid_argument("key seed must be exactly 32 bytes");
    KeyPair kp;
    crypto_sign_seed_keypair(kp.public_key_.bytes.data(), kp.secret_.data(), seed32.data());
    return kp;
}

Signature64 KeyPair::sign(ByteSpan message) const {
    Signature64 sig;
    crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                         secret_.data());
    return sig;
}

Digest32 sha256(ByteSpan data) {
    ensure_sodium();
    Digest32 out;
    crypto_hash_sha256(out.bytes.data(), data.data(), data.size());
    return out;
}

bool verify(const PublicKey& key, ByteSpan message, const Signature64& sig) {
    ensure_sodium();
    return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(),
                                       key.bytes.data()) == 0;
}

Digest32 response_leaf(std::uint32_t input_index, ByteSpan payload) {
    Bytes preimage;
    preimage.reserve(4 + payload.size());
    put_u32(preimage, input_index);
    put_bytes(preimage, payload);
    return sha256(preimage);
}

namespace {

Digest32 hash_pair(const Digest32& left, const Digest32& right) {
    Bytes joined;
    joined.reserve(64);
    put_bytes(joined, left.span());
    put_bytes(joined, right.span());
    return sha256(joined);
}

}  // namespace

MerkleTree MerkleTree::build(std::vector<Digest32> leaves) {
    if (leaves.empty()) throw std::invalid_argument("merkle tree needs at least one leaf");
    MerkleTree tree;
    tree.levels_.push_back(std::move(leaves));
    while (tree.levels_.back().size() > 1) {
        const auto& prev = tree.levels_.back();
        std::vector<Digest32> next;
        next.reserve((prev.size() + 1) / 2);
        for (std::size_t i = 0; i < prev.size(); i += 2) {
            const Digest32& left = prev[i];
            const Digest32& right = (i + 1 < prev.size()) ? prev[i + 1] : prev[i];
            next.push_back(hash_pair(left, right));
        }
        tree.levels_.push_back(std::move(next));
    }
    return tree;
}

AuthPath MerkleTree::prove(std::size_t index) const {
    if (index >= leaf_count()) throw std::out_of_range("merkle proof index out of range");
    AuthPath path;
    std::size_t pos = index;
    for (std::size_t level = 0; level + 1 < levels_.size(); ++level) {
        const auto& nodes = levels_[level];
        std::size_t sibling = pos ^ 1;
        if (sibling >= nodes.size()) sibling = pos;  // odd node pairs with itself
        path.nodes.push_back({nodes[sibling], (pos & 1) == 0});
        pos >>= 1;
    }
    return path;
}

bool merkle_verify(const Digest32& root, const Digest32& leaf, std::size_t index,
                   const AuthPath& path) {
    // An index outside the tree implied by the path length cannot be valid.
    if (path.nodes.size() < 64 && (index >> path.nodes.size()) != 0) return false;
    Digest32 acc = leaf;
    std::size_t pos = index;
    for (const AuthPathNode& node : path.nodes) {
        bool expect_right = (pos & 1) == 0;
        if (node.sibling_is_right != expect_right) return false;
        acc = expect_right ? hash_pair(acc, node.sibling) : hash_pair(node.sibling, acc);
        pos >>= 1;
    }
    return acc == root;
}

}  // namespace verimark
