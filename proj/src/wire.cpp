#include "verimark/wire.hpp"

#include <algorithm>

namespace verimark {

namespace {

constexpr std::size_t kMaxPayload = 1 << 20;
constexpr std::size_t kMaxPathLen = 64;
constexpr std::size_t kMaxListLen = 4096;

void put_tag(Bytes& out, MsgTag tag) { out.push_back(static_cast<std::uint8_t>(tag)); }

void put_payload(Bytes& out, ByteSpan payload) {
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    put_bytes(out, payload);
}

Digest32 read_digest(ByteReader& r) { return Digest32::from_bytes(r.take(32)); }
PublicKey read_pk(ByteReader& r) { return PublicKey::from_bytes(r.take(32)); }
Signature64 read_sig(ByteReader& r) { return Signature64::from_bytes(r.take(64)); }

Bytes read_payload(ByteReader& r) {
    std::size_t at = r.offset();
    std::uint32_t len = r.u32();
    if (len > kMaxPayload) throw MalformedMessage("payload length exceeds limit", at);
    ByteSpan raw = r.take(len);
    return Bytes(raw.begin(), raw.end());
}

}  // namespace

const char* tag_name(MsgTag tag) {
    switch (tag) {
        case MsgTag::SignedInput: return "signed_input";
        case MsgTag::SignedResponse: return "signed_response";
        case MsgTag::RootCommitment: return "root_commitment";
        case MsgTag::MembershipChallenge: return "membership_challenge";
        case MsgTag::MembershipProof: return "membership_proof";
        case MsgTag::Termination: return "termination";
        case MsgTag::OutsourcerCommit: return "outsourcer_commit";
        case MsgTag::ContractorCommit: return "contractor_commit";
        case MsgTag::BatchedResponse: return "batched_response";
        case MsgTag::ContestResponse: return "contest_response";
        case MsgTag::Review: return "review";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Preimages. For messages whose encoding ends with the signature, the
// preimage is exactly the encoding minus the trailing 64 bytes.
// ---------------------------------------------------------------------------

Bytes input_sig_preimage(const Digest32& contract_ref, std::uint32_t input_index,
                         std::uint32_t ack_count, std::uint32_t interval_id,
                         std::uint32_t flags, ByteSpan payload) {
    Bytes out;
    out.reserve(53 + payload.size());
    put_tag(out, MsgTag::SignedInput);
    put_bytes(out, contract_ref.span());
    put_u32(out, input_index);
    put_u32(out, ack_count);
    put_u32(out, interval_id);
    put_u32(out, flags);
    put_payload(out, payload);
    return out;
}

Bytes input_sig_preimage(const SignedInput& msg) {
    return input_sig_preimage(msg.contract_ref, msg.input_index, msg.ack_count,
                              msg.interval_id, msg.flags, msg.payload);
}

Bytes response_sig_preimage(const Digest32& contract_ref, std::uint32_t input_index,
                            const Signature64& input_sig, ByteSpan payload) {
    Bytes out;
    out.reserve(105 + payload.size());
    put_tag(out, MsgTag::SignedResponse);
    put_bytes(out, contract_ref.span());
    put_u32(out, input_index);
    put_payload(out, payload);
    put_bytes(out, input_sig.span());
    return out;
}

Bytes response_sig_preimage(const SignedResponse& msg) {
    return response_sig_preimage(msg.contract_ref, msg.input_index, msg.input_sig,
                                 msg.payload);
}

Bytes root_commitment_preimage(const RootCommitment& msg) {
    Bytes out;
    out.reserve(77);
    put_tag(out, MsgTag::RootCommitment);
    put_bytes(out, msg.contract_ref.span());
    put_u32(out, msg.batch_id);
    put_u32(out, msg.first_index);
    put_u32(out, msg.leaf_count);
    put_bytes(out, msg.root.span());
    return out;
}

Bytes membership_challenge_preimage(const MembershipChallenge& msg) {
    Bytes out;
    out.reserve(41);
    put_tag(out, MsgTag::MembershipChallenge);
    put_bytes(out, msg.contract_ref.span());
    put_u32(out, msg.batch_id);
    put_u32(out, msg.challenged_index);
    return out;
}

Bytes membership_proof_preimage(const MembershipChallenge& challenge, ByteSpan payload) {
    Bytes out;
    Bytes challenge_bytes = encode(challenge);
    out.reserve(1 + challenge_bytes.size() + 4 + payload.size());
    put_tag(out, MsgTag::MembershipProof);
    put_bytes(out, challenge_bytes);
    put_payload(out, payload);
    return out;
}

Bytes termination_preimage(const Termination& msg) {
    Bytes out;
    out.reserve(37);
    put_tag(out, MsgTag::Termination);
    put_bytes(out, msg.contract_ref.span());
    put_u32(out, msg.final_ack);
    return out;
}

Bytes outsourcer_commit_preimage(const Digest32& x_hash, const Digest32& contract_ref) {
    Bytes out;
    out.reserve(65);
    put_tag(out, MsgTag::OutsourcerCommit);
    put_bytes(out, x_hash.span());
    put_bytes(out, contract_ref.span());
    return out;
}

Bytes randomization_m_encoding(const std::array<std::uint8_t, 32>& y,
                               const std::vector<PublicKey>& verifier_list) {
    Bytes out;
    out.reserve(36 + 32 * verifier_list.size());
    put_bytes(out, ByteSpan(y.data(), y.size()));
    put_u32(out, static_cast<std::uint32_t>(verifier_list.size()));
    for (const PublicKey& pk : verifier_list) put_bytes(out, pk.span());
    return out;
}

Bytes contractor_commit_preimage(const Digest32& x_hash, const Digest32& contract_ref,
                                 const Digest32& m_hash) {
    Bytes out;
    out.reserve(97);
    put_tag(out, MsgTag::ContractorCommit);
    put_bytes(out, x_hash.span());
    put_bytes(out, contract_ref.span());
    put_bytes(out, m_hash.span());
    return out;
}

Bytes contest_response_preimage(const Digest32& input_digest, ByteSpan payload) {
    Bytes out;
    out.reserve(37 + payload.size());
    put_tag(out, MsgTag::ContestResponse);
    put_bytes(out, input_digest.span());
    put_payload(out, payload);
    return out;
}

Bytes review_preimage(const Digest32& contract_ref, const PublicKey& about,
                      std::int8_t score) {
    Bytes out;
    out.reserve(66);
    put_tag(out, MsgTag::Review);
    put_bytes(out, contract_ref.span());
    put_bytes(out, about.span());
    put_u8(out, static_cast<std::uint8_t>(score));
    return out;
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

Bytes encode(const SignedInput& msg) {
    Bytes out = input_sig_preimage(msg);
    put_bytes(out, msg.sig.span());
    return out;
}

Bytes encode(const SignedResponse& msg) {
    // Field order on the wire: payload before input_sig before sig, so the
    // preimage is again the encoding minus the trailing signature.
    Bytes out = response_sig_preimage(msg);
    put_bytes(out, msg.sig.span());
    return out;
}

Bytes encode(const RootCommitment& msg) {
    Bytes out = root_commitment_preimage(msg);
    put_bytes(out, msg.sig.span());
    return out;
}

Bytes encode(const MembershipChallenge& msg) {
    Bytes out = membership_challenge_preimage(msg);
    put_bytes(out, msg.sig.span());
    return out;
}

Bytes encode(const MembershipProof& msg) {
    Bytes out;
    put_tag(out, MsgTag::MembershipProof);
    put_bytes(out, msg.contract_ref.span());
    put_u32(out, msg.batch_id);
    put_u32(out, msg.challenged_index);
    put_payload(out, msg.payload);
    put_u32(out, static_cast<std::uint32_t>(msg.path.nodes.size()));
    for (const AuthPathNode& node : msg.path.nodes) {
        put_u8(out, node.sibling_is_right ? 1 : 0);
        put_bytes(out, node.sibling.span());
    }
    put_bytes(out, msg.sig.span());
    return out;
}

Bytes encode(const Termination& msg) {
    Bytes out = termination_preimage(msg);
    put_bytes(out, msg.sig.span());
    return out;
}

Bytes encode(const OutsourcerCommit& msg) {
    Bytes out = outsourcer_commit_preimage(msg.x_hash, msg.contract_ref);
    put_bytes(out, msg.sig.span());
    return out;
}

Bytes encode(const ContractorCommit& msg) {
    Bytes out;
    out.reserve(169 + 32 * msg.verifier_list.size());
    put_tag(out, MsgTag::ContractorCommit);
    put_bytes(out, msg.x_hash.span());
    put_bytes(out, msg.contract_ref.span());
    put_bytes(out, ByteSpan(msg.y.data(), msg.y.size()));
    put_u32(out, static_cast<std::uint32_t>(msg.verifier_list.size()));
    for (const PublicKey& pk : msg.verifier_list) put_bytes(out, pk.span());
    put_bytes(out, msg.sig.span());
    return out;
}

Bytes encode(const BatchedResponse& msg) {
    Bytes out;
    out.reserve(41 + msg.payload.size());
    put_tag(out, MsgTag::BatchedResponse);
    put_bytes(out, msg.contract_ref.span());
    put_u32(out, msg.input_index);
    put_payload(out, msg.payload);
    return out;
}

Bytes encode(const WireMessage& msg) {
    return std::visit([](const auto& m) { return encode(m); }, msg);
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

namespace {

WireMessage decode_body(MsgTag tag, ByteReader& r) {
    switch (tag) {
        case MsgTag::SignedInput: {
            SignedInput m;
            m.contract_ref = read_digest(r);
            m.input_index = r.u32();
            m.ack_count = r.u32();
            m.interval_id = r.u32();
            m.flags = r.u32();
            m.payload = read_payload(r);
            m.sig = read_sig(r);
            return m;
        }
        case MsgTag::SignedResponse: {
            SignedResponse m;
            m.contract_ref = read_digest(r);
            m.input_index = r.u32();
            m.payload = read_payload(r);
            m.input_sig = read_sig(r);
            m.sig = read_sig(r);
            return m;
        }
        case MsgTag::RootCommitment: {
            RootCommitment m;
            m.contract_ref = read_digest(r);
            m.batch_id = r.u32();
            m.first_index = r.u32();
            m.leaf_count = r.u32();
            m.root = read_digest(r);
            m.sig = read_sig(r);
            return m;
        }
        case MsgTag::MembershipChallenge: {
            MembershipChallenge m;
            m.contract_ref = read_digest(r);
            m.batch_id = r.u32();
            m.challenged_index = r.u32();
            m.sig = read_sig(r);
            return m;
        }
        case MsgTag::MembershipProof: {
            MembershipProof m;
            m.contract_ref = read_digest(r);
            m.batch_id = r.u32();
            m.challenged_index = r.u32();
            m.payload = read_payload(r);
            std::size_t at = r.offset();
            std::uint32_t path_len = r.u32();
            if (path_len > kMaxPathLen) throw MalformedMessage("auth path too long", at);
            m.path.nodes.reserve(path_len);
            for (std::uint32_t i = 0; i < path_len; ++i) {
                AuthPathNode node;
                std::size_t flag_at = r.offset();
                std::uint8_t flag = r.u8();
                if (flag > 1) throw MalformedMessage("invalid path side flag", flag_at);
                node.sibling_is_right = flag == 1;
                node.sibling = read_digest(r);
                m.path.nodes.push_back(node);
            }
            m.sig = read_sig(r);
            return m;
        }
        case MsgTag::Termination: {
            Termination m;
            m.contract_ref = read_digest(r);
            m.final_ack = r.u32();
            m.sig = read_sig(r);
            return m;
        }
        case MsgTag::OutsourcerCommit: {
            OutsourcerCommit m;
            m.x_hash = read_digest(r);
            m.contract_ref = read_digest(r);
            m.sig = read_sig(r);
            return m;
        }
        case MsgTag::ContractorCommit: {
            ContractorCommit m;
            m.x_hash = read_digest(r);
            m.contract_ref = read_digest(r);
            ByteSpan y = r.take(32);
            std::copy(y.begin(), y.end(), m.y.begin());
            std::size_t at = r.offset();
            std::uint32_t count = r.u32();
            if (count > kMaxListLen) throw MalformedMessage("verifier list too long", at);
            m.verifier_list.reserve(count);
            for (std::uint32_t i = 0; i < count; ++i) m.verifier_list.push_back(read_pk(r));
            m.sig = read_sig(r);
            return m;
        }
        case MsgTag::BatchedResponse: {
            BatchedResponse m;
            m.contract_ref = read_digest(r);
            m.input_index = r.u32();
            m.payload = read_payload(r);
            return m;
        }
        default:
            throw MalformedMessage("unknown message tag", 0);
    }
}

}  // namespace

WireMessage decode_message(ByteSpan bytes) {
    ByteReader r(bytes);
    try {
        std::size_t tag_at = r.offset();
        std::uint8_t raw_tag = r.u8();
        if (raw_tag < 0x01 || raw_tag > 0x09)
            throw MalformedMessage("unknown message tag", tag_at);
        WireMessage msg = decode_body(static_cast<MsgTag>(raw_tag), r);
        if (!r.at_end()) throw MalformedMessage("trailing bytes after message", r.offset());
        return msg;
    } catch (const ByteReader::ShortBuffer& short_buf) {
        throw MalformedMessage("message truncated", short_buf.offset);
    }
}

// ---------------------------------------------------------------------------
// Overhead accounting: own signature + 4-byte integer fields.
// ---------------------------------------------------------------------------

std::size_t overhead_bytes(const SignedInput&) { return 64 + 5 * 4; }
std::size_t overhead_bytes(const SignedResponse&) { return 64 + 2 * 4; }
std::size_t overhead_bytes(const RootCommitment&) { return 64 + 3 * 4; }
std::size_t overhead_bytes(const MembershipChallenge&) { return 64 + 2 * 4; }
std::size_t overhead_bytes(const MembershipProof&) { return 64 + 4 * 4; }
std::size_t overhead_bytes(const Termination&) { return 64 + 1 * 4; }
std::size_t overhead_bytes(const OutsourcerCommit&) { return 64; }
std::size_t overhead_bytes(const ContractorCommit&) { return 64 + 1 * 4; }
std::size_t overhead_bytes(const BatchedResponse&) { return 2 * 4; }

std::size_t overhead_bytes(const WireMessage& msg) {
    return std::visit([](const auto& m) { return overhead_bytes(m); }, msg);
}

}  // namespace verimark
