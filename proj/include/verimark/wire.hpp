#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "verimark/bytes.hpp"
#include "verimark/crypto.hpp"

namespace verimark {

/// Domain-separation tag; the first byte of every encoded message and of
/// every signature preimage. Byte layouts are specified in PROTOCOL.md.
enum class MsgTag : std::uint8_t {
    SignedInput = 0x01,
    SignedResponse = 0x02,
    RootCommitment = 0x03,
    MembershipChallenge = 0x04,
    MembershipProof = 0x05,
    Termination = 0x06,
    OutsourcerCommit = 0x07,
    ContractorCommit = 0x08,
    BatchedResponse = 0x09,
    // Preimage-only domains (never routed as standalone wire messages).
    ContestResponse = 0x0a,
    Review = 0x0b,
};

const char* tag_name(MsgTag tag);

struct MalformedMessage : std::runtime_error {
    MalformedMessage(std::string what, std::size_t offset_)
        : std::runtime_error(std::move(what) + " (offset " + std::to_string(offset_) + ")"),
          offset(offset_) {}
    std::size_t offset;
};

// ---------------------------------------------------------------------------
// Message types
// ---------------------------------------------------------------------------

/// Outsourcer -> worker. The signature is the payment promise: it covers
/// the contract hash, the input index, the count of acknowledged outputs,
/// the interval id, the flags word, and the input payload.
struct SignedInput {
    Digest32 contract_ref;
    std::uint32_t input_index = 0;
    std::uint32_t ack_count = 0;
    std::uint32_t interval_id = 0;
    std::uint32_t flags = 0;
    Bytes payload;
    Signature64 sig;

    bool operator==(const SignedInput&) const = default;
};

/// Worker -> Outsourcer. Countersigns the Outsourcer's input signature,
/// committing the responder to the exact raw input it processed.
struct SignedResponse {
    Digest32 contract_ref;
    std::uint32_t input_index = 0;
    Bytes payload;
    Signature64 input_sig;
    Signature64 sig;

    bool operator==(const SignedResponse&) const = default;
};

/// Worker -> Outsourcer when batching: one signature commits to a whole
/// batch of response leaves.
struct RootCommitment {
    Digest32 contract_ref;
    std::uint32_t batch_id = 0;
    std::uint32_t first_index = 0;
    std::uint32_t leaf_count = 0;
    Digest32 root;
    Signature64 sig;

    bool operator==(const RootCommitment&) const = default;
};

struct MembershipChallenge {
    Digest32 contract_ref;
    std::uint32_t batch_id = 0;
    std::uint32_t challenged_index = 0;  // global input index
    Signature64 sig;

    bool operator==(const MembershipChallenge&) const = default;
};

struct MembershipProof {
    Digest32 contract_ref;
    std::uint32_t batch_id = 0;
    std::uint32_t challenged_index = 0;
    Bytes payload;
    AuthPath path;
    Signature64 sig;  // over (encoded challenge || payload)

    bool operator==(const MembershipProof&) const = default;
};

struct Termination {
    Digest32 contract_ref;
    std::uint32_t final_ack = 0;
    Signature64 sig;

    bool operator==(const Termination&) const = default;
};

/// Randomization step 1: commitment to the random value x (Fig. 1 of the
/// protocol write-up in PROTOCOL.md). Carries h(x), never x.
struct OutsourcerCommit {
    Digest32 x_hash;
    Digest32 contract_ref;
    Signature64 sig;

    bool operator==(const OutsourcerCommit&) const = default;
};

/// Randomization step 2: the Contractor commits to (x, y, verifier list)
/// without knowing x.
struct ContractorCommit {
    Digest32 x_hash;
    Digest32 contract_ref;
    std::array<std::uint8_t, 32> y{};
    std::vector<PublicKey> verifier_list;  // strictly ascending by key bytes
    Signature64 sig;

    bool operator==(const ContractorCommit&) const = default;
};

/// Unsigned per-input response record used while batching; the signature
/// arrives later in the batch's RootCommitment.
struct BatchedResponse {
    Digest32 contract_ref;
    std::uint32_t input_index = 0;
    Bytes payload;

    bool operator==(const BatchedResponse&) const = default;
};

using WireMessage =
    std::variant<SignedInput, SignedResponse, RootCommitment, MembershipChallenge,
                 MembershipProof, Termination, OutsourcerCommit, ContractorCommit,
                 BatchedResponse>;

// ---------------------------------------------------------------------------
// Signature preimages
// ---------------------------------------------------------------------------

Bytes input_sig_preimage(const Digest32& contract_ref, std::uint32_t input_index,
                         std::uint32_t ack_count, std::uint32_t interval_id,
                         std::uint32_t flags, ByteSpan payload);
Bytes input_sig_preimage(const SignedInput& msg);

Bytes response_sig_preimage(const Digest32& contract_ref, std::uint32_t input_index,
                            const Signature64& input_sig, ByteSpan payload);
Bytes response_sig_preimage(const SignedResponse& msg);

Bytes root_commitment_preimage(const RootCommitment& msg);
Bytes membership_challenge_preimage(const MembershipChallenge& msg);
Bytes membership_proof_preimage(const MembershipChallenge& challenge, ByteSpan payload);
Bytes termination_preimage(const Termination& msg);
Bytes outsourcer_commit_preimage(const Digest32& x_hash, const Digest32& contract_ref);

/// Canonical encoding of the Contractor's committed message m:
/// [y:32][count:4][keys:32 each, ascending].
Bytes randomization_m_encoding(const std::array<std::uint8_t, 32>& y,
                               const std::vector<PublicKey>& verifier_list);
Bytes contractor_commit_preimage(const Digest32& x_hash, const Digest32& contract_ref,
                                 const Digest32& m_hash);

/// Fresh-verifier signature during contestation: binds the response to the
/// digest of the exact input that was re-outsourced.
Bytes contest_response_preimage(const Digest32& input_digest, ByteSpan payload);

Bytes review_preimage(const Digest32& contract_ref, const PublicKey& about,
                      std::int8_t score);

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

Bytes encode(const SignedInput& msg);
Bytes encode(const SignedResponse& msg);
Bytes encode(const RootCommitment& msg);
Bytes encode(const MembershipChallenge& msg);
Bytes encode(const MembershipProof& msg);
Bytes encode(const Termination& msg);
Bytes encode(const OutsourcerCommit& msg);
Bytes encode(const ContractorCommit& msg);
Bytes encode(const BatchedResponse& msg);
Bytes encode(const WireMessage& msg);

/// Parses one complete message. Throws MalformedMessage on unknown tags,
/// truncation, or trailing bytes; the offset points at the failure.
WireMessage decode_message(ByteSpan bytes);

// ---------------------------------------------------------------------------
// Overhead accounting
// ---------------------------------------------------------------------------

/// Non-payload overhead counted the way the performance claim counts it:
/// the message's own signature plus its 4-byte integer fields. Digest
/// references and countersigned signatures are excluded here but included
/// in the full wire size (encode().size()).
std::size_t overhead_bytes(const WireMessage& msg);
std::size_t overhead_bytes(const SignedInput&);
std::size_t overhead_bytes(const SignedResponse&);
std::size_t overhead_bytes(const RootCommitment&);
std::size_t overhead_bytes(const MembershipChallenge&);
std::size_t overhead_bytes(const MembershipProof&);
std::size_t overhead_bytes(const Termination&);
std::size_t overhead_bytes(const OutsourcerCommit&);
std::size_t overhead_bytes(const ContractorCommit&);
std::size_t overhead_bytes(const BatchedResponse&);

}  // namespace verimark
