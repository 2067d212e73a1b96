#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "verimark/crypto.hpp"
#include "verimark/wire.hpp"

namespace verimark {

/// Commit-reveal selection of the Verifier. The Outsourcer commits to a
/// random x via h(x); the Contractor commits to (x, y, verifier list)
/// without learning x; the Verifier at index (x + y) mod n is selected.
/// Neither side alone controls the outcome, and the Contractor never
/// learns which Verifier was picked.

std::array<std::uint8_t, 32> random_value(class SplitMix64& rng);

OutsourcerCommit outsourcer_commit(const std::array<std::uint8_t, 32>& x,
                                   const Digest32& contract_ref, const KeyPair& outsourcer);

/// Throws std::invalid_argument on an unsorted/duplicated list or a commit
/// whose signature does not verify.
ContractorCommit contractor_commit(const OutsourcerCommit& commit,
                                   const std::array<std::uint8_t, 32>& y,
                                   std::vector<PublicKey> verifier_list,
                                   const KeyPair& contractor,
                                   const PublicKey& outsourcer_pk);

bool verifier_list_sorted(const std::vector<PublicKey>& list);

/// Index (int(x) + int(y)) mod n with x, y read as unsigned big-endian
/// integers. Throws on an empty list.
std::pair<std::size_t, PublicKey> select_verifier(const std::array<std::uint8_t, 32>& x,
                                                  const std::array<std::uint8_t, 32>& y,
                                                  const std::vector<PublicKey>& verifier_list);

/// Jaccard similarity |a ∩ b| / |a ∪ b| over key sets.
double list_similarity(const std::vector<PublicKey>& a, const std::vector<PublicKey>& b);

enum class SelectionReject {
    HashMismatch,
    BadOutsourcerSignature,
    BadContractorSignature,
    ContextMismatch,
    EmptyList,
    UnsortedList,
    ListDivergence,
};

const char* selection_reject_name(SelectionReject reason);

struct SelectionDecision {
    bool accepted = false;
    std::size_t index = 0;
    PublicKey verifier;
    SelectionReject reason = SelectionReject::HashMismatch;

    static SelectionDecision accept(std::size_t index, PublicKey verifier);
    static SelectionDecision reject(SelectionReject reason);
};

/// Checks the full transcript: h(x) matches the commitment, both
/// signatures verify in the same contract context, and the committed
/// verifier list agrees with `local_list` at least to
/// `similarity_threshold`. On acceptance carries the selected index.
SelectionDecision verify_selection(const OutsourcerCommit& oc, const ContractorCommit& cc,
                                   const std::array<std::uint8_t, 32>& revealed_x,
                                   const std::vector<PublicKey>& local_list,
                                   double similarity_threshold,
                                   const PublicKey& outsourcer_pk,
                                   const PublicKey& contractor_pk);

/// Transcript the Outsourcer must present when a dispute reaches
/// contestation: proves it contacted the Verifier the protocol selected.
struct EntryProof {
    OutsourcerCommit commit;
    ContractorCommit counter_commit;
    std::array<std::uint8_t, 32> revealed_x{};
};

}  // namespace verimark
