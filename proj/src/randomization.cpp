#include "verimark/randomization.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "verimark/rng.hpp"

namespace verimark {

std::array<std::uint8_t, 32> random_value(SplitMix64& rng) {
    std::array<std::uint8_t, 32> out{};
    Bytes raw = rng.bytes(32);
    std::copy(raw.begin(), raw.end(), out.begin());
    return out;
}

OutsourcerCommit outsourcer_commit(const std::array<std::uint8_t, 32>& x,
                                   const Digest32& contract_ref, const KeyPair& outsourcer) {
    OutsourcerCommit commit;
    commit.x_hash = sha256(ByteSpan(x.data(), x.size()));
    commit.contract_ref = contract_ref;
    commit.sig = outsourcer.sign(outsourcer_commit_preimage(commit.x_hash, contract_ref));
    return commit;
}

bool verifier_list_sorted(const std::vector<PublicKey>& list) {
    for (std::size_t i = 1; i < list.size(); ++i)
        if (!(list[i - 1] < list[i])) return false;
    return true;
}

ContractorCommit contractor_commit(const OutsourcerCommit& commit,
                                   const std::array<std::uint8_t, 32>& y,
                                   std::vector<PublicKey> verifier_list,
                                   const KeyPair& contractor,
                                   const PublicKey& outsourcer_pk) {
    if (verifier_list.empty()) throw std::invalid_argument("verifier list is empty");
    if (!verifier_list_sorted(verifier_list))
        throw std::invalid_argument("verifier list must be strictly ascending by key");
    if (!verify(outsourcer_pk,
                outsourcer_commit_preimage(commit.x_hash, commit.contract_ref), commit.sig))
        throw std::invalid_argument("outsourcer commit signature does not verify");

    ContractorCommit cc;
    cc.x_hash = commit.x_hash;
    cc.contract_ref = commit.contract_ref;
    cc.y = y;
    cc.verifier_list = std::move(verifier_list);
    Digest32 m_hash = sha256(randomization_m_encoding(cc.y, cc.verifier_list));
    cc.sig = contractor.sign(contractor_commit_preimage(cc.x_hash, cc.contract_ref, m_hash));
    return cc;
}

namespace {

// value mod n for a 32-byte big-endian integer.
std::uint64_t mod_big_endian(const std::array<std::uint8_t, 32>& value, std::uint64_t n) {
    std::uint64_t r = 0;
    for (std::uint8_t byte : value) r = (r * 256 + byte) % n;
    return r;
}

}  // namespace

std::pair<std::size_t, PublicKey> select_verifier(const std::array<std::uint8_t, 32>& x,
                                                  const std::array<std::uint8_t, 32>& y,
                                                  const std::vector<PublicKey>& verifier_list) {
    if (verifier_list.empty()) throw std::invalid_argument("verifier list is empty");
    std::uint64_t n = verifier_list.size();
    std::size_t index =
        static_cast<std::size_t>((mod_big_endian(x, n) + mod_big_endian(y, n)) % n);
    return {index, verifier_list[index]};
}

double list_similarity(const std::vector<PublicKey>& a, const std::vector<PublicKey>& b) {
    std::set<PublicKey> sa(a.begin(), a.end());
    std::set<PublicKey> sb(b.begin(), b.end());
    if (sa.empty() && sb.empty()) return 1.0;
    std::size_t common = 0;
    for (const PublicKey& pk : sa) common += sb.count(pk);
    std::size_t united = sa.size() + sb.size() - common;
    return static_cast<double>(common) / static_cast<double>(united);
}

const char* selection_reject_name(SelectionReject reason) {
    switch (reason) {
        case SelectionReject::HashMismatch: return "hash_mismatch";
        case SelectionReject::BadOutsourcerSignature: return "bad_outsourcer_signature";
        case SelectionReject::BadContractorSignature: return "bad_contractor_signature";
        case SelectionReject::ContextMismatch: return "context_mismatch";
        case SelectionReject::EmptyList: return "empty_list";
        case SelectionReject::UnsortedList: return "unsorted_list";
        case SelectionReject::ListDivergence: return "list_divergence";
    }
    return "unknown";
}

SelectionDecision SelectionDecision::accept(std::size_t index, PublicKey verifier) {
    SelectionDecision d;
    d.accepted = true;
    d.index = index;
    d.verifier = verifier;
    return d;
}

SelectionDecision SelectionDecision::reject(SelectionReject reason) {
    SelectionDecision d;
    d.accepted = false;
    d.reason = reason;
    return d;
}

SelectionDecision verify_selection(const OutsourcerCommit& oc, const ContractorCommit& cc,
                                   const std::array<std::uint8_t, 32>& revealed_x,
                                   const std::vector<PublicKey>& local_list,
                                   double similarity_threshold,
                                   const PublicKey& outsourcer_pk,
                                   const PublicKey& contractor_pk) {
    if (sha256(ByteSpan(revealed_x.data(), revealed_x.size())) != oc.x_hash)
        return SelectionDecision::reject(SelectionReject::HashMismatch);
    if (cc.x_hash != oc.x_hash || cc.contract_ref != oc.contract_ref)
        return SelectionDecision::reject(SelectionReject::ContextMismatch);
    if (!verify(outsourcer_pk, outsourcer_commit_preimage(oc.x_hash, oc.contract_ref),
                oc.sig))
        return SelectionDecision::reject(SelectionReject::BadOutsourcerSignature);
    if (cc.verifier_list.empty())
        return SelectionDecision::reject(SelectionReject::EmptyList);
    if (!verifier_list_sorted(cc.verifier_list))
        return SelectionDecision::reject(SelectionReject::UnsortedList);
    Digest32 m_hash = sha256(randomization_m_encoding(cc.y, cc.verifier_list));
    if (!verify(contractor_pk,
                contractor_commit_preimage(cc.x_hash, cc.contract_ref, m_hash), cc.sig))
        return SelectionDecision::reject(SelectionReject::BadContractorSignature);
    if (list_similarity(cc.verifier_list, local_list) < similarity_threshold)
        return SelectionDecision::reject(SelectionReject::ListDivergence);
    auto [index, verifier] = select_verifier(revealed_x, cc.y, cc.verifier_list);
    return SelectionDecision::accept(index, verifier);
}

}  // namespace verimark
