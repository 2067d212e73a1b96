#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "verimark/contract.hpp"
#include "verimark/crypto.hpp"
#include "verimark/randomization.hpp"
#include "verimark/rng.hpp"
#include "verimark/wire.hpp"

// The settlement entity verifies signatures and moves currency; it never
// evaluates the outsourced function. Nothing in this module may depend on
// the execution engine.

namespace verimark {

enum class PartyKind : std::uint8_t { Outsourcer = 0, Contractor = 1, Verifier = 2 };

const char* party_name(PartyKind kind);

/// Contractor-side evidence when the worker committed through a Merkle
/// batch instead of per-response signatures.
struct BatchedEvidence {
    RootCommitment commitment;
    MembershipChallenge challenge;
    MembershipProof proof;
};

/// Exactly the dispute bundle the Outsourcer submits: the countersigned
/// input, both responses, and both contracts.
struct Accusation {
    SignedInput signed_input;
    std::variant<SignedResponse, BatchedEvidence> contractor_evidence;
    SignedResponse verifier_response;
    Contract contractor_contract;
    Contract verifier_contract;
};

struct ContestResponseRecord {
    PublicKey verifier;
    Bytes payload;
    Signature64 sig;  // over contest_response_preimage(sha256(input), payload)
};

struct ContestSubmission {
    ContestResponseRecord first;
    ContestResponseRecord second;
};

struct Review {
    PublicKey reviewer;
    PublicKey about;
    Digest32 contract_ref;
    std::int8_t score = 0;  // -1, 0, or +1
    Signature64 sig;
};

Review make_review(const KeyPair& reviewer, const PublicKey& about,
                   const Digest32& contract_ref, std::int8_t score);

enum class CasePhase : std::uint8_t { Accused, Contested, Closed };

struct CaseRecord {
    std::uint64_t id = 0;
    Digest32 contractor_ch;
    Digest32 verifier_ch;
    PublicKey outsourcer;
    PublicKey contractor;
    PublicKey verifier;
    std::uint32_t input_index = 0;
    Bytes input_payload;
    Bytes contractor_payload;
    Bytes verifier_payload;
    CasePhase phase = CasePhase::Accused;
    PartyKind accused = PartyKind::Contractor;
    std::uint32_t round = 0;
    std::uint32_t tally_contractor = 0;
    std::uint32_t tally_verifier = 0;
    std::vector<PublicKey> consulted;
    std::optional<std::pair<PublicKey, PublicKey>> assigned;
    bool entry_proof_checked = false;
    std::uint64_t deadline = 0;
    std::uint64_t opened_at = 0;
    std::optional<PartyKind> convicted;
    std::string resolution;

    PublicKey party_key(PartyKind kind) const;
    PartyKind party_of(const PublicKey& pk) const;  // throws if not a party
};

struct RegisterResult {
    bool ok = false;
    std::string reason;
};

struct OpenContractResult {
    bool ok = false;
    std::string reason;
};

struct RedeemResult {
    bool ok = false;
    std::string reason;
    Currency payout = 0;
    std::uint64_t payout_at = 0;
};

struct AccuseResult {
    bool ok = false;
    std::string reason;
    std::uint64_t case_id = 0;
    bool outsourcer_convicted = false;  // split-input violation found at intake
};

struct OpenContestationResult {
    bool ok = false;
    std::string reason;
    bool needs_entry_proof = false;  // round 1: outsourcer transcript required first
    bool closed = false;
    std::optional<PartyKind> convicted;
    std::optional<std::pair<PublicKey, PublicKey>> assigned;
};

struct SubmitContestResult {
    bool ok = false;
    std::string reason;
    bool flipped = false;
    PartyKind accused_now = PartyKind::Contractor;
};

struct ReviewResult {
    bool ok = false;
    std::string reason;
};

struct Conviction {
    std::uint64_t case_id = 0;
    PublicKey party;
    PartyKind kind = PartyKind::Contractor;
    std::string reason;
    std::uint64_t at = 0;
};

struct LedgerParams {
    std::uint64_t deadline_ticks = 100;
    double similarity_threshold = 0.9;
    /// Reward per consulted contestation verifier; 0 means "use the
    /// disputed contract's reward_per_input".
    Currency contest_verifier_reward = 0;
};

/// In-process model of the payment settlement entity: balances, deposits,
/// verifier registry, redemption, accusations, contestation, reviews.
/// Operations are applied serially in simulated-time order; currency is
/// conserved by every operation.
class Ledger {
public:
    Ledger(std::uint64_t seed, LedgerParams params);

    // -- funding & introspection -------------------------------------------
    void fund(const PublicKey& party, Currency amount);
    Currency balance_of(const PublicKey& party) const;
    Currency total_currency() const;
    std::vector<std::string> snapshot() const;

    // -- identity ------------------------------------------------------------
    RegisterResult register_verifier(const PublicKey& pk, bool identity_attestation);
    bool is_registered(const PublicKey& pk) const;
    std::vector<PublicKey> registered_verifiers() const;

    // -- contracts ------------------------------------------------------------
    OpenContractResult open_contract(const Contract& contract, Currency outsourcer_deposit);
    bool knows_contract(const Digest32& ch) const;

    // -- closing phase ---------------------------------------------------------
    RedeemResult redeem(const SignedInput& final_input, const Contract& contract,
                        std::uint64_t now);
    AccuseResult accuse(const Accusation& accusation, std::uint64_t now);
    /// `forced_assignment` lets exhaustive soundness exploration enumerate
    /// the TTP's pair choices; normal operation draws from the TTP seed.
    OpenContestationResult open_contestation(
        std::uint64_t case_id, const PublicKey& requester,
        const std::optional<EntryProof>& entry_proof, std::uint64_t now,
        const std::optional<std::pair<PublicKey, PublicKey>>& forced_assignment =
            std::nullopt);
    SubmitContestResult submit_contest(std::uint64_t case_id, const PublicKey& requester,
                                       const ContestSubmission& submission, std::uint64_t now);
    ReviewResult submit_review(const Review& review);
    double reputation(const PublicKey& pk) const;
    std::size_t review_count(const PublicKey& pk) const;

    // -- simulated time -----------------------------------------------------
    /// Executes every payout and case deadline due at or before `now`.
    void advance_to(std::uint64_t now);
    /// Earliest pending payout or case deadline; nullopt when nothing waits.
    std::optional<std::uint64_t> next_wakeup() const;
    /// Refunds deposits of contracts that ended without a redemption claim.
    void settle_abandoned(std::uint64_t now);

    const CaseRecord* find_case(std::uint64_t case_id) const;
    std::vector<std::uint64_t> case_ids() const;
    std::vector<std::uint64_t> open_case_ids() const;
    const std::vector<Conviction>& convictions() const { return convictions_; }
    const std::vector<std::string>& transfer_log() const { return transfer_log_; }
    bool was_fined(const PublicKey& pk) const;
    Currency paid_out_to(const PublicKey& pk) const;

private:
    struct ContractRecord {
        Contract contract;
        Currency outsourcer_deposit = 0;
        Currency worker_deposit = 0;
        bool redeem_submitted = false;
        std::uint32_t redeem_ack = 0;
        std::uint64_t payout_at = 0;
        bool payout_done = false;
        bool frozen = false;
        bool settled = false;
    };

    ContractRecord* find_contract(const Digest32& ch);
    const ContractRecord* find_contract(const Digest32& ch) const;
    void move(const PublicKey& from, const PublicKey& to, Currency amount,
              const std::string& what);
    /// Pays out of the party's deposit on `record` first, then its balance.
    void pay_from_deposit(ContractRecord& record, PartyKind payer, const PublicKey& to,
                          Currency amount, const std::string& what);
    void execute_payout(ContractRecord& record);
    void settle_contract(ContractRecord& record);
    void close_case(CaseRecord& record, PartyKind convicted, const std::string& reason,
                    std::uint64_t now);
    void resolve_by_majority(CaseRecord& record, std::uint64_t now);

    SplitMix64 rng_;
    LedgerParams params_;
    std::map<PublicKey, Currency> balances_;
    std::set<PublicKey> registered_;
    std::map<std::array<std::uint8_t, 32>, ContractRecord> contracts_;  // keyed by ch bytes
    std::map<std::uint64_t, CaseRecord> cases_;
    std::uint64_t next_case_id_ = 1;
    std::map<PublicKey, std::vector<std::int8_t>> reviews_;
    std::set<std::pair<PublicKey, std::array<std::uint8_t, 32>>> review_keys_;
    std::vector<Conviction> convictions_;
    std::vector<std::string> transfer_log_;
    std::map<PublicKey, Currency> paid_out_;
    std::set<PublicKey> fined_;
};

// ---------------------------------------------------------------------------
// Requests and notifications routed through the simulated network.
// ---------------------------------------------------------------------------

struct RegisterVerifierReq {
    PublicKey pk;
    bool attestation = true;
};
struct OpenContractReq {
    Contract contract;
    Currency outsourcer_deposit = 0;
};
struct RedeemReq {
    SignedInput final_input;
    Contract contract;
};
struct AccuseReq {
    Accusation accusation;
};
struct OpenContestationReq {
    std::uint64_t case_id = 0;
    PublicKey requester;
};
struct ProvideEntryProofReq {
    std::uint64_t case_id = 0;
    std::optional<EntryProof> proof;
};
struct SubmitContestReq {
    std::uint64_t case_id = 0;
    PublicKey requester;
    ContestSubmission submission;
};
struct SubmitReviewReq {
    Review review;
};

using SettlementRequest =
    std::variant<RegisterVerifierReq, OpenContractReq, RedeemReq, AccuseReq,
                 OpenContestationReq, ProvideEntryProofReq, SubmitContestReq,
                 SubmitReviewReq>;

struct CaseOpenedNote {
    std::uint64_t case_id = 0;
    PublicKey accused;
    Bytes input_payload;
    Bytes accused_payload;
};
struct EntryProofNeededNote {
    std::uint64_t case_id = 0;
};
struct ContestAssignedNote {
    std::uint64_t case_id = 0;
    PublicKey first;
    PublicKey second;
    Bytes input_payload;
};
struct ContestFailedNote {
    std::uint64_t case_id = 0;
    std::string reason;
};
struct CaseClosedNote {
    std::uint64_t case_id = 0;
    PartyKind convicted = PartyKind::Contractor;
    PublicKey convicted_pk;
    std::string reason;
};

using SettlementNote = std::variant<CaseOpenedNote, EntryProofNeededNote, ContestAssignedNote,
                                    ContestFailedNote, CaseClosedNote>;

}  // namespace verimark
