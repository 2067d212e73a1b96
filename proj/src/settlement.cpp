#include "verimark/settlement.hpp"

#include <algorithm>
#include <stdexcept>

namespace verimark {

const char* party_name(PartyKind kind) {
    switch (kind) {
        case PartyKind::Outsourcer: return "outsourcer";
        case PartyKind::Contractor: return "contractor";
        case PartyKind::Verifier: return "verifier";
    }
    return "unknown";
}

PublicKey CaseRecord::party_key(PartyKind kind) const {
    switch (kind) {
        case PartyKind::Outsourcer: return outsourcer;
        case PartyKind::Contractor: return contractor;
        case PartyKind::Verifier: return verifier;
    }
    throw std::logic_error("bad party kind");
}

PartyKind CaseRecord::party_of(const PublicKey& pk) const {
    if (pk == outsourcer) return PartyKind::Outsourcer;
    if (pk == contractor) return PartyKind::Contractor;
    if (pk == verifier) return PartyKind::Verifier;
    throw std::invalid_argument("key is not a party to this case");
}

Review make_review(const KeyPair& reviewer, const PublicKey& about,
                   const Digest32& contract_ref, std::int8_t score) {
    Review r;
    r.reviewer = reviewer.public_key();
    r.about = about;
    r.contract_ref = contract_ref;
    r.score = score;
    r.sig = reviewer.sign(review_preimage(contract_ref, about, score));
    return r;
}

Ledger::Ledger(std::uint64_t seed, LedgerParams params) : rng_(seed), params_(params) {}

void Ledger::fund(const PublicKey& party, Currency amount) { balances_[party] += amount; }

Currency Ledger::balance_of(const PublicKey& party) const {
    auto it = balances_.find(party);
    return it == balances_.end() ? 0 : it->second;
}

Currency Ledger::total_currency() const {
    Currency total = 0;
    for (const auto& [pk, amount] : balances_) total += amount;
    for (const auto& [ch, rec] : contracts_)
        total += rec.outsourcer_deposit + rec.worker_deposit;
    return total;
}

RegisterResult Ledger::register_verifier(const PublicKey& pk, bool identity_attestation) {
    if (!identity_attestation) return {false, "attestation_invalid"};
    if (registered_.count(pk)) return {false, "duplicate_registration"};
    registered_.insert(pk);
    return {true, ""};
}

bool Ledger::is_registered(const PublicKey& pk) const { return registered_.count(pk) > 0; }

std::vector<PublicKey> Ledger::registered_verifiers() const {
    return std::vector<PublicKey>(registered_.begin(), registered_.end());
}

Ledger::ContractRecord* Ledger::find_contract(const Digest32& ch) {
    auto it = contracts_.find(ch.bytes);
    return it == contracts_.end() ? nullptr : &it->second;
}

const Ledger::ContractRecord* Ledger::find_contract(const Digest32& ch) const {
    auto it = contracts_.find(ch.bytes);
    return it == contracts_.end() ? nullptr : &it->second;
}

bool Ledger::knows_contract(const Digest32& ch) const { return find_contract(ch) != nullptr; }

OpenContractResult Ledger::open_contract(const Contract& contract,
                                         Currency outsourcer_deposit) {
    try {
        contract.validate();
    } catch (const std::invalid_argument& err) {
        return {false, err.what()};
    }
    if (outsourcer_deposit < 0) return {false, "negative_deposit"};
    Digest32 ch = contract_hash(contract);
    if (contracts_.count(ch.bytes)) return {false, "duplicate_contract"};

    ContractRecord rec;
    rec.contract = contract;
    rec.worker_deposit = contract.deposit;
    rec.outsourcer_deposit = outsourcer_deposit;
    balances_[contract.worker_pk] -= rec.worker_deposit;
    balances_[contract.outsourcer_pk] -= rec.outsourcer_deposit;
    contracts_.emplace(ch.bytes, std::move(rec));
    transfer_log_.push_back("open_contract " + ch.hex().substr(0, 12));
    return {true, ""};
}

void Ledger::move(const PublicKey& from, const PublicKey& to, Currency amount,
                  const std::string& what) {
    if (amount == 0) return;
    balances_[from] -= amount;
    balances_[to] += amount;
    transfer_log_.push_back(what + " " + from.hex().substr(0, 8) + "->" +
                            to.hex().substr(0, 8) + " " + std::to_string(amount));
}

void Ledger::pay_from_deposit(ContractRecord& record, PartyKind payer, const PublicKey& to,
                              Currency amount, const std::string& what) {
    if (amount <= 0) return;
    Currency& deposit = payer == PartyKind::Outsourcer ? record.outsourcer_deposit
                                                       : record.worker_deposit;
    const PublicKey& from = payer == PartyKind::Outsourcer ? record.contract.outsourcer_pk
                                                           : record.contract.worker_pk;
    Currency from_deposit = std::min(deposit, amount);
    deposit -= from_deposit;
    balances_[to] += from_deposit;
    Currency rest = amount - from_deposit;
    if (rest > 0) move(from, to, rest, what + "_balance");
    if (from_deposit > 0)
        transfer_log_.push_back(what + " " + from.hex().substr(0, 8) + "->" +
                                to.hex().substr(0, 8) + " " + std::to_string(from_deposit) +
                                " (deposit)");
    paid_out_[to] += amount;
}

RedeemResult Ledger::redeem(const SignedInput& final_input, const Contract& contract,
                            std::uint64_t now) {
    Digest32 ch = contract_hash(contract);
    ContractRecord* rec = find_contract(ch);
    if (!rec) return {false, "unknown_contract", 0, 0};
    if (final_input.contract_ref != ch) return {false, "contract_ref_mismatch", 0, 0};
    if (rec->redeem_submitted || rec->settled) return {false, "already_redeemed", 0, 0};
    if (!verify(contract.outsourcer_pk, input_sig_preimage(final_input), final_input.sig))
        return {false, "bad_signature", 0, 0};

    rec->redeem_submitted = true;
    rec->redeem_ack = final_input.ack_count;
    rec->payout_at = now + params_.deadline_ticks;
    Currency payout = contract.reward_per_input * static_cast<Currency>(final_input.ack_count);
    transfer_log_.push_back("redeem_scheduled " + ch.hex().substr(0, 12) + " payout " +
                            std::to_string(payout));
    return {true, "", payout, rec->payout_at};
}

AccuseResult Ledger::accuse(const Accusation& accusation, std::uint64_t now) {
    const Contract& cc = accusation.contractor_contract;
    const Contract& vc = accusation.verifier_contract;
    if (cc.role != Role::Contractor || vc.role != Role::Verifier)
        return {false, "role_mismatch", 0, false};
    if (cc.outsourcer_pk != vc.outsourcer_pk)
        return {false, "outsourcer_mismatch", 0, false};

    Digest32 ch_c = contract_hash(cc);
    Digest32 ch_v = contract_hash(vc);
    ContractRecord* rec_c = find_contract(ch_c);
    ContractRecord* rec_v = find_contract(ch_v);
    if (!rec_c || !rec_v) return {false, "unknown_contract", 0, false};
    if (rec_c->payout_done || rec_v->payout_done) return {false, "too_late", 0, false};

    const SignedInput& input = accusation.signed_input;
    if (input.contract_ref != ch_c) return {false, "input_contract_mismatch", 0, false};
    if (!verify(cc.outsourcer_pk, input_sig_preimage(input), input.sig))
        return {false, "bad_input_signature", 0, false};

    const SignedResponse& vresp = accusation.verifier_response;
    if (vresp.contract_ref != ch_v || vresp.input_index != input.input_index)
        return {false, "verifier_response_mismatch", 0, false};
    if (!verify(vc.worker_pk, response_sig_preimage(vresp), vresp.sig))
        return {false, "bad_verifier_signature", 0, false};

    Bytes contractor_payload;
    bool split_input = false;
    if (const SignedResponse* cresp =
            std::get_if<SignedResponse>(&accusation.contractor_evidence)) {
        if (cresp->contract_ref != ch_c || cresp->input_index != input.input_index)
            return {false, "contractor_response_mismatch", 0, false};
        if (!verify(cc.worker_pk, response_sig_preimage(*cresp), cresp->sig))
            return {false, "bad_contractor_signature", 0, false};
        // The threat check on the signature chain: both workers countersigned
        // the same input signature iff the outsourcer fed them the same
        // raw input. Differing countersignatures convict the outsourcer.
        if (cresp->input_sig != vresp.input_sig) {
            if (cresp->input_sig != input.sig && vresp.input_sig != input.sig)
                return {false, "countersign_mismatch", 0, false};
            split_input = true;
        } else if (cresp->input_sig != input.sig) {
            return {false, "countersign_mismatch", 0, false};
        }
        contractor_payload = cresp->payload;
    } else {
        const BatchedEvidence& ev = std::get<BatchedEvidence>(accusation.contractor_evidence);
        if (ev.commitment.contract_ref != ch_c || ev.challenge.contract_ref != ch_c ||
            ev.proof.contract_ref != ch_c)
            return {false, "batched_contract_mismatch", 0, false};
        if (ev.challenge.batch_id != ev.commitment.batch_id ||
            ev.proof.batch_id != ev.commitment.batch_id ||
            ev.proof.challenged_index != ev.challenge.challenged_index ||
            ev.challenge.challenged_index != input.input_index)
            return {false, "batched_index_mismatch", 0, false};
        if (!verify(cc.worker_pk, root_commitment_preimage(ev.commitment), ev.commitment.sig))
            return {false, "bad_commitment_signature", 0, false};
        if (!verify(cc.outsourcer_pk, membership_challenge_preimage(ev.challenge),
                    ev.challenge.sig))
            return {false, "bad_challenge_signature", 0, false};
        if (!verify(cc.worker_pk, membership_proof_preimage(ev.challenge, ev.proof.payload),
                    ev.proof.sig))
            return {false, "bad_proof_signature", 0, false};
        std::uint32_t local = ev.proof.challenged_index - ev.commitment.first_index;
        if (ev.proof.challenged_index < ev.commitment.first_index ||
            local >= ev.commitment.leaf_count)
            return {false, "batched_index_out_of_range", 0, false};
        Digest32 leaf = response_leaf(ev.proof.challenged_index, ev.proof.payload);
        if (!merkle_verify(ev.commitment.root, leaf, local, ev.proof.path))
            return {false, "bad_membership_proof", 0, false};
        if (vresp.input_sig != input.sig) return {false, "countersign_mismatch", 0, false};
        contractor_payload = ev.proof.payload;
    }

    if (!split_input && contractor_payload == vresp.payload)
        return {false, "equal_payloads", 0, false};

    CaseRecord rec;
    rec.id = next_case_id_++;
    rec.contractor_ch = ch_c;
    rec.verifier_ch = ch_v;
    rec.outsourcer = cc.outsourcer_pk;
    rec.contractor = cc.worker_pk;
    rec.verifier = vc.worker_pk;
    rec.input_index = input.input_index;
    rec.input_payload = input.payload;
    rec.contractor_payload = contractor_payload;
    rec.verifier_payload = vresp.payload;
    rec.accused = PartyKind::Contractor;  // provisional
    rec.deadline = now + params_.deadline_ticks;
    rec.opened_at = now;
    rec_c->frozen = true;
    rec_v->frozen = true;

    std::uint64_t id = rec.id;
    auto [it, inserted] = cases_.emplace(id, std::move(rec));
    (void)inserted;
    if (split_input) {
        close_case(it->second, PartyKind::Outsourcer, "split_input", now);
        return {true, "", id, true};
    }
    return {true, "", id, false};
}

OpenContestationResult Ledger::open_contestation(
    std::uint64_t case_id, const PublicKey& requester,
    const std::optional<EntryProof>& entry_proof, std::uint64_t now,
    const std::optional<std::pair<PublicKey, PublicKey>>& forced_assignment) {
    auto it = cases_.find(case_id);
    if (it == cases_.end()) return {false, "unknown_case", false, false, {}, {}};
    CaseRecord& rec = it->second;
    if (rec.phase == CasePhase::Closed) return {false, "case_closed", false, false, {}, {}};
    if (rec.phase == CasePhase::Contested)
        return {false, "round_in_progress", false, false, {}, {}};
    if (now > rec.deadline) return {false, "deadline_passed", false, false, {}, {}};
    if (requester != rec.party_key(rec.accused))
        return {false, "requester_not_accused", false, false, {}, {}};

    // The first round was triggered by the Outsourcer's accusation, so the
    // Outsourcer must first prove it contacted the protocol-selected
    // Verifier by presenting the Contractor's randomization signatures.
    if (rec.round == 0 && !rec.entry_proof_checked) {
        if (!entry_proof.has_value())
            return {false, "entry_proof_required", true, false, {}, {}};
        const EntryProof& proof = *entry_proof;
        bool valid = proof.commit.contract_ref == rec.contractor_ch &&
                     proof.counter_commit.contract_ref == rec.contractor_ch;
        if (valid) {
            SelectionDecision decision = verify_selection(
                proof.commit, proof.counter_commit, proof.revealed_x,
                registered_verifiers(), params_.similarity_threshold, rec.outsourcer,
                rec.contractor);
            valid = decision.accepted && decision.verifier == rec.verifier;
        }
        if (!valid) {
            close_case(rec, PartyKind::Outsourcer, "randomization_proof_invalid", now);
            return {true, "entry_proof_rejected", false, true, PartyKind::Outsourcer, {}};
        }
        rec.entry_proof_checked = true;
    }

    std::vector<PublicKey> candidates;
    for (const PublicKey& pk : registered_) {
        if (pk == rec.outsourcer || pk == rec.contractor || pk == rec.verifier) continue;
        if (std::find(rec.consulted.begin(), rec.consulted.end(), pk) != rec.consulted.end())
            continue;
        candidates.push_back(pk);
    }
    if (candidates.size() < 2) {
        resolve_by_majority(rec, now);
        return {true, "pool_exhausted", false, true, rec.convicted, {}};
    }

    std::pair<PublicKey, PublicKey> assigned;
    if (forced_assignment) {
        auto eligible = [&candidates](const PublicKey& pk) {
            return std::find(candidates.begin(), candidates.end(), pk) != candidates.end();
        };
        if (forced_assignment->first == forced_assignment->second ||
            !eligible(forced_assignment->first) || !eligible(forced_assignment->second))
            return {false, "forced_assignment_invalid", false, false, {}, {}};
        assigned = *forced_assignment;
    } else {
        std::size_t first = static_cast<std::size_t>(rng_.below(candidates.size()));
        std::size_t second = static_cast<std::size_t>(rng_.below(candidates.size() - 1));
        if (second >= first) ++second;
        assigned = {candidates[first], candidates[second]};
    }
    rec.consulted.push_back(assigned.first);
    rec.consulted.push_back(assigned.second);
    rec.assigned = assigned;
    rec.phase = CasePhase::Contested;
    rec.round += 1;
    rec.deadline = now + params_.deadline_ticks;
    return {true, "", false, false, {}, assigned};
}

SubmitContestResult Ledger::submit_contest(std::uint64_t case_id, const PublicKey& requester,
                                           const ContestSubmission& submission,
                                           std::uint64_t now) {
    auto it = cases_.find(case_id);
    if (it == cases_.end()) return {false, "unknown_case", false, PartyKind::Contractor};
    CaseRecord& rec = it->second;
    if (rec.phase != CasePhase::Contested)
        return {false, "no_round_open", false, rec.accused};
    if (now > rec.deadline) return {false, "deadline_passed", false, rec.accused};
    if (requester != rec.party_key(rec.accused))
        return {false, "requester_not_accused", false, rec.accused};

    const auto& [a, b] = *rec.assigned;
    bool pair_matches = (submission.first.verifier == a && submission.second.verifier == b) ||
                        (submission.first.verifier == b && submission.second.verifier == a);
    if (!pair_matches || submission.first.verifier == submission.second.verifier)
        return {false, "wrong_verifier_pair", false, rec.accused};
    if (!is_registered(submission.first.verifier) || !is_registered(submission.second.verifier))
        return {false, "unregistered_verifier", false, rec.accused};

    Digest32 input_digest = sha256(rec.input_payload);
    for (const ContestResponseRecord* record : {&submission.first, &submission.second}) {
        if (!verify(record->verifier,
                    contest_response_preimage(input_digest, record->payload), record->sig))
            return {false, "invalid_verifier_signature", false, rec.accused};
    }

    const Bytes& accused_payload = rec.accused == PartyKind::Contractor
                                       ? rec.contractor_payload
                                       : rec.verifier_payload;
    std::uint32_t matches_accused = 0;
    for (const ContestResponseRecord* record : {&submission.first, &submission.second}) {
        if (record->payload == rec.contractor_payload) rec.tally_contractor += 1;
        if (record->payload == rec.verifier_payload) rec.tally_verifier += 1;
        if (record->payload == accused_payload) matches_accused += 1;
    }

    rec.phase = CasePhase::Accused;
    rec.assigned.reset();
    rec.deadline = now + params_.deadline_ticks;

    if (matches_accused == 2) {
        // Full support from the fresh pair: the minority side is accused next.
        rec.accused = rec.accused == PartyKind::Contractor ? PartyKind::Verifier
                                                           : PartyKind::Contractor;
        return {true, "", true, rec.accused};
    }
    return {true, "majority_not_reached", false, rec.accused};
}

void Ledger::resolve_by_majority(CaseRecord& rec, std::uint64_t now) {
    PartyKind convicted;
    if (rec.tally_contractor > rec.tally_verifier)
        convicted = PartyKind::Verifier;
    else if (rec.tally_verifier > rec.tally_contractor)
        convicted = PartyKind::Contractor;
    else
        convicted = rec.accused;  // tie: the failed flip stands
    close_case(rec, convicted, "pool_exhausted_majority", now);
}

void Ledger::close_case(CaseRecord& rec, PartyKind convicted, const std::string& reason,
                        std::uint64_t now) {
    ContractRecord* rec_c = find_contract(rec.contractor_ch);
    ContractRecord* rec_v = find_contract(rec.verifier_ch);
    if (!rec_c || !rec_v) throw std::logic_error("case refers to unknown contracts");

    rec.phase = CasePhase::Closed;
    rec.convicted = convicted;
    rec.resolution = reason;
    convictions_.push_back({rec.id, rec.party_key(convicted), convicted, reason, now});
    fined_.insert(rec.party_key(convicted));

    Currency contest_reward = params_.contest_verifier_reward > 0
                                  ? params_.contest_verifier_reward
                                  : rec_c->contract.reward_per_input;

    switch (convicted) {
        case PartyKind::Contractor:
            pay_from_deposit(*rec_c, PartyKind::Contractor, rec.outsourcer,
                             rec_c->contract.fee, "fee");
            pay_from_deposit(*rec_c, PartyKind::Contractor, rec.verifier,
                             rec_c->contract.bounty, "bounty");
            for (const PublicKey& pk : rec.consulted)
                pay_from_deposit(*rec_c, PartyKind::Contractor, pk, contest_reward,
                                 "contest_reward");
            rec_c->redeem_submitted = false;  // payment refused on conviction
            break;
        case PartyKind::Verifier:
            pay_from_deposit(*rec_v, PartyKind::Verifier, rec.outsourcer, rec_v->contract.fee,
                             "fee");
            pay_from_deposit(*rec_v, PartyKind::Verifier, rec.contractor,
                             rec_v->contract.bounty, "bounty");
            for (const PublicKey& pk : rec.consulted)
                pay_from_deposit(*rec_v, PartyKind::Verifier, pk, contest_reward,
                                 "contest_reward");
            rec_v->redeem_submitted = false;
            break;
        case PartyKind::Outsourcer:
            // The outsourcer wronged both workers; each collects the fee of
            // its own contract. Detection here is the settlement entity's
            // own signature check, so no bounty is due.
            pay_from_deposit(*rec_c, PartyKind::Outsourcer, rec.contractor,
                             rec_c->contract.fee, "fee");
            pay_from_deposit(*rec_v, PartyKind::Outsourcer, rec.verifier, rec_v->contract.fee,
                             "fee");
            for (const PublicKey& pk : rec.consulted)
                pay_from_deposit(*rec_c, PartyKind::Outsourcer, pk, contest_reward,
                                 "contest_reward");
            break;
    }

    rec_c->frozen = false;
    rec_v->frozen = false;
    for (ContractRecord* contract_rec : {rec_c, rec_v}) {
        if (contract_rec->redeem_submitted && !contract_rec->payout_done)
            execute_payout(*contract_rec);
        settle_contract(*contract_rec);
    }
}

void Ledger::execute_payout(ContractRecord& rec) {
    Currency payout =
        rec.contract.reward_per_input * static_cast<Currency>(rec.redeem_ack);
    pay_from_deposit(rec, PartyKind::Outsourcer, rec.contract.worker_pk, payout, "payout");
    rec.payout_done = true;
}

void Ledger::settle_contract(ContractRecord& rec) {
    if (rec.settled) return;
    if (rec.outsourcer_deposit > 0) {
        balances_[rec.contract.outsourcer_pk] += rec.outsourcer_deposit;
        rec.outsourcer_deposit = 0;
    }
    if (rec.worker_deposit > 0) {
        balances_[rec.contract.worker_pk] += rec.worker_deposit;
        rec.worker_deposit = 0;
    }
    rec.settled = true;
}

void Ledger::advance_to(std::uint64_t now) {
    for (auto& [id, rec] : cases_) {
        if (rec.phase != CasePhase::Closed && now >= rec.deadline)
            close_case(rec, rec.accused, "deadline_expired", now);
    }
    for (auto& [ch, rec] : contracts_) {
        if (rec.redeem_submitted && !rec.payout_done && !rec.frozen && now >= rec.payout_at) {
            execute_payout(rec);
            settle_contract(rec);
        }
    }
}

std::optional<std::uint64_t> Ledger::next_wakeup() const {
    std::optional<std::uint64_t> wake;
    auto consider = [&wake](std::uint64_t t) {
        if (!wake || t < *wake) wake = t;
    };
    for (const auto& [id, rec] : cases_)
        if (rec.phase != CasePhase::Closed) consider(rec.deadline);
    for (const auto& [ch, rec] : contracts_)
        if (rec.redeem_submitted && !rec.payout_done && !rec.frozen) consider(rec.payout_at);
    return wake;
}

void Ledger::settle_abandoned(std::uint64_t now) {
    (void)now;
    for (auto& [ch, rec] : contracts_) {
        if (!rec.settled && !rec.frozen && !rec.redeem_submitted) settle_contract(rec);
    }
}

ReviewResult Ledger::submit_review(const Review& review) {
    if (review.score < -1 || review.score > 1) return {false, "score_out_of_range"};
    const ContractRecord* rec = find_contract(review.contract_ref);
    if (!rec) return {false, "unknown_contract"};
    const PublicKey& o = rec->contract.outsourcer_pk;
    const PublicKey& w = rec->contract.worker_pk;
    bool parties_ok = (review.reviewer == o && review.about == w) ||
                      (review.reviewer == w && review.about == o);
    if (!parties_ok) return {false, "reviewer_not_party"};
    if (!verify(review.reviewer,
                review_preimage(review.contract_ref, review.about, review.score), review.sig))
        return {false, "bad_signature"};
    auto key = std::make_pair(review.reviewer, review.contract_ref.bytes);
    if (review_keys_.count(key)) return {false, "duplicate_review"};
    review_keys_.insert(key);
    reviews_[review.about].push_back(review.score);
    return {true, ""};
}

double Ledger::reputation(const PublicKey& pk) const {
    auto it = reviews_.find(pk);
    if (it == reviews_.end() || it->second.empty()) return 0.0;
    double sum = 0;
    for (std::int8_t s : it->second) sum += s;
    return sum / static_cast<double>(it->second.size());
}

std::size_t Ledger::review_count(const PublicKey& pk) const {
    auto it = reviews_.find(pk);
    return it == reviews_.end() ? 0 : it->second.size();
}

const CaseRecord* Ledger::find_case(std::uint64_t case_id) const {
    auto it = cases_.find(case_id);
    return it == cases_.end() ? nullptr : &it->second;
}

std::vector<std::uint64_t> Ledger::case_ids() const {
    std::vector<std::uint64_t> ids;
    for (const auto& [id, rec] : cases_) ids.push_back(id);
    return ids;
}

std::vector<std::uint64_t> Ledger::open_case_ids() const {
    std::vector<std::uint64_t> ids;
    for (const auto& [id, rec] : cases_)
        if (rec.phase != CasePhase::Closed) ids.push_back(id);
    return ids;
}

bool Ledger::was_fined(const PublicKey& pk) const { return fined_.count(pk) > 0; }

Currency Ledger::paid_out_to(const PublicKey& pk) const {
    auto it = paid_out_.find(pk);
    return it == paid_out_.end() ? 0 : it->second;
}

std::vector<std::string> Ledger::snapshot() const {
    std::vector<std::string> lines;
    for (const auto& [pk, amount] : balances_)
        lines.push_back("balance " + to_hex(pk.bytes).substr(0, 16) + " " +
                        std::to_string(amount));
    for (const auto& [ch, rec] : contracts_)
        lines.push_back("contract " + to_hex(ch).substr(0, 16) +
                        " o_deposit=" + std::to_string(rec.outsourcer_deposit) +
                        " w_deposit=" + std::to_string(rec.worker_deposit) +
                        " redeemed=" + (rec.payout_done ? "yes" : "no") +
                        (rec.frozen ? " frozen" : ""));
    for (const auto& [id, rec] : cases_) {
        std::string phase = rec.phase == CasePhase::Closed
                                ? "closed"
                                : (rec.phase == CasePhase::Contested ? "contested" : "accused");
        lines.push_back("case " + std::to_string(id) + " phase=" + phase + " accused=" +
                        party_name(rec.accused) + " round=" + std::to_string(rec.round) +
                        " tally=" + std::to_string(rec.tally_contractor) + ":" +
                        std::to_string(rec.tally_verifier) +
                        (rec.convicted ? std::string(" convicted=") + party_name(*rec.convicted)
                                       : std::string()) +
                        (rec.resolution.empty() ? "" : " (" + rec.resolution + ")"));
    }
    for (const PublicKey& pk : registered_)
        lines.push_back("registered " + to_hex(pk.bytes).substr(0, 16));
    return lines;
}

}  // namespace verimark
