#include "verimark/engine.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace verimark {

// ---------------------------------------------------------------------------
// Compute functions
// ---------------------------------------------------------------------------

ComputeFunction identity_function() {
    ComputeFunction fn;
    fn.function_id = 1;
    fn.cost_ticks = 1;
    fn.name = "identity";
    fn.evaluate = [](ByteSpan input) { return Bytes(input.begin(), input.end()); };
    fn.cheap_answer = [](ByteSpan) { return Bytes{}; };
    return fn;
}

ComputeFunction iterated_hash_function(std::uint32_t iterations) {
    ComputeFunction fn;
    fn.function_id = 2;
    fn.cost_ticks = 1 + iterations / 64;
    fn.name = "iterated_hash";
    fn.evaluate = [iterations](ByteSpan input) {
        Digest32 acc = sha256(input);
        for (std::uint32_t i = 1; i < iterations; ++i) acc = sha256(acc.span());
        return Bytes(acc.bytes.begin(), acc.bytes.end());
    };
    fn.cheap_answer = [](ByteSpan) { return Bytes(32, 0); };
    return fn;
}

Bytes encode_grid(std::uint32_t width, std::uint32_t height, ByteSpan cells) {
    if (cells.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("grid cell count does not match dimensions");
    Bytes out;
    out.reserve(8 + cells.size());
    put_u32(out, width);
    put_u32(out, height);
    put_bytes(out, cells);
    return out;
}

Bytes encode_boxes(const std::vector<GridBox>& boxes) {
    Bytes out;
    out.reserve(4 + 16 * boxes.size());
    put_u32(out, static_cast<std::uint32_t>(boxes.size()));
    for (const GridBox& box : boxes) {
        put_u32(out, box.min_x);
        put_u32(out, box.min_y);
        put_u32(out, box.max_x);
        put_u32(out, box.max_y);
    }
    return out;
}

std::vector<GridBox> detect_boxes(ByteSpan grid_input) {
    ByteReader r(grid_input);
    std::uint32_t width = 0, height = 0;
    try {
        width = r.u32();
        height = r.u32();
    } catch (const ByteReader::ShortBuffer&) {
        throw std::invalid_argument("grid input truncated");
    }
    if (r.remaining() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("grid input has wrong cell count");
    ByteSpan cells = r.take(r.remaining());

    auto at = [&](std::uint32_t x, std::uint32_t y) { return cells[y * width + x]; };
    std::vector<bool> seen(static_cast<std::size_t>(width) * height, false);
    std::vector<GridBox> boxes;

    for (std::uint32_t y = 0; y < height; ++y) {
        for (std::uint32_t x = 0; x < width; ++x) {
            if (at(x, y) == 0 || seen[y * width + x]) continue;
            // Flood-fill the 4-connected component, tracking its bounds.
            GridBox box{x, y, x, y};
            std::queue<std::pair<std::uint32_t, std::uint32_t>> frontier;
            frontier.push({x, y});
            seen[y * width + x] = true;
            while (!frontier.empty()) {
                auto [cx, cy] = frontier.front();
                frontier.pop();
                box.min_x = std::min(box.min_x, cx);
                box.min_y = std::min(box.min_y, cy);
                box.max_x = std::max(box.max_x, cx);
                box.max_y = std::max(box.max_y, cy);
                const std::pair<std::int64_t, std::int64_t> steps[4] = {
                    {-1, 0}, {1, 0}, {0, -1}, {0, 1}};
                for (auto [dx, dy] : steps) {
                    std::int64_t nx = static_cast<std::int64_t>(cx) + dx;
                    std::int64_t ny = static_cast<std::int64_t>(cy) + dy;
                    if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
                    std::size_t flat = static_cast<std::size_t>(ny) * width + nx;
                    if (seen[flat] || cells[flat] == 0) continue;
                    seen[flat] = true;
                    frontier.push({static_cast<std::uint32_t>(nx),
                                   static_cast<std::uint32_t>(ny)});
                }
            }
            boxes.push_back(box);
        }
    }
    std::sort(boxes.begin(), boxes.end());
    return boxes;
}

ComputeFunction grid_detector_function() {
    ComputeFunction fn;
    fn.function_id = 3;
    fn.cost_ticks = 2;
    fn.name = "grid_detector";
    fn.evaluate = [](ByteSpan input) { return encode_boxes(detect_boxes(input)); };
    // The natural cheap lie: report that nothing was found.
    fn.cheap_answer = [](ByteSpan) { return encode_boxes({}); };
    return fn;
}

Bytes wrong_answer(const ComputeFunction& fn, ByteSpan input) {
    Bytes honest = fn.evaluate(input);
    if (honest.empty()) return Bytes{0x01};
    honest[0] ^= 0xff;
    return honest;
}

ComputeFunction make_function(const InputSpec& spec) {
    switch (spec.kind) {
        case InputSpec::Kind::Identity: return identity_function();
        case InputSpec::Kind::IteratedHash: return iterated_hash_function(spec.iterations);
        case InputSpec::Kind::GridDetector: return grid_detector_function();
    }
    throw std::invalid_argument("unknown function kind");
}

Bytes generate_input(const InputSpec& spec, SplitMix64& rng) {
    switch (spec.kind) {
        case InputSpec::Kind::Identity:
        case InputSpec::Kind::IteratedHash:
            return rng.bytes(std::max<std::uint32_t>(1, spec.input_bytes));
        case InputSpec::Kind::GridDetector: {
            std::uint32_t w = std::max<std::uint32_t>(2, spec.grid_width);
            std::uint32_t h = std::max<std::uint32_t>(2, spec.grid_height);
            Bytes cells(static_cast<std::size_t>(w) * h, 0);
            if (rng.chance(spec.object_rate)) {
                std::uint64_t objects = 1 + rng.below(2);
                for (std::uint64_t k = 0; k < objects; ++k) {
                    std::uint32_t x0 = static_cast<std::uint32_t>(rng.below(w));
                    std::uint32_t y0 = static_cast<std::uint32_t>(rng.below(h));
                    std::uint32_t x1 = std::min<std::uint32_t>(
                        w - 1, x0 + static_cast<std::uint32_t>(rng.below(3)));
                    std::uint32_t y1 = std::min<std::uint32_t>(
                        h - 1, y0 + static_cast<std::uint32_t>(rng.below(3)));
                    std::uint8_t value = static_cast<std::uint8_t>(1 + rng.below(255));
                    for (std::uint32_t y = y0; y <= y1; ++y)
                        for (std::uint32_t x = x0; x <= x1; ++x) cells[y * w + x] = value;
                }
            }
            return encode_grid(w, h, cells);
        }
    }
    throw std::invalid_argument("unknown function kind");
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

bool SamplingSchedule::is_sampled(std::uint32_t index) const {
    if (index >= total_inputs) return false;
    std::uint32_t interval = index / interval_size;
    return offsets[interval] == index % interval_size;
}

SamplingSchedule sample_schedule(std::uint64_t rng_seed, std::uint32_t total_inputs,
                                 std::uint32_t interval_size) {
    if (interval_size == 0) throw std::invalid_argument("interval size must be >= 1");
    SamplingSchedule schedule;
    schedule.total_inputs = total_inputs;
    schedule.interval_size = interval_size;
    SplitMix64 rng(rng_seed);
    std::uint32_t intervals =
        total_inputs == 0 ? 0 : (total_inputs + interval_size - 1) / interval_size;
    schedule.offsets.reserve(intervals);
    for (std::uint32_t k = 0; k < intervals; ++k) {
        std::uint32_t first = k * interval_size;
        std::uint32_t size = std::min(interval_size, total_inputs - first);
        schedule.offsets.push_back(static_cast<std::uint32_t>(rng.below(size)));
    }
    return schedule;
}

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

const char* strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Honest: return "honest";
        case StrategyKind::CheatRate: return "cheat_rate";
        case StrategyKind::QAlgorithm: return "q_algorithm";
        case StrategyKind::Colluder: return "colluder";
        case StrategyKind::SplitInput: return "split_input";
        case StrategyKind::PaymentRefuser: return "payment_refuser";
        case StrategyKind::SlowResponder: return "slow_responder";
    }
    return "unknown";
}

Strategy Strategy::cheat_rate(double rate) {
    Strategy s;
    s.kind = StrategyKind::CheatRate;
    s.rate = rate;
    return s;
}

Strategy Strategy::q_algorithm(double q) {
    Strategy s;
    s.kind = StrategyKind::QAlgorithm;
    s.q = q;
    return s;
}

Strategy Strategy::colluder(const PublicKey& partner, bool knows_partner) {
    Strategy s;
    s.kind = StrategyKind::Colluder;
    s.partner = partner;
    s.knows_partner = knows_partner;
    return s;
}

Strategy Strategy::split_input() {
    Strategy s;
    s.kind = StrategyKind::SplitInput;
    return s;
}

Strategy Strategy::payment_refuser() {
    Strategy s;
    s.kind = StrategyKind::PaymentRefuser;
    return s;
}

Strategy Strategy::slow_responder(std::uint64_t delay_ticks) {
    Strategy s;
    s.kind = StrategyKind::SlowResponder;
    s.delay_ticks = delay_ticks;
    return s;
}

// ---------------------------------------------------------------------------
// QoS
// ---------------------------------------------------------------------------

const char* qos_violation_name(QosViolation kind) {
    switch (kind) {
        case QosViolation::Timeout: return "timeout";
        case QosViolation::LowResponseRate: return "low_response_rate";
        case QosViolation::HighResponseTime: return "high_response_time";
    }
    return "unknown";
}

QosResult qos_check(const QosLedgerLocal& ledger, const QosThresholds& thresholds) {
    if (ledger.worst_response_time > thresholds.max_response_time)
        return {false, QosViolation::HighResponseTime};
    if (ledger.responses_due > 0) {
        double rate = static_cast<double>(ledger.responses_received) /
                      static_cast<double>(ledger.responses_due);
        if (rate < thresholds.min_response_rate())
            return {false, QosViolation::LowResponseRate};
    }
    if (ledger.timed_out_inputs > 0) return {false, QosViolation::Timeout};
    return {true, QosViolation::Timeout};
}

// ---------------------------------------------------------------------------
// Pair comparison
// ---------------------------------------------------------------------------

CompareOutcome compare_pair(const PendingPair& pair) {
    if (!pair.contractor_response || !pair.verifier_response)
        return CompareOutcome::Incomplete;
    if (pair.contractor_response->input_index != pair.verifier_response->input_index ||
        pair.contractor_response->input_index != pair.input_index)
        throw std::logic_error("compare_pair called with mismatched input indices");
    return pair.contractor_response->payload == pair.verifier_response->payload
               ? CompareOutcome::Equal
               : CompareOutcome::Mismatch;
}

// ---------------------------------------------------------------------------
// Outsourcer actor
// ---------------------------------------------------------------------------

namespace {
constexpr std::uint32_t kFlagFinal = 1;  // final payment-promise marker, no response due
}

OutsourcerActor::OutsourcerActor(OutsourcerConfig config)
    : config_(std::move(config)),
      keys_(KeyPair::from_seed(config_.key_seed)),
      rng_(config_.rng_seed),
      input_rng_(rng_.fork()),
      schedule_(
          sample_schedule(config_.schedule_seed, config_.total_inputs, config_.interval_size)),
      contractor_ch_(contract_hash(config_.contractor_contract)) {}

bool OutsourcerActor::aborted(Outbound::Dest peer) const {
    return peer == Outbound::Dest::Contractor ? contractor_state_.aborted
                                              : verifier_state_.aborted;
}

SignedInput OutsourcerActor::make_signed_input(const Digest32& ch, std::uint32_t index,
                                               std::uint32_t ack, std::uint32_t interval,
                                               std::uint32_t flags, Bytes payload) const {
    SignedInput msg;
    msg.contract_ref = ch;
    msg.input_index = index;
    msg.ack_count = ack;
    msg.interval_id = interval;
    msg.flags = flags;
    msg.payload = std::move(payload);
    msg.sig = keys_.sign(input_sig_preimage(msg));
    return msg;
}

Outbound OutsourcerActor::to_settlement(SettlementRequest req) const {
    Outbound out;
    out.dest = Outbound::Dest::Settlement;
    out.body = std::move(req);
    return out;
}

std::vector<Outbound> OutsourcerActor::begin(std::uint64_t now) {
    std::vector<Outbound> outs;
    outs.push_back(to_settlement(OpenContractReq{config_.contractor_contract,
                                                 config_.outsourcer_deposit_per_contract}));
    if (config_.strategy.kind == StrategyKind::Colluder) {
        // Deviant outsourcer: skips randomization and hand-picks its partner.
        Contract vc = config_.verifier_contract_template;
        vc.worker_pk = config_.strategy.partner;
        verifier_contract_ = vc;
        verifier_ch_ = contract_hash(vc);
        outs.push_back(
            to_settlement(OpenContractReq{vc, config_.outsourcer_deposit_per_contract}));
        running_ = true;
        log_.push_back({now, "randomization_skipped", "hand-picked verifier"});
        return outs;
    }
    commit_x_ = random_value(rng_);
    OutsourcerCommit oc = outsourcer_commit(commit_x_, contractor_ch_, keys_);
    commit_ = oc;
    Outbound out;
    out.dest = Outbound::Dest::Contractor;
    out.body = encode(oc);
    outs.push_back(std::move(out));
    return outs;
}

std::vector<Outbound> OutsourcerActor::handle(std::uint64_t now, const ActorEvent& event) {
    if (const auto* tick = std::get_if<InputTick>(&event)) {
        (void)tick;
        return on_input_tick(now);
    }
    if (const auto* wire = std::get_if<WireDelivery>(&event)) return on_wire(now, wire->bytes);
    if (std::get_if<QosSweep>(&event)) return on_qos_sweep(now);
    if (std::get_if<FinishNotice>(&event)) return on_finish(now);
    if (std::get_if<ReviewPhase>(&event)) return on_review_phase(now);
    if (const auto* note = std::get_if<SettlementNote>(&event)) return on_note(now, *note);
    return {};
}

std::vector<Outbound> OutsourcerActor::on_wire(std::uint64_t now, ByteSpan bytes) {
    WireMessage msg;
    try {
        msg = decode_message(bytes);
    } catch (const MalformedMessage&) {
        ++tamper_rejections_;
        log_.push_back({now, "malformed_message", "dropped"});
        return {};
    }
    if (const auto* cc = std::get_if<ContractorCommit>(&msg)) {
        if (running_ || verifier_contract_) return {};
        SelectionDecision decision = verify_selection(
            *commit_, *cc, commit_x_, config_.local_verifier_list,
            config_.similarity_threshold, keys_.public_key(),
            config_.contractor_contract.worker_pk);
        if (!decision.accepted) {
            log_.push_back(
                {now, "randomization_rejected", selection_reject_name(decision.reason)});
            return abort_peer(now, false, QosViolation::Timeout, "randomization_rejected");
        }
        Contract vc = config_.verifier_contract_template;
        vc.worker_pk = decision.verifier;
        verifier_contract_ = vc;
        verifier_ch_ = contract_hash(vc);
        transcript_ = EntryProof{*commit_, *cc, commit_x_};
        running_ = true;
        log_.push_back({now, "verifier_selected", "index " + std::to_string(decision.index)});
        return {to_settlement(
            OpenContractReq{vc, config_.outsourcer_deposit_per_contract})};
    }
    if (const auto* resp = std::get_if<SignedResponse>(&msg)) return on_response(now, *resp);
    if (const auto* batched = std::get_if<BatchedResponse>(&msg)) {
        if (batched->contract_ref != contractor_ch_) {
            ++tamper_rejections_;
            return {};
        }
        tentative_payloads_[batched->input_index] = batched->payload;
        contractor_state_.qos.responses_received += 1;
        auto sent_it = contractor_state_.sent_at.find(batched->input_index);
        if (sent_it != contractor_state_.sent_at.end()) {
            contractor_state_.qos.worst_response_time = std::max(
                contractor_state_.qos.worst_response_time, now - sent_it->second);
            contractor_state_.sent_at.erase(sent_it);
        }
        return {};
    }
    if (const auto* rc = std::get_if<RootCommitment>(&msg)) return on_root_commitment(now, *rc);
    if (const auto* proof = std::get_if<MembershipProof>(&msg))
        return on_membership_proof(now, *proof);
    if (std::get_if<Termination>(&msg)) {
        log_.push_back({now, "peer_terminated", ""});
        return {};
    }
    return {};
}

std::vector<Outbound> OutsourcerActor::on_input_tick(std::uint64_t now) {
    if (!running_ || finished_ || contractor_state_.aborted) return {};
    if (next_index_ >= config_.total_inputs) return {};
    std::uint32_t index = next_index_++;
    Bytes payload = generate_input(config_.input_spec, input_rng_);
    std::uint32_t interval = schedule_.interval_of(index);
    bool sampled = schedule_.is_sampled(index) && verifier_contract_.has_value() &&
                   !verifier_state_.aborted;

    std::vector<Outbound> outs;
    SignedInput msg = make_signed_input(contractor_ch_, index, contractor_state_.ack,
                                        interval, 0, payload);
    contractor_state_.sent[index] = msg;
    contractor_state_.sent_at[index] = now;
    contractor_state_.last_sent = msg;
    contractor_state_.stream_index = index + 1;
    input_sent_tick_[index] = now;
    Outbound to_contractor;
    to_contractor.dest = Outbound::Dest::Contractor;
    to_contractor.body = encode(msg);
    outs.push_back(std::move(to_contractor));

    if (sampled) {
        SignedInput inner = msg;
        if (config_.strategy.kind == StrategyKind::SplitInput) {
            // Same index, different raw input for the verifier. Flipping the
            // last byte keeps structured inputs well-formed.
            Bytes other = payload;
            other.back() ^= 0x55;
            inner = make_signed_input(contractor_ch_, index, contractor_state_.ack, interval,
                                      0, std::move(other));
        }
        inner_sent_[index] = inner;
        SignedInput envelope =
            make_signed_input(verifier_ch_, verifier_state_.stream_index,
                              verifier_state_.ack, interval, 0, encode(inner));
        verifier_state_.stream_index += 1;
        verifier_state_.sent[index] = envelope;
        verifier_state_.sent_at[index] = now;
        verifier_state_.last_sent = envelope;
        pending_[index].input_index = index;
        Outbound to_verifier;
        to_verifier.dest = Outbound::Dest::Verifier;
        to_verifier.body = encode(envelope);
        outs.push_back(std::move(to_verifier));
    }
    return outs;
}

std::vector<Outbound> OutsourcerActor::on_response(std::uint64_t now,
                                                   const SignedResponse& resp) {
    bool verifier_side;
    if (resp.contract_ref == contractor_ch_)
        verifier_side = false;
    else if (verifier_contract_ && resp.contract_ref == verifier_ch_)
        verifier_side = true;
    else {
        ++tamper_rejections_;
        log_.push_back({now, "response_rejected", "unknown contract"});
        return {};
    }
    PeerState& state = verifier_side ? verifier_state_ : contractor_state_;
    if (state.aborted) return {};

    const SignedInput* sent = nullptr;
    if (verifier_side) {
        auto it = inner_sent_.find(resp.input_index);
        sent = it == inner_sent_.end() ? nullptr : &it->second;
    } else {
        auto it = state.sent.find(resp.input_index);
        sent = it == state.sent.end() ? nullptr : &it->second;
    }
    const PublicKey& signer = verifier_side ? verifier_contract_->worker_pk
                                            : config_.contractor_contract.worker_pk;
    bool valid = sent != nullptr && resp.input_sig == sent->sig &&
                 verify(signer, response_sig_preimage(resp), resp.sig);
    if (!valid) {
        ++tamper_rejections_;
        return abort_peer(now, verifier_side, QosViolation::Timeout, "bad_response_signature");
    }

    state.ack += 1;
    state.qos.responses_received += 1;
    auto sent_it = state.sent_at.find(resp.input_index);
    if (sent_it != state.sent_at.end()) {
        state.qos.worst_response_time =
            std::max(state.qos.worst_response_time, now - sent_it->second);
        state.sent_at.erase(sent_it);
    }

    auto pending_it = pending_.find(resp.input_index);
    if (pending_it != pending_.end()) {
        if (verifier_side)
            pending_it->second.verifier_response = resp;
        else
            pending_it->second.contractor_response = resp;
        return maybe_compare(now, resp.input_index);
    }
    return {};
}

std::vector<Outbound> OutsourcerActor::maybe_compare(std::uint64_t now, std::uint32_t index) {
    auto it = pending_.find(index);
    if (it == pending_.end()) return {};
    PendingPair& pair = it->second;

    // Batched mode: the contractor half arrives via the challenged proof.
    if (config_.batching && !pair.contractor_response) return {};
    CompareOutcome outcome = compare_pair(pair);
    if (outcome == CompareOutcome::Incomplete) return {};
    if (outcome == CompareOutcome::Equal) {
        pending_.erase(it);
        return {};
    }
    if (accused_) return {};
    accused_ = true;
    first_accusation_at_ = now;
    auto sent_tick = input_sent_tick_.find(index);
    mismatch_input_sent_at_ = sent_tick != input_sent_tick_.end() ? sent_tick->second : now;
    Accusation acc;
    acc.signed_input = inner_sent_.at(index);
    acc.contractor_evidence = *pair.contractor_response;
    acc.verifier_response = *pair.verifier_response;
    acc.contractor_contract = config_.contractor_contract;
    acc.verifier_contract = *verifier_contract_;
    log_.push_back({now, "accusation_filed", "input " + std::to_string(index)});

    std::vector<Outbound> outs;
    outs.push_back(to_settlement(AccuseReq{std::move(acc)}));
    // Abort the contract pair: stop sending and settle up.
    for (Outbound& out : on_finish(now)) outs.push_back(std::move(out));
    return outs;
}

std::vector<Outbound> OutsourcerActor::on_root_commitment(std::uint64_t now,
                                                          const RootCommitment& rc) {
    if (rc.contract_ref != contractor_ch_ ||
        !verify(config_.contractor_contract.worker_pk, root_commitment_preimage(rc), rc.sig)) {
        ++tamper_rejections_;
        return abort_peer(now, false, QosViolation::Timeout, "bad_commitment_signature");
    }
    batch_commitments_[rc.batch_id] = rc;
    contractor_state_.ack += rc.leaf_count;  // batch verified as a whole

    // One membership challenge per batch: prefer a sampled index awaiting
    // comparison, otherwise a seeded-random leaf.
    std::uint32_t challenged = rc.first_index + static_cast<std::uint32_t>(
                                                    rng_.below(std::max(1u, rc.leaf_count)));
    for (const auto& [index, pair] : pending_) {
        if (index >= rc.first_index && index < rc.first_index + rc.leaf_count) {
            challenged = index;
            break;
        }
    }
    MembershipChallenge challenge;
    challenge.contract_ref = contractor_ch_;
    challenge.batch_id = rc.batch_id;
    challenge.challenged_index = challenged;
    challenge.sig = keys_.sign(membership_challenge_preimage(challenge));
    batch_challenges_[rc.batch_id] = challenge;
    Outbound out;
    out.dest = Outbound::Dest::Contractor;
    out.body = encode(challenge);
    return {std::move(out)};
}

std::vector<Outbound> OutsourcerActor::on_membership_proof(std::uint64_t now,
                                                           const MembershipProof& proof) {
    auto commitment_it = batch_commitments_.find(proof.batch_id);
    auto challenge_it = batch_challenges_.find(proof.batch_id);
    if (commitment_it == batch_commitments_.end() || challenge_it == batch_challenges_.end())
        return {};
    const RootCommitment& rc = commitment_it->second;
    const MembershipChallenge& challenge = challenge_it->second;
    if (proof.challenged_index != challenge.challenged_index ||
        proof.contract_ref != contractor_ch_) {
        ++tamper_rejections_;
        return abort_peer(now, false, QosViolation::Timeout, "bad_membership_proof");
    }
    Digest32 leaf = response_leaf(proof.challenged_index, proof.payload);
    std::uint32_t local = proof.challenged_index - rc.first_index;
    bool valid =
        verify(config_.contractor_contract.worker_pk,
               membership_proof_preimage(challenge, proof.payload), proof.sig) &&
        merkle_verify(rc.root, leaf, local, proof.path);
    if (!valid) {
        ++tamper_rejections_;
        return abort_peer(now, false, QosViolation::Timeout, "bad_membership_proof");
    }

    // The proof payload is the signed truth; a diverging tentative payload
    // means the unsigned record was tampered in flight.
    auto tentative = tentative_payloads_.find(proof.challenged_index);
    if (tentative != tentative_payloads_.end() && tentative->second != proof.payload)
        log_.push_back({now, "batched_tamper_detected",
                        "input " + std::to_string(proof.challenged_index)});

    auto pending_it = pending_.find(proof.challenged_index);
    if (pending_it == pending_.end() || !pending_it->second.verifier_response) return {};
    const SignedResponse& vresp = *pending_it->second.verifier_response;
    if (vresp.payload == proof.payload) {
        pending_.erase(pending_it);
        return {};
    }
    if (accused_) return {};
    accused_ = true;
    first_accusation_at_ = now;
    auto sent_tick = input_sent_tick_.find(proof.challenged_index);
    mismatch_input_sent_at_ = sent_tick != input_sent_tick_.end() ? sent_tick->second : now;
    Accusation acc;
    acc.signed_input = inner_sent_.at(proof.challenged_index);
    acc.contractor_evidence = BatchedEvidence{rc, challenge, proof};
    acc.verifier_response = vresp;
    acc.contractor_contract = config_.contractor_contract;
    acc.verifier_contract = *verifier_contract_;
    log_.push_back({now, "accusation_filed",
                    "batched input " + std::to_string(proof.challenged_index)});
    std::vector<Outbound> outs;
    outs.push_back(to_settlement(AccuseReq{std::move(acc)}));
    for (Outbound& out : on_finish(now)) outs.push_back(std::move(out));
    return outs;
}

std::vector<Outbound> OutsourcerActor::abort_peer(std::uint64_t now, bool verifier_side,
                                                  QosViolation violation,
                                                  const std::string& why) {
    PeerState& state = verifier_side ? verifier_state_ : contractor_state_;
    if (state.aborted) return {};
    state.aborted = true;
    state.qos.blacklisted = true;
    qos_events_.push_back({violation, why});
    log_.push_back({now, "contract_aborted",
                    std::string(verifier_side ? "verifier" : "contractor") + ": " + why});

    Termination termination;
    termination.contract_ref = verifier_side ? verifier_ch_ : contractor_ch_;
    termination.final_ack = state.ack;
    termination.sig = keys_.sign(termination_preimage(termination));
    Outbound out;
    out.dest = verifier_side ? Outbound::Dest::Verifier : Outbound::Dest::Contractor;
    out.body = encode(termination);
    return {std::move(out)};
}

std::vector<Outbound> OutsourcerActor::on_qos_sweep(std::uint64_t now) {
    if (!running_) return {};
    std::vector<Outbound> outs;
    for (bool verifier_side : {false, true}) {
        PeerState& state = verifier_side ? verifier_state_ : contractor_state_;
        if (state.aborted) continue;
        if (verifier_side && !verifier_contract_) continue;
        const QosThresholds& thresholds = verifier_side
                                              ? verifier_contract_->qos
                                              : config_.contractor_contract.qos;
        state.qos.timed_out_inputs = 0;
        for (const auto& [index, sent_at] : state.sent_at)
            if (now > sent_at && now - sent_at > thresholds.timeout)
                state.qos.timed_out_inputs += 1;
        state.qos.responses_due = state.qos.responses_received + state.qos.timed_out_inputs;
        QosResult result = qos_check(state.qos, thresholds);
        if (!result.ok) {
            for (Outbound& out :
                 abort_peer(now, verifier_side, result.violation,
                            qos_violation_name(result.violation)))
                outs.push_back(std::move(out));
        }
    }
    return outs;
}

std::vector<Outbound> OutsourcerActor::on_finish(std::uint64_t now) {
    if (finished_) return {};
    finished_ = true;
    std::vector<Outbound> outs;
    for (bool verifier_side : {false, true}) {
        PeerState& state = verifier_side ? verifier_state_ : contractor_state_;
        if (verifier_side && !verifier_contract_) continue;
        if (state.aborted) continue;
        Digest32 ch = verifier_side ? verifier_ch_ : contractor_ch_;
        // Final payment promise carrying the definitive ack count, then the
        // termination message. A payment refuser withholds the promise and
        // leaves the workers with the last in-stream acknowledgment.
        if (config_.strategy.kind != StrategyKind::PaymentRefuser) {
            SignedInput final_promise = make_signed_input(
                ch, state.stream_index, state.ack, 0, kFlagFinal, Bytes{});
            state.stream_index += 1;
            state.last_sent = final_promise;
            Outbound promise;
            promise.dest =
                verifier_side ? Outbound::Dest::Verifier : Outbound::Dest::Contractor;
            promise.body = encode(final_promise);
            outs.push_back(std::move(promise));
        }

        Termination termination;
        termination.contract_ref = ch;
        termination.final_ack = state.ack;
        termination.sig = keys_.sign(termination_preimage(termination));
        Outbound out;
        out.dest = verifier_side ? Outbound::Dest::Verifier : Outbound::Dest::Contractor;
        out.body = encode(termination);
        outs.push_back(std::move(out));
    }
    log_.push_back({now, "terminated", ""});
    return outs;
}

std::vector<Outbound> OutsourcerActor::on_review_phase(std::uint64_t now) {
    (void)now;
    if (config_.strategy.kind == StrategyKind::PaymentRefuser) return {};
    std::vector<Outbound> outs;
    auto review_for = [&](const Contract& contract, bool convicted, bool blacklisted) {
        std::int8_t score = convicted || blacklisted ? -1 : 1;
        Review review =
            make_review(keys_, contract.worker_pk, contract_hash(contract), score);
        outs.push_back(to_settlement(SubmitReviewReq{review}));
    };
    review_for(config_.contractor_contract, convicted_contractor_,
               contractor_state_.qos.blacklisted);
    if (verifier_contract_)
        review_for(*verifier_contract_, convicted_verifier_,
                   verifier_state_.qos.blacklisted);
    return outs;
}

std::vector<Outbound> OutsourcerActor::on_note(std::uint64_t now, const SettlementNote& note) {
    if (const auto* need = std::get_if<EntryProofNeededNote>(&note)) {
        // A deviant outsourcer that skipped randomization has no transcript.
        std::optional<EntryProof> proof;
        if (config_.strategy.kind != StrategyKind::Colluder) proof = transcript_;
        log_.push_back({now, "entry_proof_provided", proof ? "transcript" : "none"});
        return {to_settlement(ProvideEntryProofReq{need->case_id, proof})};
    }
    if (const auto* closed = std::get_if<CaseClosedNote>(&note)) {
        if (closed->convicted == PartyKind::Contractor) convicted_contractor_ = true;
        if (closed->convicted == PartyKind::Verifier) convicted_verifier_ = true;
        log_.push_back({now, "case_closed", party_name(closed->convicted)});
        return {};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Worker actor
// ---------------------------------------------------------------------------

WorkerActor::WorkerActor(WorkerConfig config)
    : config_(std::move(config)),
      keys_(KeyPair::from_seed(config_.key_seed)),
      rng_(config_.rng_seed),
      function_(make_function(config_.input_spec)),
      ch_(contract_hash(config_.contract)) {}

Outbound WorkerActor::to_outsourcer(Bytes bytes, std::uint64_t delay) const {
    Outbound out;
    out.dest = Outbound::Dest::Outsourcer;
    out.delay = delay;
    out.body = std::move(bytes);
    return out;
}

Outbound WorkerActor::to_settlement(SettlementRequest req) const {
    Outbound out;
    out.dest = Outbound::Dest::Settlement;
    out.body = std::move(req);
    return out;
}

std::vector<Outbound> WorkerActor::handle(std::uint64_t now, const ActorEvent& event) {
    if (const auto* wire = std::get_if<WireDelivery>(&event)) return on_wire(now, wire->bytes);
    if (const auto* note = std::get_if<SettlementNote>(&event)) return on_note(now, *note);
    if (const auto* answer = std::get_if<ContestAnswer>(&event))
        return on_contest_answer(now, *answer);
    if (std::get_if<ReviewPhase>(&event)) {
        std::int8_t score = aborted_ ? -1 : 1;
        Review review = make_review(keys_, config_.contract.outsourcer_pk, ch_, score);
        return {to_settlement(SubmitReviewReq{review})};
    }
    return {};
}

std::vector<Outbound> WorkerActor::on_wire(std::uint64_t now, ByteSpan bytes) {
    WireMessage msg;
    try {
        msg = decode_message(bytes);
    } catch (const MalformedMessage&) {
        ++tamper_rejections_;
        log_.push_back({now, "malformed_message", "dropped"});
        return {};
    }
    if (const auto* input = std::get_if<SignedInput>(&msg)) return on_signed_input(now, *input);
    if (const auto* challenge = std::get_if<MembershipChallenge>(&msg))
        return on_challenge(now, *challenge);
    if (const auto* termination = std::get_if<Termination>(&msg))
        return on_termination(now, *termination);
    if (const auto* oc = std::get_if<OutsourcerCommit>(&msg)) {
        // Randomization, contractor side: commit to (x, y, verifier list).
        if (config_.contract.role != Role::Contractor) return {};
        if (!verify(config_.contract.outsourcer_pk,
                    outsourcer_commit_preimage(oc->x_hash, oc->contract_ref), oc->sig)) {
            ++tamper_rejections_;
            log_.push_back({now, "bad_commit_signature", "aborting"});
            aborted_ = true;
            return {};
        }
        auto y = random_value(rng_);
        ContractorCommit cc = contractor_commit(*oc, y, config_.verifier_list_for_commit,
                                                keys_, config_.contract.outsourcer_pk);
        return {to_outsourcer(encode(cc), 0)};
    }
    return {};
}

std::vector<Outbound> WorkerActor::on_signed_input(std::uint64_t now, const SignedInput& msg) {
    if (aborted_ || done_) return {};
    if (msg.contract_ref != ch_ ||
        !verify(config_.contract.outsourcer_pk, input_sig_preimage(msg), msg.sig)) {
        ++tamper_rejections_;
        aborted_ = true;
        log_.push_back({now, "bad_input_signature", "contract aborted, peer blacklisted"});
        Termination termination;
        termination.contract_ref = ch_;
        termination.final_ack = 0;
        termination.sig = keys_.sign(termination_preimage(termination));
        return {to_outsourcer(encode(termination), 0)};
    }
    last_input_ = msg;
    if (msg.flags & kFlagFinal) return {};

    if (config_.contract.role == Role::Verifier) {
        // The payload is the contractor-stream signed input; countersign it.
        WireMessage inner_msg;
        try {
            inner_msg = decode_message(msg.payload);
        } catch (const MalformedMessage&) {
            ++tamper_rejections_;
            log_.push_back({now, "bad_envelope", "dropped"});
            return {};
        }
        const auto* inner = std::get_if<SignedInput>(&inner_msg);
        if (!inner || !verify(config_.contract.outsourcer_pk, input_sig_preimage(*inner),
                              inner->sig)) {
            ++tamper_rejections_;
            aborted_ = true;
            log_.push_back({now, "bad_inner_signature", "contract aborted"});
            return {};
        }
        return respond(now, *inner);
    }
    return respond(now, msg);
}

Bytes WorkerActor::produce_payload(ByteSpan input) {
    ++inputs_processed_;
    switch (config_.strategy.kind) {
        case StrategyKind::CheatRate: {
            bool cheat = rng_.chance(config_.strategy.rate);
            if (cheat) {
                ++cheats_produced_;
                return wrong_answer(function_, input);
            }
            return function_.evaluate(input);
        }
        case StrategyKind::QAlgorithm: {
            Bytes cheap = function_.cheap_answer(input);
            if (cheap != function_.evaluate(input)) ++cheats_produced_;
            return cheap;
        }
        case StrategyKind::Colluder:
            if (config_.strategy.knows_partner) {
                collusion_activated_ = true;
                ++cheats_produced_;
                return wrong_answer(function_, input);
            }
            return function_.evaluate(input);
        default:
            return function_.evaluate(input);
    }
}

std::vector<Outbound> WorkerActor::respond(std::uint64_t now, const SignedInput& inner) {
    Bytes payload = produce_payload(inner.payload);
    std::uint64_t delay = function_.cost_ticks;
    if (config_.strategy.kind == StrategyKind::SlowResponder)
        delay += config_.strategy.delay_ticks;

    if (config_.batching && config_.contract.role == Role::Contractor) {
        if (!open_batch_) {
            open_batch_ = Batch{};
            open_batch_->batch_id = next_batch_id_++;
            open_batch_->first_index = inner.input_index;
        }
        open_batch_->indices.push_back(inner.input_index);
        open_batch_->payloads.push_back(payload);
        open_batch_->leaves.push_back(response_leaf(inner.input_index, payload));
        BatchedResponse tentative;
        tentative.contract_ref = ch_;
        tentative.input_index = inner.input_index;
        tentative.payload = std::move(payload);
        ++responses_sent_;
        std::vector<Outbound> outs;
        outs.push_back(to_outsourcer(encode(tentative), delay));
        if (open_batch_->indices.size() >= config_.batch_size)
            for (Outbound& out : flush_batch(now)) outs.push_back(std::move(out));
        return outs;
    }

    SignedResponse resp;
    resp.contract_ref = ch_;
    resp.input_index = inner.input_index;
    resp.payload = std::move(payload);
    resp.input_sig = inner.sig;
    resp.sig = keys_.sign(response_sig_preimage(resp));
    ++responses_sent_;
    ++signed_responses_sent_;
    (void)now;
    return {to_outsourcer(encode(resp), delay)};
}

std::vector<Outbound> WorkerActor::flush_batch(std::uint64_t now) {
    (void)now;
    if (!open_batch_ || open_batch_->indices.empty()) return {};
    Batch batch = std::move(*open_batch_);
    open_batch_.reset();
    batch.tree = MerkleTree::build(batch.leaves);

    RootCommitment rc;
    rc.contract_ref = ch_;
    rc.batch_id = batch.batch_id;
    rc.first_index = batch.first_index;
    rc.leaf_count = static_cast<std::uint32_t>(batch.indices.size());
    rc.root = batch.tree->root();
    rc.sig = keys_.sign(root_commitment_preimage(rc));
    ++root_commitments_sent_;
    closed_batches_.emplace(batch.batch_id, std::move(batch));
    return {to_outsourcer(encode(rc), function_.cost_ticks)};
}

std::vector<Outbound> WorkerActor::on_challenge(std::uint64_t now,
                                                const MembershipChallenge& msg) {
    if (msg.contract_ref != ch_ ||
        !verify(config_.contract.outsourcer_pk, membership_challenge_preimage(msg), msg.sig)) {
        ++tamper_rejections_;
        log_.push_back({now, "bad_challenge_signature", "dropped"});
        return {};
    }
    auto it = closed_batches_.find(msg.batch_id);
    if (it == closed_batches_.end()) return {};
    const Batch& batch = it->second;
    if (msg.challenged_index < batch.first_index) return {};
    std::size_t local = msg.challenged_index - batch.first_index;
    if (local >= batch.indices.size()) return {};

    MembershipProof proof;
    proof.contract_ref = ch_;
    proof.batch_id = msg.batch_id;
    proof.challenged_index = msg.challenged_index;
    proof.payload = batch.payloads[local];
    proof.path = batch.tree->prove(local);
    proof.sig = keys_.sign(membership_proof_preimage(msg, proof.payload));
    ++signed_responses_sent_;
    return {to_outsourcer(encode(proof), function_.cost_ticks)};
}

std::vector<Outbound> WorkerActor::on_termination(std::uint64_t now, const Termination& msg) {
    if (msg.contract_ref != ch_ ||
        !verify(config_.contract.outsourcer_pk, termination_preimage(msg), msg.sig)) {
        ++tamper_rejections_;
        return {};
    }
    if (done_) return {};
    done_ = true;
    std::vector<Outbound> outs;
    if (config_.batching && open_batch_ && !open_batch_->indices.empty())
        for (Outbound& out : flush_batch(now)) outs.push_back(std::move(out));
    for (Outbound& out : redeem_now(now)) outs.push_back(std::move(out));
    return outs;
}

std::vector<Outbound> WorkerActor::redeem_now(std::uint64_t now) {
    (void)now;
    if (redeemed_ || !last_input_) return {};
    redeemed_ = true;
    std::vector<Outbound> outs;
    if (config_.forge_redemption) {
        // Inflated claim: the ack count is raised but the signature is the
        // outsourcer's original, so the settlement check must fail.
        SignedInput forged = *last_input_;
        forged.ack_count += 25;
        outs.push_back(to_settlement(RedeemReq{forged, config_.contract}));
        log_.push_back({now, "forged_redemption_submitted", ""});
    }
    outs.push_back(to_settlement(RedeemReq{*last_input_, config_.contract}));
    return outs;
}

std::vector<Outbound> WorkerActor::on_note(std::uint64_t now, const SettlementNote& note) {
    if (const auto* opened = std::get_if<CaseOpenedNote>(&note)) {
        if (opened->accused != keys_.public_key()) return {};
        case_inputs_[opened->case_id] = opened->input_payload;
        if (config_.contest_behavior == ContestBehavior::GiveUp) {
            log_.push_back({now, "accused", "giving up"});
            return {};
        }
        log_.push_back({now, "accused", "opening contestation"});
        return {to_settlement(OpenContestationReq{opened->case_id, keys_.public_key()})};
    }
    if (const auto* assigned = std::get_if<ContestAssignedNote>(&note)) {
        case_inputs_[assigned->case_id] = assigned->input_payload;
        if (config_.contest_behavior == ContestBehavior::Forge) {
            // Fabricated verifier records: correct keys, garbage signatures.
            ContestSubmission forged;
            forged.first.verifier = assigned->first;
            forged.first.payload = function_.cheap_answer(assigned->input_payload);
            forged.first.sig = Signature64::from_bytes(rng_.bytes(64));
            forged.second.verifier = assigned->second;
            forged.second.payload = forged.first.payload;
            forged.second.sig = Signature64::from_bytes(rng_.bytes(64));
            log_.push_back({now, "forged_contest_submitted", ""});
            return {to_settlement(
                SubmitContestReq{assigned->case_id, keys_.public_key(), forged})};
        }
        ContestAsk ask;
        ask.case_id = assigned->case_id;
        ask.input_payload = assigned->input_payload;
        ask.from = keys_.public_key();
        std::vector<Outbound> outs;
        for (const PublicKey& pk : {assigned->first, assigned->second}) {
            Outbound out;
            out.dest = Outbound::Dest::Peer;
            out.peer = pk;
            out.body = ask;
            outs.push_back(std::move(out));
        }
        return outs;
    }
    if (const auto* failed = std::get_if<ContestFailedNote>(&note)) {
        if (config_.contest_behavior != ContestBehavior::ContestWhenAccused) return {};
        log_.push_back({now, "contest_failed", failed->reason});
        // An innocent worker keeps trying while fresh verifiers remain.
        return {to_settlement(OpenContestationReq{failed->case_id, keys_.public_key()})};
    }
    if (const auto* closed = std::get_if<CaseClosedNote>(&note)) {
        if (closed->convicted_pk == keys_.public_key()) case_lost_ = true;
        log_.push_back({now, "case_closed", party_name(closed->convicted)});
        return {};
    }
    return {};
}

std::vector<Outbound> WorkerActor::on_contest_answer(std::uint64_t now,
                                                     const ContestAnswer& answer) {
    auto& answers = case_answers_[answer.case_id];
    answers.push_back(answer);
    if (answers.size() < 2) return {};
    ContestSubmission submission;
    submission.first = answers[0].record;
    submission.second = answers[1].record;
    answers.clear();
    log_.push_back({now, "contest_submitted", ""});
    return {to_settlement(
        SubmitContestReq{answer.case_id, keys_.public_key(), submission})};
}

// ---------------------------------------------------------------------------
// Pool verifier actor
// ---------------------------------------------------------------------------

PoolVerifierActor::PoolVerifierActor(PoolVerifierConfig config)
    : config_(std::move(config)),
      keys_(KeyPair::from_seed(config_.key_seed)),
      function_(make_function(config_.input_spec)) {}

std::vector<Outbound> PoolVerifierActor::handle(std::uint64_t now, const ActorEvent& event) {
    (void)now;
    const auto* ask = std::get_if<ContestAsk>(&event);
    if (!ask) return {};
    ContestAnswer answer;
    answer.case_id = ask->case_id;
    answer.record.verifier = keys_.public_key();
    answer.record.payload = config_.colluding ? wrong_answer(function_, ask->input_payload)
                                              : function_.evaluate(ask->input_payload);
    answer.record.sig = keys_.sign(
        contest_response_preimage(sha256(ask->input_payload), answer.record.payload));
    Outbound out;
    out.dest = Outbound::Dest::Peer;
    out.peer = ask->from;
    out.delay = function_.cost_ticks;
    out.body = answer;
    return {std::move(out)};
}

// ---------------------------------------------------------------------------
// Fast detection trials
// ---------------------------------------------------------------------------

DetectionTrialStats run_detection_trials(std::uint64_t seed, std::uint32_t trials,
                                         double cheat_rate, std::uint32_t intervals,
                                         std::uint32_t interval_size, const InputSpec& spec) {
    ComputeFunction fn = make_function(spec);
    SplitMix64 root(seed);
    DetectionTrialStats stats;
    stats.trials = trials;
    std::uint32_t total = intervals * interval_size;

    for (std::uint32_t t = 0; t < trials; ++t) {
        std::uint64_t schedule_seed = root.next();
        std::uint64_t input_seed = root.next();
        SplitMix64 cheat_rng(root.next());
        SamplingSchedule schedule = sample_schedule(schedule_seed, total, interval_size);
        bool detected = false;
        for (std::uint32_t index = 0; index < total; ++index) {
            bool cheat = cheat_rng.chance(cheat_rate);
            if (!cheat || detected || !schedule.is_sampled(index)) continue;
            SplitMix64 input_rng(input_seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
            Bytes input = generate_input(spec, input_rng);
            Bytes honest = fn.evaluate(input);
            Bytes produced = wrong_answer(fn, input);
            if (produced != honest) detected = true;  // compare_pair on the sampled index
        }
        stats.detected += detected;
    }
    stats.rate = trials == 0 ? 0.0 : static_cast<double>(stats.detected) / trials;
    return stats;
}

}  // namespace verimark
