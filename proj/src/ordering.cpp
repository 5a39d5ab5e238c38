#include <redledger/ordering.hpp>

#include <algorithm>
#include <mutex>

namespace redledger {

void OrderingConfig::validate() const {
    if (max_txs_per_block < 1) throw Error{"max_txs_per_block must be at least 1"};
    if (max_block_bytes < 1) throw Error{"max_block_bytes must be at least 1"};
    endorsement_policy.validate();
    if (mode == LedgerMode::redactable) redaction_policy.validate();
}

std::string_view to_string(RejectReason r) {
    switch (r) {
    case RejectReason::bad_signature: return "BadSignature";
    case RejectReason::policy_unmet: return "PolicyUnmet";
    case RejectReason::preimage_mismatch: return "PreimageMismatch";
    case RejectReason::unknown_redaction_target: return "UnknownRedactionTarget";
    case RejectReason::duplicate_txid: return "DuplicateTxid";
    case RejectReason::redaction_disabled: return "RedactionDisabled";
    case RejectReason::malformed: return "Malformed";
    }
    return "Unknown";
}

Block form_block(std::uint64_t number, const Digest &prev_hash, std::span<const TransactionEnvelope> envelopes,
                 const KeyPair &orderer) {
    Block b;
    b.header.number = number;
    b.header.prev_hash = prev_hash;
    b.transactions.reserve(envelopes.size());
    for (const auto &env : envelopes) {
        b.transactions.push_back(env.tx);
        for (const auto &p : env.preimages) b.preimages.entries.push_back(p);
    }
    b.header.data_hash = compute_data_hash(b.transactions);
    b.orderer_signature = orderer.sign(orderer_signing_bytes(b.header, b.transactions));
    return b;
}

OrderingService::OrderingService(OrderingConfig config, KeyPair orderer_key, BlockStore store)
    : config_{std::move(config)}, key_{std::move(orderer_key)}, store_{std::move(store)} {
    config_.validate();
    for (std::uint64_t n = 0; n < store_.height(); ++n) {
        auto b = store_.read(n);
        index_block(b);
        last_header_hash_ = compute_block_hash(b.header);
    }
}

void OrderingService::index_block(const Block &block) {
    for (std::uint32_t i = 0; i < block.transactions.size(); ++i) {
        const auto &tx = block.transactions[i];
        located_[tx.txid] = Located{block.header.number, i, tx.kind};
    }
}

AdmitResult OrderingService::admit(const TransactionEnvelope &env) const {
    std::shared_lock lock{mutex_};
    if (located_.contains(env.tx.txid) || queued_ids_.contains(env.tx.txid))
        return AdmitResult::reject(RejectReason::duplicate_txid, env.tx.txid.hex());
    switch (env.tx.kind) {
    case TxKind::endorsed: return admit_endorsed(env);
    case TxKind::redaction: return admit_redaction(env);
    case TxKind::config: break;
    }
    return AdmitResult::reject(RejectReason::malformed, "configuration transactions are not submitted by clients");
}

AdmitResult OrderingService::admit_endorsed(const TransactionEnvelope &env) const {
    const auto &tx = env.tx;
    if (tx.write_set.empty()) return AdmitResult::reject(RejectReason::malformed, "empty write set");
    if (!tx.payload.empty()) return AdmitResult::reject(RejectReason::malformed, "unexpected payload");
    for (const auto &w : tx.write_set) {
        if (w.is_delete && (w.inline_value || !w.value_digest.is_zero()))
            return AdmitResult::reject(RejectReason::malformed, "delete carries a value");
        if (config_.mode == LedgerMode::redactable && w.inline_value)
            return AdmitResult::reject(RejectReason::malformed, "inline value on a redactable ledger");
        if (config_.mode == LedgerMode::baseline && !w.is_delete && !w.inline_value)
            return AdmitResult::reject(RejectReason::malformed, "hashed value on a baseline ledger");
    }

    switch (check_signatures(config_.endorsement_policy, endorsement_signing_bytes(tx), tx.endorsements)) {
    case PolicyCheck::ok: break;
    case PolicyCheck::bad_signature: return AdmitResult::reject(RejectReason::bad_signature);
    case PolicyCheck::unmet: return AdmitResult::reject(RejectReason::policy_unmet);
    }

    std::size_t p = 0;
    for (const auto &w : tx.write_set) {
        if (!w.needs_preimage()) continue;
        if (p >= env.preimages.size())
            return AdmitResult::reject(RejectReason::preimage_mismatch, "missing preimage");
        const auto &pre = env.preimages[p++];
        if (pre.size() < Salt::size || PreimageSpace::is_redacted(pre) || hash(pre) != w.value_digest)
            return AdmitResult::reject(RejectReason::preimage_mismatch,
                                       "preimage " + std::to_string(p - 1) + " does not match its digest");
    }
    if (p != env.preimages.size())
        return AdmitResult::reject(RejectReason::preimage_mismatch, "extra preimages");
    return AdmitResult::ok();
}

AdmitResult OrderingService::admit_redaction(const TransactionEnvelope &env) const {
    if (config_.mode == LedgerMode::baseline) return AdmitResult::reject(RejectReason::redaction_disabled);
    const auto &tx = env.tx;
    if (!tx.read_set.empty() || !tx.write_set.empty() || !tx.endorsements.empty() || !env.preimages.empty())
        return AdmitResult::reject(RejectReason::malformed, "redaction carries reads, writes or preimages");
    RedactionRequest req;
    try {
        req = decode_redaction_request(tx.payload);
    } catch (const DecodeError &e) {
        return AdmitResult::reject(RejectReason::malformed, e.what());
    }
    if (req.txid() != tx.txid) return AdmitResult::reject(RejectReason::malformed, "txid does not match request");

    switch (check_signatures(config_.redaction_policy, req.signing_bytes(), req.approvals)) {
    case PolicyCheck::ok: break;
    case PolicyCheck::bad_signature: return AdmitResult::reject(RejectReason::bad_signature);
    case PolicyCheck::unmet: return AdmitResult::reject(RejectReason::policy_unmet);
    }

    auto it = located_.find(req.target_txid);
    if (it == located_.end() || it->second.kind != TxKind::endorsed)
        return AdmitResult::reject(RejectReason::unknown_redaction_target, req.target_txid.hex());
    if (req.keys.empty()) return AdmitResult::reject(RejectReason::unknown_redaction_target, "no keys named");
    auto target = store_.read(it->second.block).transactions.at(it->second.tx_index);
    for (const auto &k : req.keys) {
        bool written = std::any_of(target.write_set.begin(), target.write_set.end(),
                                   [&](const WriteEntry &w) { return w.key == k; });
        if (!written)
            return AdmitResult::reject(RejectReason::unknown_redaction_target,
                                       "target does not write key '" + to_string(k) + "'");
    }
    return AdmitResult::ok();
}

AdmitResult OrderingService::submit(TransactionEnvelope env, Millis now) {
    auto result = admit(env);
    if (!result) return result;
    std::unique_lock lock{mutex_};
    // Re-check under the writer lock: two identical envelopes may race through admit().
    if (queued_ids_.contains(env.tx.txid) || located_.contains(env.tx.txid))
        return AdmitResult::reject(RejectReason::duplicate_txid, env.tx.txid.hex());
    auto bytes = encode(env).size();
    queued_ids_.insert(env.tx.txid);
    queued_bytes_ += bytes;
    queue_.push_back({std::move(env), bytes, now});
    return result;
}

void OrderingService::submit_config(Bytes payload, Millis now) {
    ByteWriter w;
    w.raw(to_bytes("config"));
    w.u64(store_.height());
    w.bytes(payload);
    TransactionEnvelope env;
    env.tx.txid = hash(w.buffer());
    env.tx.kind = TxKind::config;
    env.tx.payload = std::move(payload);
    std::unique_lock lock{mutex_};
    auto bytes = encode(env).size();
    queued_ids_.insert(env.tx.txid);
    queued_bytes_ += bytes;
    queue_.push_back({std::move(env), bytes, now});
}

bool OrderingService::should_cut(Millis now) const {
    std::shared_lock lock{mutex_};
    if (queue_.empty()) return false;
    if (queue_.size() >= config_.max_txs_per_block) return true;
    if (queued_bytes_ >= config_.max_block_bytes) return true;
    return now - queue_.front().arrived >= config_.batch_timeout;
}

std::optional<Block> OrderingService::poll(Millis now) {
    if (!should_cut(now)) return std::nullopt;
    return cut_block();
}

Block OrderingService::cut_block() {
    std::unique_lock lock{mutex_};
    if (queue_.empty()) throw Error{"cut_block called with an empty queue"};

    std::vector<TransactionEnvelope> batch;
    std::size_t bytes = 0;
    while (!queue_.empty() && batch.size() < config_.max_txs_per_block) {
        auto &next = queue_.front();
        if (!batch.empty() && bytes + next.bytes > config_.max_block_bytes) break;
        bytes += next.bytes;
        queued_bytes_ -= next.bytes;
        queued_ids_.erase(next.env.tx.txid);
        batch.push_back(std::move(next.env));
        queue_.pop_front();
    }

    auto number = store_.height();
    auto block = form_block(number, number == 0 ? Digest{} : last_header_hash_, batch, key_);
    store_.append(block);
    index_block(block);
    last_header_hash_ = compute_block_hash(block.header);

    std::vector<RedactionRequest> redactions;
    for (const auto &tx : block.transactions)
        if (tx.kind == TxKind::redaction) redactions.push_back(decode_redaction_request(tx.payload));
    lock.unlock();
    for (const auto &r : redactions) apply_redaction_at_orderer(r.target_txid, r.keys);
    return block;
}

void OrderingService::apply_redaction_at_orderer(const Digest &target, std::span<const Bytes> keys) {
    std::unique_lock lock{mutex_};
    auto it = located_.find(target);
    if (it == located_.end()) throw Error{"redaction target " + target.hex() + " is not on the chain"};
    zero_transaction_preimages(store_, it->second.block, it->second.tx_index, keys);
}

std::size_t OrderingService::pending() const {
    std::shared_lock lock{mutex_};
    return queue_.size();
}

std::uint64_t OrderingService::height() const {
    std::shared_lock lock{mutex_};
    return store_.height();
}

} // namespace redledger
