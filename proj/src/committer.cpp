#include <redledger/committer.hpp>

#include <algorithm>
#include <chrono>
#include <unordered_map>

namespace redledger {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool is_matched_write(const WriteEntry &w) { return w.needs_preimage() && !w.value_digest.is_zero(); }

} // namespace

std::string_view to_string(Verdict v) { return v == Verdict::success ? "Success" : "ValidationError"; }

std::string_view to_string(HeaderCheck h) {
    switch (h) {
    case HeaderCheck::ok: return "ok";
    case HeaderCheck::wrong_number: return "wrong block number";
    case HeaderCheck::broken_link: return "previous-hash link broken";
    case HeaderCheck::bad_data_hash: return "data hash mismatch";
    case HeaderCheck::bad_signature: return "orderer signature invalid";
    }
    return "unknown";
}

PreimageCheck check_preimages(const Block &block) {
    PreimageCheck out;
    const auto &entries = block.preimages.entries;

    // The pool of hashed preimages, sorted so equal digests are adjacent and each group
    // is consumed lowest index first.
    std::vector<std::pair<Digest, std::size_t>> pool;
    pool.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (PreimageSpace::is_redacted(entries[i]))
            ++out.preimage_redaction_counter;
        else
            pool.emplace_back(hash(entries[i]), i);
    }
    std::sort(pool.begin(), pool.end());
    std::vector<bool> consumed(pool.size(), false);

    out.mismatches_per_tx.assign(block.transactions.size(), 0);
    out.matched.resize(block.transactions.size());
    for (std::size_t t = 0; t < block.transactions.size(); ++t) {
        const auto &tx = block.transactions[t];
        auto &matched = out.matched[t];
        matched.assign(tx.write_set.size(), PreimageCheck::npos);
        for (std::size_t w = 0; w < tx.write_set.size(); ++w) {
            const auto &write = tx.write_set[w];
            if (!is_matched_write(write)) continue;
            auto it = std::lower_bound(pool.begin(), pool.end(), std::make_pair(write.value_digest, std::size_t{0}));
            for (; it != pool.end() && it->first == write.value_digest; ++it) {
                auto pos = static_cast<std::size_t>(it - pool.begin());
                if (consumed[pos]) continue;
                consumed[pos] = true;
                matched[w] = it->second;
                break;
            }
            if (matched[w] == PreimageCheck::npos) ++out.mismatches_per_tx[t];
        }
        out.hash_mismatch_counter += out.mismatches_per_tx[t];
    }
    out.unclaimed_preimages = static_cast<std::uint32_t>(std::count(consumed.begin(), consumed.end(), false));
    out.verdict = out.preimage_redaction_counter == out.hash_mismatch_counter && out.unclaimed_preimages == 0
                      ? Verdict::success
                      : Verdict::validation_error;
    return out;
}

std::vector<ValidityFlag> mvcc_validate(const Block &block, const StateStore &state,
                                        std::span<const ValidityFlag> prior) {
    std::vector<ValidityFlag> flags(block.transactions.size(), ValidityFlag::valid);
    if (!prior.empty()) {
        if (prior.size() != flags.size()) throw Error{"prior flags do not match the block"};
        std::copy(prior.begin(), prior.end(), flags.begin());
    }

    auto view = state.read_view();
    std::unordered_map<Bytes, Version, BytesHash> in_block;
    for (std::uint32_t i = 0; i < block.transactions.size(); ++i) {
        const auto &tx = block.transactions[i];
        if (flags[i] != ValidityFlag::valid || tx.kind != TxKind::endorsed) continue;
        bool stale = false;
        for (const auto &r : tx.read_set) {
            Version current;
            if (auto it = in_block.find(r.key); it != in_block.end())
                current = it->second;
            else if (auto e = view.get(r.key))
                current = e->version;
            if (current != r.version) {
                stale = true;
                break;
            }
        }
        if (stale) {
            flags[i] = ValidityFlag::mvcc_invalid;
            continue;
        }
        for (const auto &w : tx.write_set) in_block[w.key] = Version{block.header.number, i};
    }
    return flags;
}

HeaderCheck check_header(const Block &block, std::uint64_t expected_number, const Digest &expected_prev,
                         std::span<const PublicKey> orderers) {
    if (block.header.number != expected_number) return HeaderCheck::wrong_number;
    if (block.header.prev_hash != expected_prev) return HeaderCheck::broken_link;
    if (compute_data_hash(block.transactions) != block.header.data_hash) return HeaderCheck::bad_data_hash;
    auto msg = orderer_signing_bytes(block.header, block.transactions);
    bool signed_ok = std::any_of(orderers.begin(), orderers.end(),
                                 [&](const PublicKey &pk) { return verify(pk, msg, block.orderer_signature); });
    return signed_ok ? HeaderCheck::ok : HeaderCheck::bad_signature;
}

// Same checks over the raw encoding, without re-serialising.
static HeaderCheck check_encoded_header(ByteView encoded, const BlockLayout &layout, const Block &block,
                                        std::uint64_t expected_number, const Digest &expected_prev,
                                        std::span<const PublicKey> orderers) {
    if (block.header.number != expected_number) return HeaderCheck::wrong_number;
    if (block.header.prev_hash != expected_prev) return HeaderCheck::broken_link;
    auto txs = encoded.subspan(layout.transactions_begin, layout.transactions_end - layout.transactions_begin);
    if (hash(txs) != block.header.data_hash) return HeaderCheck::bad_data_hash;
    auto msg = encoded.first(layout.transactions_end);
    bool signed_ok = std::any_of(orderers.begin(), orderers.end(),
                                 [&](const PublicKey &pk) { return verify(pk, msg, block.orderer_signature); });
    return signed_ok ? HeaderCheck::ok : HeaderCheck::bad_signature;
}

Committer::Committer(PeerConfig config, BlockStore ledger, StateStore state)
    : config_{std::move(config)}, ledger_{std::move(ledger)}, state_{std::move(state)} {
    if (state_.height() != ledger_.height())
        throw StateError{"state height " + std::to_string(state_.height()) + " does not match ledger height " +
                         std::to_string(ledger_.height())};
    if (ledger_.height() > 0) last_header_hash_ = compute_block_hash(ledger_.read(ledger_.height() - 1).header);
}

ValidityFlag Committer::policy_flag(const Transaction &tx) const {
    switch (tx.kind) {
    case TxKind::config: return ValidityFlag::valid;

    case TxKind::endorsed: {
        if (tx.write_set.empty()) return ValidityFlag::policy_invalid;
        for (const auto &w : tx.write_set) {
            if (config_.mode == LedgerMode::redactable && w.inline_value) return ValidityFlag::policy_invalid;
            if (config_.mode == LedgerMode::baseline && w.needs_preimage()) return ValidityFlag::policy_invalid;
        }
        auto check = check_signatures(config_.endorsement_policy, endorsement_signing_bytes(tx), tx.endorsements);
        return check == PolicyCheck::ok ? ValidityFlag::valid : ValidityFlag::policy_invalid;
    }

    case TxKind::redaction: {
        if (config_.mode == LedgerMode::baseline) return ValidityFlag::policy_invalid;
        RedactionRequest req;
        try {
            req = decode_redaction_request(tx.payload);
        } catch (const DecodeError &) {
            return ValidityFlag::policy_invalid;
        }
        if (req.txid() != tx.txid || req.keys.empty()) return ValidityFlag::policy_invalid;
        if (check_signatures(config_.redaction_policy, req.signing_bytes(), req.approvals) != PolicyCheck::ok)
            return ValidityFlag::policy_invalid;
        // The target must already be on this peer's chain.
        auto loc = state_.locate(req.target_txid);
        if (!loc) return ValidityFlag::policy_invalid;
        auto target = ledger_.read(loc->block).transactions.at(loc->tx_index);
        if (target.kind != TxKind::endorsed) return ValidityFlag::policy_invalid;
        for (const auto &k : req.keys) {
            bool written = std::any_of(target.write_set.begin(), target.write_set.end(),
                                       [&](const WriteEntry &w) { return w.key == k; });
            if (!written) return ValidityFlag::policy_invalid;
        }
        return ValidityFlag::valid;
    }
    }
    return ValidityFlag::policy_invalid;
}

BlockValidationReport Committer::validate_block(const Block &block) const {
    BlockValidationReport report;
    report.preimages = check_preimages(block);
    report.preimage_redaction_counter = report.preimages.preimage_redaction_counter;
    report.hash_mismatch_counter = report.preimages.hash_mismatch_counter;
    report.unclaimed_preimages = report.preimages.unclaimed_preimages;
    report.verdict = report.preimages.verdict;
    for (std::size_t i = 0; i < block.transactions.size(); ++i)
        if (report.preimages.mismatches_per_tx[i] > 0) report.redacted_txids.push_back(block.transactions[i].txid);

    std::vector<ValidityFlag> prior;
    prior.reserve(block.transactions.size());
    for (const auto &tx : block.transactions) prior.push_back(policy_flag(tx));
    report.flags = mvcc_validate(block, state_, prior);
    return report;
}

void Committer::commit_block(const Block &block, const BlockValidationReport &report, CommitTimings *timings) {
    commit_impl(block, report, {}, timings);
}

void Committer::commit_impl(const Block &block, const BlockValidationReport &report, ByteView signed_and_preimages,
                            CommitTimings *timings) {
    if (report.verdict != Verdict::success) throw BlockRejected{"cannot commit a block that failed validation"};
    if (report.flags.size() != block.transactions.size()) throw BlockRejected{"report does not match block"};
    if (block.header.number != ledger_.height())
        throw BlockRejected{"commit gap: expected block " + std::to_string(ledger_.height())};

    auto t0 = Clock::now();
    WriteBatch batch;
    batch.block_number = block.header.number;
    std::vector<RedactionRequest> redactions;
    for (std::uint32_t i = 0; i < block.transactions.size(); ++i) {
        const auto &tx = block.transactions[i];
        IndexedTx indexed{tx.txid, i, {}};
        if (tx.kind == TxKind::endorsed) {
            indexed.written_keys.reserve(tx.write_set.size());
            for (const auto &w : tx.write_set) indexed.written_keys.push_back(w.key);
        }
        batch.txs.push_back(std::move(indexed));
        if (report.flags[i] != ValidityFlag::valid) continue;

        if (tx.kind == TxKind::redaction) {
            redactions.push_back(decode_redaction_request(tx.payload));
            continue;
        }
        if (tx.kind != TxKind::endorsed) continue;
        const auto &matched = report.preimages.matched.at(i);
        for (std::size_t w = 0; w < tx.write_set.size(); ++w) {
            const auto &write = tx.write_set[w];
            StateWrite sw;
            sw.tx_index = i;
            sw.key = write.key;
            if (write.is_delete) {
                sw.is_delete = true;
            } else if (write.inline_value) {
                sw.value = write.inline_value;
            } else if (matched[w] != PreimageCheck::npos) {
                auto value = split_preimage(block.preimages.entries[matched[w]]).second;
                sw.value = Bytes(value.begin(), value.end());
            } // else: preimage gone, the key is crippled
            batch.writes.push_back(std::move(sw));
        }
    }
    if (timings) timings->resolve_s += seconds_since(t0);

    t0 = Clock::now();
    std::uint64_t offset;
    if (signed_and_preimages.empty()) {
        Block stored = block;
        stored.validity_flags = report.flags;
        offset = ledger_.append(stored);
    } else {
        ByteWriter w{signed_and_preimages.size() + 4 + report.flags.size()};
        w.raw(signed_and_preimages);
        w.count(report.flags.size());
        for (auto f : report.flags) w.u8(static_cast<std::uint8_t>(f));
        offset = ledger_.append_encoded(w.buffer());
    }
    if (timings) timings->append_s += seconds_since(t0);

    t0 = Clock::now();
    batch.file_offset = offset;
    state_.apply_write_batch(batch);
    last_header_hash_ = compute_block_hash(block.header);
    if (timings) timings->apply_s += seconds_since(t0);

    for (const auto &r : redactions) apply_redaction(r.target_txid, r.keys);
}

BlockValidationReport Committer::process(const Block &block) {
    auto h = check_header(block, ledger_.height(), ledger_.height() == 0 ? Digest{} : last_header_hash_,
                          config_.orderers);
    if (h != HeaderCheck::ok)
        throw BlockRejected{"block " + std::to_string(block.header.number) + ": " + std::string{to_string(h)}};
    auto report = validate_block(block);
    if (report.verdict != Verdict::success)
        throw BlockRejected{"block " + std::to_string(block.header.number) + ": preimage validation failed (" +
                            std::to_string(report.preimage_redaction_counter) + " redacted, " +
                            std::to_string(report.hash_mismatch_counter) + " unmatched, " +
                            std::to_string(report.unclaimed_preimages) + " unclaimed)"};
    commit_block(block, report);
    return report;
}

BlockValidationReport Committer::process_encoded(ByteView encoded, CommitTimings *timings) {
    auto t0 = Clock::now();
    BlockLayout layout;
    auto block = decode_block(encoded, &layout);
    auto h = check_encoded_header(encoded, layout, block, ledger_.height(),
                                  ledger_.height() == 0 ? Digest{} : last_header_hash_, config_.orderers);
    if (h != HeaderCheck::ok)
        throw BlockRejected{"block " + std::to_string(block.header.number) + ": " + std::string{to_string(h)}};
    auto report = validate_block(block);
    if (report.verdict != Verdict::success)
        throw BlockRejected{"block " + std::to_string(block.header.number) + ": preimage validation failed"};
    if (timings) timings->validate_s += seconds_since(t0);
    commit_impl(block, report, encoded.first(layout.flags_begin), timings);
    return report;
}

std::size_t Committer::apply_redaction(const Digest &target, std::span<const Bytes> keys) {
    auto loc = state_.locate(target);
    if (!loc) throw Error{"redaction target " + target.hex() + " is not on this peer's chain"};
    return zero_transaction_preimages(ledger_, loc->block, loc->tx_index, keys);
}

} // namespace redledger
