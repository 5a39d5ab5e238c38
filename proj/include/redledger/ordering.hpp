#pragma once

#include <redledger/block_store.hpp>
#include <redledger/policy.hpp>

#include <chrono>
#include <deque>
#include <shared_mutex>
#include <unordered_map>
#include <unordered_set>

namespace redledger {

struct OrderingConfig {
    std::uint32_t max_txs_per_block = 100;
    std::uint32_t max_block_bytes = 1u << 20;
    std::chrono::milliseconds batch_timeout{2000};
    ThresholdPolicy endorsement_policy;
    ThresholdPolicy redaction_policy;
    LedgerMode mode = LedgerMode::redactable;

    void validate() const;
};

enum class RejectReason {
    bad_signature,
    policy_unmet,
    preimage_mismatch,
    unknown_redaction_target,
    duplicate_txid,
    redaction_disabled,
    malformed,
};
std::string_view to_string(RejectReason r);

struct AdmitResult {
    bool accepted = true;
    RejectReason reason = RejectReason::malformed;
    std::string detail;

    static AdmitResult ok() { return {}; }
    static AdmitResult reject(RejectReason r, std::string detail = {}) { return {false, r, std::move(detail)}; }
    explicit operator bool() const { return accepted; }
};

// Assembles and signs a block: preimages are laid out in transaction order, then write order.
Block form_block(std::uint64_t number, const Digest &prev_hash, std::span<const TransactionEnvelope> envelopes,
                 const KeyPair &orderer);

// Single deterministic sequencer standing in for an atomic broadcast service. Time is
// logical: callers pass `now` so block cutting is reproducible.
class OrderingService {
public:
    using Millis = std::chrono::milliseconds;

    OrderingService(OrderingConfig config, KeyPair orderer_key, BlockStore store);

    const OrderingConfig &config() const { return config_; }
    const PublicKey &public_key() const { return key_.public_key(); }

    AdmitResult admit(const TransactionEnvelope &env) const;
    // admit() and, if accepted, enqueue.
    AdmitResult submit(TransactionEnvelope env, Millis now = Millis{0});
    // Enqueues a configuration transaction; not subject to admission policies.
    void submit_config(Bytes payload, Millis now = Millis{0});

    // Count threshold, then byte threshold, then timeout.
    bool should_cut(Millis now) const;
    std::optional<Block> poll(Millis now);
    // Cuts one block from the head of the queue. Throws Error when nothing is pending.
    Block cut_block();

    // Zeroes, in the orderer's own copy, the preimages of `keys` written by `target`.
    void apply_redaction_at_orderer(const Digest &target, std::span<const Bytes> keys);

    std::size_t pending() const;
    std::uint64_t height() const;
    const BlockStore &store() const { return store_; }

private:
    struct Pending {
        TransactionEnvelope env;
        std::size_t bytes;
        Millis arrived;
    };
    struct Located {
        std::uint64_t block;
        std::uint32_t tx_index;
        TxKind kind;
    };

    AdmitResult admit_endorsed(const TransactionEnvelope &env) const;
    AdmitResult admit_redaction(const TransactionEnvelope &env) const;
    void index_block(const Block &block);

    OrderingConfig config_;
    KeyPair key_;
    BlockStore store_;
    mutable std::shared_mutex mutex_;
    std::deque<Pending> queue_;
    std::size_t queued_bytes_ = 0;
    std::unordered_map<Digest, Located, DigestHash> located_;
    std::unordered_set<Digest, DigestHash> queued_ids_;
    Digest last_header_hash_;
};

} // namespace redledger
