#pragma once

#include <redledger/chaincodes.hpp>
#include <redledger/committer.hpp>
#include <redledger/ordering.hpp>

namespace redledger {

// Shape of a single-process network: one orderer, one committing peer, and a set of
// endorsers and redaction approvers. All identities derive from `key_seed`.
struct NetworkSetup {
    LedgerMode mode = LedgerMode::redactable;
    std::uint32_t endorsers = 1;
    std::uint32_t endorsement_threshold = 1;
    std::uint32_t redactors = 1;
    std::uint32_t redaction_threshold = 1;
    std::uint32_t max_txs_per_block = 100;
    std::uint32_t max_block_bytes = 1u << 20;
    std::uint32_t batch_timeout_ms = 2000;
    std::uint64_t key_seed = 0;

    void validate() const;
};

struct NetworkKeys {
    KeyPair orderer;
    std::vector<KeyPair> endorsers;
    std::vector<KeyPair> redactors;

    static NetworkKeys derive(const NetworkSetup &setup);
};

OrderingConfig ordering_config(const NetworkSetup &setup, const NetworkKeys &keys);
PeerConfig peer_config(const NetworkSetup &setup, const NetworkKeys &keys);

struct InvokeError : Error {
    InvokeError(std::string msg, AdmitResult r) : Error{std::move(msg)}, result{std::move(r)} {}
    AdmitResult result;
};

class Network {
public:
    explicit Network(NetworkSetup setup, std::shared_ptr<const ChaincodeRegistry> registry = builtin_registry());
    // Resumes from existing orderer and peer stores. The peer may lag the orderer; the
    // missing blocks are delivered on construction.
    Network(NetworkSetup setup, std::shared_ptr<const ChaincodeRegistry> registry, BlockStore orderer_store,
            BlockStore peer_store, StateStore peer_state);
    // Endorsers hold a pointer into the peer's state.
    Network(const Network &) = delete;
    Network &operator=(const Network &) = delete;

    // Deterministic nonce and salt seed, drawn from a counter seeded by `key_seed`.
    Proposal make_proposal(std::string chaincode, std::vector<Bytes> args, std::string client = "client");
    // The first endorsement_threshold endorsers simulate against the peer's committed state.
    TransactionEnvelope endorse(const Proposal &proposal) const;
    // Approved by the first redaction_threshold redactors.
    TransactionEnvelope make_redaction(const Digest &target, std::vector<Bytes> keys);

    AdmitResult submit(TransactionEnvelope env, OrderingService::Millis now = OrderingService::Millis{0});
    // Cuts whatever the thresholds allow at `now` and commits the blocks on the peer.
    std::vector<Block> deliver(OrderingService::Millis now);
    // Cuts and commits everything pending.
    std::vector<Block> flush();

    // Endorse, submit, flush. Throws InvokeError if the orderer refuses.
    Digest invoke(std::string chaincode, std::vector<Bytes> args, std::string client = "client");
    // Submits and flushes a redaction; returns the orderer's verdict.
    AdmitResult redact(const Digest &target, std::vector<Bytes> keys);
    // Redacts, transaction by transaction, every still-present value written under a key
    // starting with `prefix`. Returns the txids of the redaction transactions.
    std::vector<Digest> forget_user(ByteView prefix);
    // Keys of `target` whose value is still present in the peer's copy and match `prefix`.
    std::vector<Bytes> redactable_keys(const Digest &target, ByteView prefix = {}) const;

    const NetworkSetup &setup() const { return setup_; }
    const NetworkKeys &keys() const { return keys_; }
    PeerConfig peer_config() const { return redledger::peer_config(setup_, keys_); }
    OrderingService &orderer() { return orderer_; }
    const OrderingService &orderer() const { return orderer_; }
    Committer &peer() { return peer_; }
    const Committer &peer() const { return peer_; }

private:
    void catch_up();

    NetworkSetup setup_;
    NetworkKeys keys_;
    std::shared_ptr<const ChaincodeRegistry> registry_;
    OrderingService orderer_;
    Committer peer_;
    std::vector<Endorser> endorsers_;
    std::uint64_t next_nonce_ = 0;
};

} // namespace redledger
