#include <redledger/network.hpp>

#include <algorithm>
#include <map>

namespace redledger {

void NetworkSetup::validate() const {
    if (endorsers == 0 || endorsement_threshold == 0 || endorsement_threshold > endorsers)
        throw Error{"network: endorsement threshold must be between 1 and the number of endorsers"};
    if (redactors == 0 || redaction_threshold == 0 || redaction_threshold > redactors)
        throw Error{"network: redaction threshold must be between 1 and the number of redactors"};
    if (max_txs_per_block == 0 || max_block_bytes == 0) throw Error{"network: block limits must be positive"};
}

NetworkKeys NetworkKeys::derive(const NetworkSetup &setup) {
    auto key = [&](std::string_view role, std::uint64_t i) {
        ByteWriter w;
        w.raw(to_bytes(std::string{role}));
        w.u64(setup.key_seed);
        w.u64(i);
        return KeyPair::from_seed(hash(w.buffer()).view());
    };
    NetworkKeys k{key("orderer", 0), {}, {}};
    for (std::uint32_t i = 0; i < setup.endorsers; ++i) k.endorsers.push_back(key("endorser", i));
    for (std::uint32_t i = 0; i < setup.redactors; ++i) k.redactors.push_back(key("redactor", i));
    return k;
}

namespace {

std::vector<PublicKey> public_keys(const std::vector<KeyPair> &pairs) {
    std::vector<PublicKey> out;
    for (const auto &p : pairs) out.push_back(p.public_key());
    return out;
}

} // namespace

OrderingConfig ordering_config(const NetworkSetup &setup, const NetworkKeys &keys) {
    OrderingConfig c;
    c.max_txs_per_block = setup.max_txs_per_block;
    c.max_block_bytes = setup.max_block_bytes;
    c.batch_timeout = std::chrono::milliseconds{setup.batch_timeout_ms};
    c.endorsement_policy = {setup.endorsement_threshold, public_keys(keys.endorsers)};
    c.redaction_policy = {setup.redaction_threshold, public_keys(keys.redactors)};
    c.mode = setup.mode;
    return c;
}

PeerConfig peer_config(const NetworkSetup &setup, const NetworkKeys &keys) {
    PeerConfig c;
    c.endorsement_policy = {setup.endorsement_threshold, public_keys(keys.endorsers)};
    c.redaction_policy = {setup.redaction_threshold, public_keys(keys.redactors)};
    c.orderers = {keys.orderer.public_key()};
    c.mode = setup.mode;
    return c;
}

Network::Network(NetworkSetup setup, std::shared_ptr<const ChaincodeRegistry> registry)
    : Network{setup, std::move(registry), BlockStore::in_memory(), BlockStore::in_memory(), StateStore{}} {}

Network::Network(NetworkSetup setup, std::shared_ptr<const ChaincodeRegistry> registry, BlockStore orderer_store,
                 BlockStore peer_store, StateStore peer_state)
    : setup_{(setup.validate(), setup)},
      keys_{NetworkKeys::derive(setup_)},
      registry_{std::move(registry)},
      orderer_{ordering_config(setup_, keys_), keys_.orderer, std::move(orderer_store)},
      peer_{redledger::peer_config(setup_, keys_), std::move(peer_store), std::move(peer_state)} {
    for (std::uint32_t i = 0; i < setup_.endorsement_threshold; ++i)
        endorsers_.emplace_back(keys_.endorsers[i], registry_, peer_.state(), setup_.mode);
    catch_up();
}

void Network::catch_up() {
    if (peer_.height() > orderer_.height()) throw Error{"peer is ahead of the orderer"};
    for (auto n = peer_.height(); n < orderer_.height(); ++n) {
        // Deliver the orderer's copy as it is now, redactions included.
        auto block = orderer_.store().read(n);
        block.validity_flags.clear();
        peer_.process(block);
    }
}

Proposal Network::make_proposal(std::string chaincode, std::vector<Bytes> args, std::string client) {
    Proposal p;
    p.chaincode = std::move(chaincode);
    p.args = std::move(args);
    p.client_id = to_bytes(client);
    p.nonce = next_nonce_++;
    ByteWriter w;
    w.raw(to_bytes("salt-seed"));
    w.u64(setup_.key_seed);
    w.bytes(p.client_id);
    w.u64(p.nonce);
    p.salt_seed = hash(w.buffer());
    return p;
}

TransactionEnvelope Network::endorse(const Proposal &proposal) const {
    std::vector<const Endorser *> ptrs;
    for (const auto &e : endorsers_) ptrs.push_back(&e);
    return collect_endorsements(proposal, ptrs, peer_config().endorsement_policy);
}

TransactionEnvelope Network::make_redaction(const Digest &target, std::vector<Bytes> keys) {
    std::vector<const KeyPair *> approvers;
    for (std::uint32_t i = 0; i < setup_.redaction_threshold; ++i) approvers.push_back(&keys_.redactors[i]);
    return make_redaction_envelope(target, std::move(keys), next_nonce_++, approvers);
}

AdmitResult Network::submit(TransactionEnvelope env, OrderingService::Millis now) {
    return orderer_.submit(std::move(env), now);
}

std::vector<Block> Network::deliver(OrderingService::Millis now) {
    std::vector<Block> out;
    while (auto block = orderer_.poll(now)) {
        peer_.process(*block);
        out.push_back(std::move(*block));
    }
    return out;
}

std::vector<Block> Network::flush() {
    std::vector<Block> out;
    while (orderer_.pending() > 0) {
        auto block = orderer_.cut_block();
        peer_.process(block);
        out.push_back(std::move(block));
    }
    return out;
}

Digest Network::invoke(std::string chaincode, std::vector<Bytes> args, std::string client) {
    auto env = endorse(make_proposal(std::move(chaincode), std::move(args), std::move(client)));
    auto txid = env.tx.txid;
    auto result = submit(std::move(env));
    if (!result) throw InvokeError{"orderer refused " + txid.hex() + ": " + std::string{to_string(result.reason)}, result};
    flush();
    return txid;
}

AdmitResult Network::redact(const Digest &target, std::vector<Bytes> keys) {
    auto result = submit(make_redaction(target, std::move(keys)));
    if (result) flush();
    return result;
}

std::vector<Bytes> Network::redactable_keys(const Digest &target, ByteView prefix) const {
    auto loc = peer_.state().locate(target);
    if (!loc) return {};
    auto block = peer_.ledger().read(loc->block);
    const auto &tx = block.transactions.at(loc->tx_index);
    if (tx.kind != TxKind::endorsed) return {};
    std::vector<Digest> present;
    for (const auto &e : block.preimages.entries)
        if (!PreimageSpace::is_redacted(e)) present.push_back(hash(e));
    std::vector<Bytes> out;
    for (const auto &w : tx.write_set) {
        if (!w.needs_preimage()) continue;
        if (w.key.size() < prefix.size() || !std::equal(prefix.begin(), prefix.end(), w.key.begin())) continue;
        if (std::find(present.begin(), present.end(), w.value_digest) != present.end()) out.push_back(w.key);
    }
    return out;
}

std::vector<Digest> Network::forget_user(ByteView prefix) {
    // Chain order, each transaction once.
    std::map<std::pair<std::uint64_t, std::uint32_t>, Digest> targets;
    for (const auto &key : peer_.state().keys_with_prefix(prefix))
        for (const auto &txid : peer_.state().lookup_user_txids(key))
            if (auto loc = peer_.state().locate(txid)) targets[{loc->block, loc->tx_index}] = txid;

    std::vector<Digest> submitted;
    for (const auto &[pos, txid] : targets) {
        auto keys = redactable_keys(txid, prefix);
        if (keys.empty()) continue;
        auto env = make_redaction(txid, std::move(keys));
        auto id = env.tx.txid;
        auto result = submit(std::move(env));
        if (!result)
            throw InvokeError{"redaction of " + txid.hex() + " refused: " + std::string{to_string(result.reason)},
                              result};
        submitted.push_back(id);
    }
    flush();
    return submitted;
}

} // namespace redledger
