#include <redledger/endorser.hpp>

#include <exception>

namespace redledger {

CrippledKeyError::CrippledKeyError(Bytes k)
    : Error{"chaincode read crippled key '" + to_string(k) + "'; execution aborted"}, key{std::move(k)} {}

Digest Proposal::txid() const {
    ByteWriter w;
    w.bytes(client_id);
    w.u64(nonce);
    w.count(args.size());
    for (const auto &a : args) w.bytes(a);
    return hash(w.buffer());
}

Salt Proposal::salt_for(ByteView key) const {
    ByteWriter w;
    w.raw(salt_seed.view());
    w.bytes(key);
    return Salt::from(hash(w.buffer()).view());
}

std::string ChaincodeStub::arg(std::size_t i) const {
    if (i >= args_.size()) throw ChaincodeError{"missing argument " + std::to_string(i)};
    return to_string(args_[i]);
}

std::optional<Bytes> ChaincodeStub::get(ByteView key) {
    Bytes k(key.begin(), key.end());
    auto entry = view_.get(key);
    if (entry && entry->status == KeyStatus::crippled) throw CrippledKeyError{std::move(k)};
    reads_.try_emplace(k, entry ? entry->version : Version::never_written());
    if (!entry || entry->status == KeyStatus::deleted) return std::nullopt;
    return entry->value;
}

void ChaincodeStub::put(ByteView key, ByteView value) {
    if (key.empty()) throw ChaincodeError{"empty key"};
    writes_[Bytes(key.begin(), key.end())] = Bytes(value.begin(), value.end());
}

void ChaincodeStub::del(ByteView key) {
    if (key.empty()) throw ChaincodeError{"empty key"};
    writes_[Bytes(key.begin(), key.end())] = std::nullopt;
}

Endorser::Endorser(KeyPair key, std::shared_ptr<const ChaincodeRegistry> registry, const StateStore &state,
                   LedgerMode mode)
    : key_{std::move(key)}, registry_{std::move(registry)}, state_{&state}, mode_{mode} {}

Endorsement Endorser::simulate(const Proposal &proposal, const StateStore &state) const {
    const auto *cc = registry_->find(proposal.chaincode);
    if (!cc) throw ChaincodeError{"unknown chaincode '" + proposal.chaincode + "'"};

    auto view = state.read_view();
    ChaincodeStub stub{view, proposal.args};
    try {
        (*cc)(stub);
    } catch (const CrippledKeyError &) {
        throw;
    } catch (const std::exception &e) {
        throw ChaincodeError{"chaincode '" + proposal.chaincode + "' failed: " + e.what()};
    }
    if (stub.writes().empty()) throw ChaincodeError{"chaincode produced no writes"};

    Endorsement out;
    out.txid = proposal.txid();
    for (const auto &[k, v] : stub.reads()) out.read_set.push_back(ReadEntry{k, v});
    for (const auto &[k, v] : stub.writes()) {
        if (!v) {
            out.write_set.push_back(WriteEntry::deletion(k));
        } else if (mode_ == LedgerMode::baseline) {
            out.write_set.push_back(WriteEntry::plain(k, *v));
        } else {
            auto salt = proposal.salt_for(k);
            out.write_set.push_back(WriteEntry::hashed(k, hash_preimage(salt, *v)));
            out.preimages.push_back(make_preimage(salt, *v));
        }
    }
    out.endorser = key_.public_key();
    out.signature = key_.sign(out.signed_portion());
    return out;
}

TransactionEnvelope collect_endorsements(const Proposal &proposal, std::span<const Endorser *const> endorsers,
                                         const ThresholdPolicy &policy) {
    std::vector<Endorsement> got;
    std::exception_ptr first_failure;
    for (const auto *e : endorsers) {
        try {
            got.push_back(e->simulate(proposal));
        } catch (const Error &) {
            if (!first_failure) first_failure = std::current_exception();
        }
    }
    if (got.empty() && first_failure) {
        try {
            std::rethrow_exception(first_failure);
        } catch (const CrippledKeyError &) {
            throw;
        } catch (const Error &e) {
            throw PolicyError{std::string{"no endorsements: "} + e.what()};
        }
    }

    TransactionEnvelope env;
    if (!got.empty()) {
        auto reference = got.front().signed_portion();
        for (std::size_t i = 1; i < got.size(); ++i)
            if (got[i].signed_portion() != reference)
                throw MismatchError{"endorser " + got[i].endorser.hex() +
                                    " returned a different read/write set"};
        env.tx.txid = got.front().txid;
        env.tx.kind = TxKind::endorsed;
        env.tx.read_set = got.front().read_set;
        env.tx.write_set = got.front().write_set;
        env.preimages = got.front().preimages;
        for (const auto &g : got) env.tx.endorsements.push_back({g.endorser, g.signature});
    }

    std::size_t members = 0;
    for (const auto &g : got) members += policy.is_member(g.endorser) ? 1 : 0;
    if (members < policy.threshold)
        throw PolicyError{"insufficient endorsements: " + std::to_string(members) + " of " +
                          std::to_string(policy.threshold) + " required"};
    return env;
}

TransactionEnvelope make_redaction_envelope(const Digest &target, std::vector<Bytes> keys, std::uint64_t nonce,
                                            std::span<const KeyPair *const> approvers) {
    RedactionRequest req;
    req.target_txid = target;
    req.keys = std::move(keys);
    req.nonce = nonce;
    auto msg = req.signing_bytes();
    for (const auto *kp : approvers) req.approvals.push_back({kp->public_key(), kp->sign(msg)});

    TransactionEnvelope env;
    env.tx.txid = req.txid();
    env.tx.kind = TxKind::redaction;
    env.tx.payload = encode(req);
    return env;
}

} // namespace redledger
