#pragma once

#include <redledger/policy.hpp>
#include <redledger/state_store.hpp>

#include <functional>
#include <map>
#include <memory>
#include <string>

namespace redledger {

// Chaincode touched a key whose latest value was redacted on this peer.
struct CrippledKeyError : Error {
    explicit CrippledKeyError(Bytes k);
    Bytes key;
};
struct ChaincodeError : Error {
    using Error::Error;
};
struct MismatchError : Error {
    using Error::Error;
};
struct PolicyError : Error {
    using Error::Error;
};

struct Proposal {
    std::string chaincode;
    std::vector<Bytes> args;
    Bytes client_id;
    std::uint64_t nonce = 0;
    // Chosen by the client. Every endorser derives the same per-key salt from it, so
    // endorsements agree byte for byte.
    Digest salt_seed;

    Digest txid() const;
    Salt salt_for(ByteView key) const;
};

// What chaincode sees during simulation. Reads come from the committed snapshot only;
// a transaction does not observe its own writes.
class ChaincodeStub {
public:
    ChaincodeStub(const StateStore::ReadView &view, std::span<const Bytes> args)
        : view_{view}, args_{args} {}

    std::span<const Bytes> args() const { return args_; }
    std::string arg(std::size_t i) const;

    std::optional<Bytes> get(ByteView key);
    void put(ByteView key, ByteView value);
    void del(ByteView key);

    const std::map<Bytes, Version> &reads() const { return reads_; }
    const std::map<Bytes, std::optional<Bytes>> &writes() const { return writes_; }

private:
    const StateStore::ReadView &view_;
    std::span<const Bytes> args_;
    std::map<Bytes, Version> reads_;
    std::map<Bytes, std::optional<Bytes>> writes_;
};

using Chaincode = std::function<void(ChaincodeStub &)>;

class ChaincodeRegistry {
public:
    void add(std::string name, Chaincode cc) { codes_[std::move(name)] = std::move(cc); }
    const Chaincode *find(const std::string &name) const {
        auto it = codes_.find(name);
        return it == codes_.end() ? nullptr : &it->second;
    }

private:
    std::map<std::string, Chaincode> codes_;
};

struct Endorsement {
    Digest txid;
    std::vector<ReadEntry> read_set;
    std::vector<WriteEntry> write_set;
    // Aligned with the writes that need a preimage. Not covered by the signature.
    std::vector<Bytes> preimages;
    PublicKey endorser;
    Signature signature;

    Bytes signed_portion() const { return endorsement_signing_bytes(txid, read_set, write_set); }
};

class Endorser {
public:
    Endorser(KeyPair key, std::shared_ptr<const ChaincodeRegistry> registry, const StateStore &state,
             LedgerMode mode = LedgerMode::redactable);

    const PublicKey &id() const { return key_.public_key(); }

    // Runs the proposal against this peer's committed state without changing it.
    Endorsement simulate(const Proposal &proposal) const { return simulate(proposal, *state_); }
    Endorsement simulate(const Proposal &proposal, const StateStore &state) const;

private:
    KeyPair key_;
    std::shared_ptr<const ChaincodeRegistry> registry_;
    const StateStore *state_;
    LedgerMode mode_;
};

// Client side of the execute phase: gathers endorsements, insists the signed portions are
// byte-identical, and assembles the envelope for ordering.
TransactionEnvelope collect_endorsements(const Proposal &proposal, std::span<const Endorser *const> endorsers,
                                         const ThresholdPolicy &policy);

// Redaction request approved by `approvers` and wrapped as an envelope.
TransactionEnvelope make_redaction_envelope(const Digest &target, std::vector<Bytes> keys, std::uint64_t nonce,
                                            std::span<const KeyPair *const> approvers);

} // namespace redledger
