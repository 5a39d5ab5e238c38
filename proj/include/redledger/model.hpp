#pragma once

#include <redledger/crypto.hpp>

#include <compare>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace redledger {

// Position of a committed write: (block number, index of the transaction in that block).
struct Version {
    std::uint64_t block = std::numeric_limits<std::uint64_t>::max();
    std::uint32_t tx = std::numeric_limits<std::uint32_t>::max();

    static constexpr Version never_written() { return {}; }
    bool is_never_written() const { return *this == never_written(); }

    auto operator<=>(const Version &) const = default;
};

std::string to_string(const Version &v);

struct ReadEntry {
    Bytes key;
    Version version;

    bool operator==(const ReadEntry &) const = default;
};

// The on-chain form of a write. Redactable ledgers carry only the digest of salt ‖ value;
// the preimage travels in the block's preimage space. Baseline ledgers inline the value.
struct WriteEntry {
    Bytes key;
    Digest value_digest;
    bool is_delete = false;
    std::optional<Bytes> inline_value;

    static WriteEntry hashed(Bytes key, const Digest &digest);
    static WriteEntry deletion(Bytes key);
    static WriteEntry plain(Bytes key, Bytes value);

    bool needs_preimage() const { return !is_delete && !inline_value; }

    bool operator==(const WriteEntry &) const = default;
};

enum class TxKind : std::uint8_t { endorsed = 0, redaction = 1, config = 2 };
std::string_view to_string(TxKind k);

struct EndorserSignature {
    PublicKey endorser;
    Signature signature;

    bool operator==(const EndorserSignature &) const = default;
};

struct Transaction {
    Digest txid;
    TxKind kind = TxKind::endorsed;
    std::vector<ReadEntry> read_set;
    std::vector<WriteEntry> write_set;
    std::vector<EndorserSignature> endorsements;
    Bytes payload;

    bool operator==(const Transaction &) const = default;
};

// Payload of a redaction transaction. Approvals sign signing_bytes().
struct RedactionRequest {
    Digest target_txid;
    std::vector<Bytes> keys;
    std::uint64_t nonce = 0;
    std::vector<EndorserSignature> approvals;

    Bytes signing_bytes() const;
    Digest txid() const;

    bool operator==(const RedactionRequest &) const = default;
};

// Salt ‖ value entries in transaction order, then write order. A redacted entry is an
// all-zero string of the original length.
struct PreimageSpace {
    std::vector<Bytes> entries;

    static bool is_redacted(ByteView entry) { return !entry.empty() && is_all_zero(entry); }

    bool operator==(const PreimageSpace &) const = default;
};

struct BlockHeader {
    std::uint64_t number = 0;
    Digest prev_hash;
    Digest data_hash;

    bool operator==(const BlockHeader &) const = default;
};

enum class ValidityFlag : std::uint8_t { valid = 0, mvcc_invalid = 1, policy_invalid = 2 };
std::string_view to_string(ValidityFlag f);

struct Block {
    BlockHeader header;
    std::vector<Transaction> transactions;
    Signature orderer_signature;
    // Neither of the following is hashed or signed.
    PreimageSpace preimages;
    std::vector<ValidityFlag> validity_flags;

    bool operator==(const Block &) const = default;
};

// What a client sends to the ordering service: the endorsed transaction plus the
// preimages for its hashed writes, aligned with the writes that need one.
struct TransactionEnvelope {
    Transaction tx;
    std::vector<Bytes> preimages;

    bool operator==(const TransactionEnvelope &) const = default;
};

// Byte ranges inside an encoded block, relative to the start of the encoding.
struct BlockLayout {
    std::size_t header_end = 0;
    std::size_t transactions_begin = 0;
    std::size_t transactions_end = 0;
    std::size_t signature_end = 0;
    // (offset, length) of each preimage entry's payload.
    std::vector<std::pair<std::size_t, std::size_t>> preimage_entries;
    std::size_t flags_begin = 0;
};

void encode_to(ByteWriter &w, const Version &v);
void encode_to(ByteWriter &w, const ReadEntry &e);
void encode_to(ByteWriter &w, const WriteEntry &e);
void encode_to(ByteWriter &w, const EndorserSignature &e);
void encode_to(ByteWriter &w, const Transaction &tx);
void encode_to(ByteWriter &w, std::span<const Transaction> txs);
void encode_to(ByteWriter &w, const RedactionRequest &r);
void encode_to(ByteWriter &w, const PreimageSpace &p);
void encode_to(ByteWriter &w, const BlockHeader &h);
void encode_to(ByteWriter &w, const Block &b);
void encode_to(ByteWriter &w, const TransactionEnvelope &e);

template <typename T>
Bytes encode(const T &value) {
    ByteWriter w;
    encode_to(w, value);
    return std::move(w).take();
}

Transaction decode_transaction(ByteReader &r);
RedactionRequest decode_redaction_request(ByteView bytes);
PreimageSpace decode_preimage_space(ByteView bytes);
BlockHeader decode_header(ByteView bytes);
Block decode_block(ByteView bytes, BlockLayout *layout = nullptr);
TransactionEnvelope decode_envelope(ByteView bytes);

Digest compute_data_hash(std::span<const Transaction> txs);
Digest compute_block_hash(const BlockHeader &header);

// What the orderer signs: header ‖ transactions.
Bytes orderer_signing_bytes(const BlockHeader &header, std::span<const Transaction> txs);
// What endorsers sign: txid ‖ read_set ‖ write_set.
Bytes endorsement_signing_bytes(const Digest &txid, std::span<const ReadEntry> reads,
                                std::span<const WriteEntry> writes);
inline Bytes endorsement_signing_bytes(const Transaction &tx) {
    return endorsement_signing_bytes(tx.txid, tx.read_set, tx.write_set);
}

} // namespace redledger
