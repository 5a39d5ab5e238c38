#include <redledger/model.hpp>

namespace redledger {

std::string to_string(const Version &v) {
    if (v.is_never_written()) return "never-written";
    return "(" + std::to_string(v.block) + "," + std::to_string(v.tx) + ")";
}

WriteEntry WriteEntry::hashed(Bytes key, const Digest &digest) {
    return WriteEntry{std::move(key), digest, false, std::nullopt};
}

WriteEntry WriteEntry::deletion(Bytes key) {
    return WriteEntry{std::move(key), Digest{}, true, std::nullopt};
}

WriteEntry WriteEntry::plain(Bytes key, Bytes value) {
    return WriteEntry{std::move(key), Digest{}, false, std::move(value)};
}

std::string_view to_string(TxKind k) {
    switch (k) {
    case TxKind::endorsed: return "endorsed";
    case TxKind::redaction: return "redaction";
    case TxKind::config: return "config";
    }
    return "unknown";
}

std::string_view to_string(ValidityFlag f) {
    switch (f) {
    case ValidityFlag::valid: return "valid";
    case ValidityFlag::mvcc_invalid: return "mvcc_invalid";
    case ValidityFlag::policy_invalid: return "policy_invalid";
    }
    return "unknown";
}

Bytes RedactionRequest::signing_bytes() const {
    ByteWriter w;
    w.raw(to_bytes("redact"));
    w.raw(target_txid.view());
    w.count(keys.size());
    for (const auto &k : keys) w.bytes(k);
    w.u64(nonce);
    return std::move(w).take();
}

Digest RedactionRequest::txid() const { return hash(signing_bytes()); }

// ---- encoding ----

void encode_to(ByteWriter &w, const Version &v) {
    w.u64(v.block);
    w.u32(v.tx);
}

void encode_to(ByteWriter &w, const ReadEntry &e) {
    w.bytes(e.key);
    encode_to(w, e.version);
}

void encode_to(ByteWriter &w, const WriteEntry &e) {
    w.bytes(e.key);
    w.raw(e.value_digest.view());
    w.u8(e.is_delete ? 1 : 0);
    w.u8(e.inline_value ? 1 : 0);
    if (e.inline_value) w.bytes(*e.inline_value);
}

void encode_to(ByteWriter &w, const EndorserSignature &e) {
    w.raw(e.endorser.view());
    w.raw(e.signature.view());
}

template <typename T>
static void encode_list(ByteWriter &w, std::span<const T> items) {
    w.count(items.size());
    for (const auto &item : items) encode_to(w, item);
}

void encode_to(ByteWriter &w, const Transaction &tx) {
    w.raw(tx.txid.view());
    w.u8(static_cast<std::uint8_t>(tx.kind));
    encode_list<ReadEntry>(w, tx.read_set);
    encode_list<WriteEntry>(w, tx.write_set);
    encode_list<EndorserSignature>(w, tx.endorsements);
    w.bytes(tx.payload);
}

void encode_to(ByteWriter &w, std::span<const Transaction> txs) { encode_list<Transaction>(w, txs); }

void encode_to(ByteWriter &w, const RedactionRequest &r) {
    w.raw(r.target_txid.view());
    w.count(r.keys.size());
    for (const auto &k : r.keys) w.bytes(k);
    w.u64(r.nonce);
    encode_list<EndorserSignature>(w, r.approvals);
}

void encode_to(ByteWriter &w, const PreimageSpace &p) {
    w.count(p.entries.size());
    for (const auto &e : p.entries) w.bytes(e);
}

void encode_to(ByteWriter &w, const BlockHeader &h) {
    w.u64(h.number);
    w.raw(h.prev_hash.view());
    w.raw(h.data_hash.view());
}

void encode_to(ByteWriter &w, const Block &b) {
    encode_to(w, b.header);
    encode_to(w, std::span<const Transaction>{b.transactions});
    w.raw(b.orderer_signature.view());
    encode_to(w, b.preimages);
    w.count(b.validity_flags.size());
    for (auto f : b.validity_flags) w.u8(static_cast<std::uint8_t>(f));
}

void encode_to(ByteWriter &w, const TransactionEnvelope &e) {
    encode_to(w, e.tx);
    w.count(e.preimages.size());
    for (const auto &p : e.preimages) w.bytes(p);
}

// ---- decoding ----

namespace {

template <typename Fixed>
Fixed read_fixed(ByteReader &r) {
    return Fixed::from(r.raw(Fixed::size));
}

Version read_version(ByteReader &r) {
    Version v;
    v.block = r.u64();
    v.tx = r.u32();
    return v;
}

Bytes read_bytes(ByteReader &r) {
    auto b = r.bytes();
    return Bytes(b.begin(), b.end());
}

WriteEntry read_write(ByteReader &r) {
    WriteEntry e;
    e.key = read_bytes(r);
    e.value_digest = read_fixed<Digest>(r);
    auto del = r.u8();
    if (del > 1) r.fail("invalid is_delete flag");
    e.is_delete = del == 1;
    auto inl = r.u8();
    if (inl > 1) r.fail("invalid inline-value flag");
    if (inl == 1) e.inline_value = read_bytes(r);
    return e;
}

EndorserSignature read_endorser_signature(ByteReader &r) {
    EndorserSignature e;
    e.endorser = read_fixed<PublicKey>(r);
    e.signature = read_fixed<Signature>(r);
    return e;
}

BlockHeader read_header(ByteReader &r) {
    BlockHeader h;
    h.number = r.u64();
    h.prev_hash = read_fixed<Digest>(r);
    h.data_hash = read_fixed<Digest>(r);
    return h;
}

std::vector<Bytes> read_byte_list(ByteReader &r, std::vector<std::pair<std::size_t, std::size_t>> *spans) {
    auto n = r.count(4);
    std::vector<Bytes> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto len = r.u32();
        auto at = r.position();
        auto b = r.raw(len);
        if (spans) spans->emplace_back(at, len);
        out.emplace_back(b.begin(), b.end());
    }
    return out;
}

} // namespace

Transaction decode_transaction(ByteReader &r) {
    Transaction tx;
    tx.txid = read_fixed<Digest>(r);
    auto kind = r.u8();
    if (kind > static_cast<std::uint8_t>(TxKind::config)) r.fail("unknown transaction kind");
    tx.kind = static_cast<TxKind>(kind);

    auto nreads = r.count(16);
    tx.read_set.reserve(nreads);
    for (std::size_t i = 0; i < nreads; ++i) {
        ReadEntry e;
        e.key = read_bytes(r);
        e.version = read_version(r);
        tx.read_set.push_back(std::move(e));
    }
    auto nwrites = r.count(38);
    tx.write_set.reserve(nwrites);
    for (std::size_t i = 0; i < nwrites; ++i) tx.write_set.push_back(read_write(r));
    auto nsigs = r.count(PublicKey::size + Signature::size);
    tx.endorsements.reserve(nsigs);
    for (std::size_t i = 0; i < nsigs; ++i) tx.endorsements.push_back(read_endorser_signature(r));
    tx.payload = read_bytes(r);
    return tx;
}

RedactionRequest decode_redaction_request(ByteView bytes) {
    ByteReader r{bytes};
    RedactionRequest req;
    req.target_txid = read_fixed<Digest>(r);
    auto nkeys = r.count(4);
    for (std::size_t i = 0; i < nkeys; ++i) req.keys.push_back(read_bytes(r));
    req.nonce = r.u64();
    auto n = r.count(PublicKey::size + Signature::size);
    for (std::size_t i = 0; i < n; ++i) req.approvals.push_back(read_endorser_signature(r));
    r.expect_done();
    return req;
}

PreimageSpace decode_preimage_space(ByteView bytes) {
    ByteReader r{bytes};
    PreimageSpace p{read_byte_list(r, nullptr)};
    r.expect_done();
    return p;
}

BlockHeader decode_header(ByteView bytes) {
    ByteReader r{bytes};
    auto h = read_header(r);
    r.expect_done();
    return h;
}

Block decode_block(ByteView bytes, BlockLayout *layout) {
    ByteReader r{bytes};
    Block b;
    b.header = read_header(r);
    if (layout) layout->header_end = layout->transactions_begin = r.position();
    auto ntx = r.count(32 + 1 + 16);
    b.transactions.reserve(ntx);
    for (std::size_t i = 0; i < ntx; ++i) b.transactions.push_back(decode_transaction(r));
    if (layout) layout->transactions_end = r.position();
    b.orderer_signature = read_fixed<Signature>(r);
    if (layout) layout->signature_end = r.position();
    b.preimages.entries = read_byte_list(r, layout ? &layout->preimage_entries : nullptr);
    if (layout) layout->flags_begin = r.position();
    auto nflags = r.count(1);
    b.validity_flags.reserve(nflags);
    for (std::size_t i = 0; i < nflags; ++i) {
        auto f = r.u8();
        if (f > static_cast<std::uint8_t>(ValidityFlag::policy_invalid)) r.fail("unknown validity flag");
        b.validity_flags.push_back(static_cast<ValidityFlag>(f));
    }
    r.expect_done();
    return b;
}

TransactionEnvelope decode_envelope(ByteView bytes) {
    ByteReader r{bytes};
    TransactionEnvelope e;
    e.tx = decode_transaction(r);
    e.preimages = read_byte_list(r, nullptr);
    r.expect_done();
    return e;
}

// ---- hashing ----

Digest compute_data_hash(std::span<const Transaction> txs) {
    ByteWriter w;
    encode_to(w, txs);
    return hash(w.buffer());
}

Digest compute_block_hash(const BlockHeader &header) { return hash(encode(header)); }

Bytes orderer_signing_bytes(const BlockHeader &header, std::span<const Transaction> txs) {
    ByteWriter w;
    encode_to(w, header);
    encode_to(w, txs);
    return std::move(w).take();
}

Bytes endorsement_signing_bytes(const Digest &txid, std::span<const ReadEntry> reads,
                                std::span<const WriteEntry> writes) {
    ByteWriter w;
    w.raw(txid.view());
    encode_list<ReadEntry>(w, reads);
    encode_list<WriteEntry>(w, writes);
    return std::move(w).take();
}

} // namespace redledger
