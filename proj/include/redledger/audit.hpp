#pragma once

#include <redledger/committer.hpp>

#include <filesystem>

namespace redledger {

struct AuditError : Error {
    using Error::Error;
};

struct BlockAudit {
    std::uint64_t index = 0;       // position in the file
    std::uint64_t file_offset = 0; // of the length prefix
    bool decoded = false;
    std::string error;             // decode error, if any
    HeaderCheck header = HeaderCheck::ok;
    std::uint32_t preimage_redaction_counter = 0;
    std::uint32_t hash_mismatch_counter = 0;
    std::uint32_t unclaimed_preimages = 0;
    Verdict verdict = Verdict::success;
    std::vector<Digest> redacted_txids;

    bool ok() const { return decoded && header == HeaderCheck::ok && verdict == Verdict::success; }
};

struct AuditReport {
    std::vector<BlockAudit> blocks;
    bool passed = true;

    std::vector<Digest> redacted_txids() const;
    std::optional<std::uint64_t> first_failure() const;
    // One JSON object per block under "blocks", plus the summary fields.
    std::string to_json() const;
};

// Observer-side check of a whole ledger image: framing, decoding, header linkage, data hash,
// orderer signature, and preimage matching for every block.
AuditReport verify_chain(ByteView ledger, std::span<const PublicKey> trust_anchors);
AuditReport verify_chain(const std::filesystem::path &ledger, std::span<const PublicKey> trust_anchors);

// Late joiner: verify, then replay every block through a fresh committer. Writes whose
// preimages are gone come back crippled. Throws AuditError if verification fails.
Committer replay_ledger(ByteView ledger, const PeerConfig &config);
StateStore rebuild_state(ByteView ledger, const PeerConfig &config);
StateStore rebuild_state(const std::filesystem::path &ledger, const PeerConfig &config);

Bytes read_ledger_file(const std::filesystem::path &path);

} // namespace redledger
