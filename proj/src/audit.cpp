#include <redledger/audit.hpp>

#include <json.hpp>

#include <fstream>

namespace redledger {

std::vector<Digest> AuditReport::redacted_txids() const {
    std::vector<Digest> out;
    for (const auto &b : blocks) out.insert(out.end(), b.redacted_txids.begin(), b.redacted_txids.end());
    return out;
}

std::optional<std::uint64_t> AuditReport::first_failure() const {
    for (const auto &b : blocks)
        if (!b.ok()) return b.index;
    return std::nullopt;
}

std::string AuditReport::to_json() const {
    nlohmann::json doc;
    doc["passed"] = passed;
    doc["height"] = blocks.size();
    if (auto f = first_failure()) doc["first_failure"] = *f;
    auto redacted = nlohmann::json::array();
    for (const auto &d : redacted_txids()) redacted.push_back(d.hex());
    doc["redacted_txids"] = redacted;
    auto arr = nlohmann::json::array();
    for (const auto &b : blocks) {
        nlohmann::json j;
        j["block"] = b.index;
        j["offset"] = b.file_offset;
        j["ok"] = b.ok();
        if (!b.decoded) {
            j["malformed"] = b.error;
        } else {
            j["header"] = std::string{to_string(b.header)};
            j["preimage_redaction_counter"] = b.preimage_redaction_counter;
            j["hash_mismatch_counter"] = b.hash_mismatch_counter;
            j["unclaimed_preimages"] = b.unclaimed_preimages;
            j["verdict"] = std::string{to_string(b.verdict)};
            auto r = nlohmann::json::array();
            for (const auto &d : b.redacted_txids) r.push_back(d.hex());
            j["redacted_txids"] = r;
        }
        arr.push_back(std::move(j));
    }
    doc["blocks"] = std::move(arr);
    return doc.dump(2);
}

AuditReport verify_chain(ByteView ledger, std::span<const PublicKey> trust_anchors) {
    AuditReport report;
    auto scan = scan_ledger(ledger);
    std::optional<Digest> prev;
    for (std::size_t i = 0; i < scan.records.size(); ++i) {
        const auto &rec = scan.records[i];
        BlockAudit a;
        a.index = i;
        a.file_offset = rec.offset - 4;
        try {
            auto block = decode_block(ledger.subspan(rec.offset, rec.length));
            a.decoded = true;
            a.header = check_header(block, i, i == 0 ? Digest{} : prev.value_or(Digest{}), trust_anchors);
            if (i > 0 && !prev && a.header == HeaderCheck::ok) a.header = HeaderCheck::broken_link;
            auto check = check_preimages(block);
            a.preimage_redaction_counter = check.preimage_redaction_counter;
            a.hash_mismatch_counter = check.hash_mismatch_counter;
            a.unclaimed_preimages = check.unclaimed_preimages;
            a.verdict = check.verdict;
            if (check.verdict == Verdict::success)
                for (std::size_t t = 0; t < block.transactions.size(); ++t)
                    if (check.mismatches_per_tx[t] > 0) a.redacted_txids.push_back(block.transactions[t].txid);
            prev = compute_block_hash(block.header);
        } catch (const DecodeError &e) {
            a.error = e.what();
            prev.reset();
        }
        report.passed = report.passed && a.ok();
        report.blocks.push_back(std::move(a));
    }
    if (scan.torn_at) {
        BlockAudit a;
        a.index = scan.records.size();
        a.file_offset = *scan.torn_at;
        a.error = "torn record at byte offset " + std::to_string(*scan.torn_at);
        report.blocks.push_back(std::move(a));
        report.passed = false;
    }
    return report;
}

Bytes read_ledger_file(const std::filesystem::path &path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) throw AuditError{"cannot read ledger " + path.string()};
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

AuditReport verify_chain(const std::filesystem::path &ledger, std::span<const PublicKey> trust_anchors) {
    auto bytes = read_ledger_file(ledger);
    return verify_chain(ByteView{bytes}, trust_anchors);
}

Committer replay_ledger(ByteView ledger, const PeerConfig &config) {
    auto report = verify_chain(ledger, config.orderers);
    if (!report.passed)
        throw AuditError{"ledger failed verification at block " + std::to_string(report.first_failure().value_or(0)) +
                         "; refusing to rebuild"};
    Committer joiner{config, BlockStore::in_memory()};
    for (const auto &rec : scan_ledger(ledger).records) {
        // Drop the sender's flags; the joiner computes its own.
        auto block = decode_block(ledger.subspan(rec.offset, rec.length));
        block.validity_flags.clear();
        joiner.process(block);
    }
    return joiner;
}

StateStore rebuild_state(ByteView ledger, const PeerConfig &config) { return replay_ledger(ledger, config).state(); }

StateStore rebuild_state(const std::filesystem::path &ledger, const PeerConfig &config) {
    auto bytes = read_ledger_file(ledger);
    return rebuild_state(ByteView{bytes}, config);
}

} // namespace redledger
