#pragma once

#include <redledger/block_store.hpp>
#include <redledger/policy.hpp>
#include <redledger/state_store.hpp>

namespace redledger {

enum class Verdict { success, validation_error };
std::string_view to_string(Verdict v);

// Outcome of matching transaction digests against the block's preimage space.
//
// Non-zero preimages are hashed into a pool; all-zero ones are counted as redacted.
// Each digest of each transaction then consumes one matching preimage from the pool, in
// transaction order and write order. Digests left unmatched are counted as mismatches.
// The block is well-formed iff the two counts agree and no non-zero preimage is left
// over. Deletions and inline values carry no preimage and are not matched.
struct PreimageCheck {
    std::uint32_t preimage_redaction_counter = 0;
    std::uint32_t hash_mismatch_counter = 0;
    // Non-zero preimages no digest claimed. The preimage space is unsigned, so without
    // this anyone could append data to a block that still verifies.
    std::uint32_t unclaimed_preimages = 0;
    Verdict verdict = Verdict::success;
    std::vector<std::uint32_t> mismatches_per_tx;
    // matched[tx][write]: index of the consumed preimage, or npos.
    std::vector<std::vector<std::size_t>> matched;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

PreimageCheck check_preimages(const Block &block);

struct BlockValidationReport {
    std::uint32_t preimage_redaction_counter = 0;
    std::uint32_t hash_mismatch_counter = 0;
    std::uint32_t unclaimed_preimages = 0;
    std::vector<ValidityFlag> flags;
    Verdict verdict = Verdict::success;
    // Transactions with at least one digest lacking a preimage.
    std::vector<Digest> redacted_txids;
    PreimageCheck preimages;
};

// Stale-read check in block order. Transactions already flagged in `prior` keep that flag;
// earlier valid transactions of the same block count as committed for later ones.
std::vector<ValidityFlag> mvcc_validate(const Block &block, const StateStore &state,
                                        std::span<const ValidityFlag> prior = {});

enum class HeaderCheck { ok, wrong_number, broken_link, bad_data_hash, bad_signature };
std::string_view to_string(HeaderCheck h);

// Number, linkage to the previous header, data hash, and orderer signature (any anchor).
HeaderCheck check_header(const Block &block, std::uint64_t expected_number, const Digest &expected_prev,
                         std::span<const PublicKey> orderers);

struct PeerConfig {
    ThresholdPolicy endorsement_policy;
    ThresholdPolicy redaction_policy;
    std::vector<PublicKey> orderers;
    LedgerMode mode = LedgerMode::redactable;
};

struct BlockRejected : Error {
    using Error::Error;
};

struct CommitTimings {
    double validate_s = 0; // decode, header check, validate_block
    double resolve_s = 0;  // reassembling values from the preimage space
    double append_s = 0;
    double apply_s = 0;
};

// One peer's validate-and-commit pipeline over its own ledger and state.
class Committer {
public:
    // `state` must be at the same height as `ledger`.
    Committer(PeerConfig config, BlockStore ledger, StateStore state = {});

    BlockValidationReport validate_block(const Block &block) const;
    // Requires a successful report for this block. Appends the block with its flags,
    // applies valid writes, then applies any redactions the block carries. The state is
    // untouched if the append fails.
    void commit_block(const Block &block, const BlockValidationReport &report, CommitTimings *timings = nullptr);
    // Header check, validate, commit. Throws BlockRejected and commits nothing on failure.
    BlockValidationReport process(const Block &block);
    // Same, starting from an encoded block; the encoding is appended without re-serialising.
    BlockValidationReport process_encoded(ByteView encoded, CommitTimings *timings = nullptr);

    // Zeroes this peer's copy of the targeted preimages. Never touches the state.
    std::size_t apply_redaction(const Digest &target, std::span<const Bytes> keys);

    std::uint64_t height() const { return ledger_.height(); }
    const Digest &last_header_hash() const { return last_header_hash_; }
    const PeerConfig &config() const { return config_; }
    const StateStore &state() const { return state_; }
    const BlockStore &ledger() const { return ledger_; }
    BlockStore &ledger() { return ledger_; }

private:
    ValidityFlag policy_flag(const Transaction &tx) const;
    // `signed_and_preimages` is the block encoding up to (not including) its flag list.
    void commit_impl(const Block &block, const BlockValidationReport &report, ByteView signed_and_preimages,
                     CommitTimings *timings);

    PeerConfig config_;
    BlockStore ledger_;
    StateStore state_;
    Digest last_header_hash_;
};

} // namespace redledger
