#pragma once

#include <redledger/audit.hpp>
#include <redledger/network.hpp>

#include "oracles.hpp"

#include <filesystem>
#include <random>

namespace redledger::testing {

// A scratch directory removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    const std::filesystem::path &path() const { return path_; }
    std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

Bytes random_bytes(std::mt19937_64 &rng, std::size_t n);

// An endorsed transaction with `writes` hashed writes (plus optional deletions), signed by
// `endorser`, and its preimages.
TransactionEnvelope random_envelope(std::mt19937_64 &rng, const KeyPair &endorser, std::uint32_t writes,
                                    LedgerMode mode = LedgerMode::redactable, std::uint32_t deletions = 0);

// [u32 length][bytes]
Bytes frame(ByteView encoded_block);

// Blocks chained and signed by `orderer`, serialised as a ledger image.
Bytes ledger_image(std::span<const Block> blocks);

// Up to 8 transactions of up to 4 writes (some deletions, some repeated preimages across
// transactions), then up to three random mutations of the preimage space: zeroing,
// byte flips, replacement, truncation, dropping, appending junk or zeros, duplication,
// and reordering. Not signed; only the preimage check looks at it.
Block random_mutated_block(std::mt19937_64 &rng, const KeyPair &endorser);

// Write-heavy workload over 5 keys with reads at random past versions, split into signed
// blocks. `txs` is the per-block view handed to the sequential oracle.
struct ConflictWorkload {
    std::vector<Block> blocks;
    std::vector<std::vector<SequentialTx>> txs;
    PeerConfig config;
};
ConflictWorkload random_conflict_workload(std::mt19937_64 &rng, std::size_t max_txs = 200);

// Live peer and late joiner compared field by field; returns human-readable differences.
// A key may be crippled on the joiner while live on the live peer only at the same version,
// and only if the write at that version really lost its preimage on the joiner's ledger.
std::vector<std::string> compare_replicas(const Committer &live, const Committer &joiner);

struct ScenarioStats {
    std::size_t txs = 0;
    std::size_t invalid = 0;
    std::size_t redactions = 0;
    std::size_t rejected_redactions = 0;
    std::size_t crippled_on_joiner = 0;
};

// Random kv workload with interleaved redactions, driven through an in-memory network.
// Builds a joiner from the final ledger and returns the differences found.
std::vector<std::string> run_divergence_scenario(std::uint64_t seed, ScenarioStats *stats = nullptr);

} // namespace redledger::testing
