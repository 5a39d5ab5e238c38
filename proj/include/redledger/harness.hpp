#pragma once

#include <redledger/committer.hpp>

#include <filesystem>

namespace redledger {

// Synthetic commit-path workload: write-only transactions over a small key space.
struct WorkloadSpec {
    std::uint64_t total_txs = 100000;
    std::uint32_t writes_per_tx = 5;
    std::uint32_t key_space = 10;
    std::uint32_t key_bytes = 16;
    std::uint32_t value_bytes = 32;
    std::uint32_t txs_per_block = 100;
    LedgerMode mode = LedgerMode::redactable;

    // Throws Error unless every field is positive, keys fit in key_bytes, and each
    // transaction can write writes_per_tx distinct keys.
    void validate() const;
    // Missing fields keep their defaults.
    static WorkloadSpec from_json(std::string_view text);
    static WorkloadSpec load(const std::filesystem::path &path);
};

// The keys and identities a generated ledger was built with. Everything is derived from
// fixed seeds so two runs produce the same bytes.
struct WorkloadIdentities {
    KeyPair orderer;
    KeyPair endorser;
    KeyPair redactor;

    static WorkloadIdentities standard();
    PeerConfig peer_config(LedgerMode mode) const;
};

struct GeneratedLedger {
    Bytes ledger;
    std::uint64_t blocks = 0;
    std::uint64_t txs = 0;
    std::uint64_t writes = 0;
    std::uint64_t preimages = 0;
};

// Key `i` rendered as "k" followed by a zero-padded decimal, `width` bytes wide in total.
Bytes workload_key(std::uint32_t i, std::uint32_t width);

GeneratedLedger generate_blocks(const WorkloadSpec &spec, std::uint64_t seed);
// Same, streamed to a file. Returns the summary with `ledger` left empty.
GeneratedLedger generate_blocks(const WorkloadSpec &spec, std::uint64_t seed, const std::filesystem::path &out);

struct BenchOptions {
    std::uint32_t reps = 5;
    // Commit into a file under this directory; empty means an in-memory ledger.
    std::filesystem::path scratch_dir;
};

// Means over the repetitions; phase times are per repetition, in milliseconds.
struct BenchResult {
    LedgerMode mode = LedgerMode::redactable;
    std::uint32_t block_size = 0;
    std::uint32_t reps = 0;
    std::uint64_t txs = 0;
    double tps_mean = 0;
    double tps_stddev = 0;
    double validate_ms = 0;
    double resolve_ms = 0;
    double append_ms = 0;
    double apply_ms = 0;
};

// Feeds every block of `ledger` through a fresh peer's validate-and-commit pipeline,
// `reps` times. Throws if any block is rejected.
BenchResult bench_commit(ByteView ledger, const PeerConfig &config, const BenchOptions &options);

std::string bench_csv_header();
std::string bench_csv_row(const BenchResult &r);

// 1 - redactable / baseline.
inline double overhead_ratio(double baseline_tps, double redactable_tps) {
    return baseline_tps > 0 ? 1.0 - redactable_tps / baseline_tps : 0.0;
}

} // namespace redledger
