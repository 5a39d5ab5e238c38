#pragma once

#include <redledger/model.hpp>

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <unordered_map>

namespace redledger {

struct StateError : Error {
    using Error::Error;
};

enum class KeyStatus : std::uint8_t { live = 0, crippled = 1, deleted = 2 };
std::string_view to_string(KeyStatus s);

// A crippled entry keeps its version but never a value.
struct StateEntry {
    Bytes key;
    std::optional<Bytes> value;
    Version version;
    KeyStatus status = KeyStatus::live;

    bool operator==(const StateEntry &) const = default;
};

struct TxLocation {
    std::uint64_t block = 0;
    std::uint32_t tx_index = 0;
    std::uint64_t file_offset = 0;

    bool operator==(const TxLocation &) const = default;
};

// One state change produced by a valid transaction. A non-delete write without a
// value is crippled: its preimage was missing when the block was replayed.
struct StateWrite {
    std::uint32_t tx_index = 0;
    Bytes key;
    bool is_delete = false;
    std::optional<Bytes> value;
};

struct IndexedTx {
    Digest txid;
    std::uint32_t tx_index = 0;
    std::vector<Bytes> written_keys;
};

struct WriteBatch {
    std::uint64_t block_number = 0;
    std::uint64_t file_offset = 0;
    std::vector<StateWrite> writes;
    std::vector<IndexedTx> txs;
};

// The peer transaction manager: current world state plus the txid and key indexes.
// One writer (the committer); readers go through ReadView for a stable snapshot.
class StateStore {
public:
    class ReadView {
    public:
        std::optional<StateEntry> get(ByteView key) const { return store_->get_unlocked(key); }
        std::uint64_t height() const { return store_->height_; }

    private:
        friend class StateStore;
        explicit ReadView(const StateStore &s) : store_{&s}, lock_{s.mutex_} {}
        const StateStore *store_;
        std::shared_lock<std::shared_mutex> lock_;
    };

    StateStore() = default;
    StateStore(const StateStore &other);
    StateStore &operator=(const StateStore &other);

    ReadView read_view() const { return ReadView{*this}; }

    std::optional<StateEntry> get(ByteView key) const;
    std::uint64_t height() const;

    // Applies a validated block. Throws StateError, leaving the store untouched, if the
    // block number is not the next height or tx indexes go backwards.
    void apply_write_batch(const WriteBatch &batch);

    std::optional<TxLocation> locate(const Digest &txid) const;
    // Every transaction that wrote `key`, in chain order.
    std::vector<Digest> lookup_user_txids(ByteView key) const;
    // Every key ever written whose name starts with `prefix`.
    std::vector<Bytes> keys_with_prefix(ByteView prefix) const;

    // All entries sorted by key.
    std::vector<StateEntry> entries() const;
    std::size_t size() const;

    void save_snapshot(const std::filesystem::path &path) const;
    void save_index(const std::filesystem::path &path) const;
    // Throws StateError if the two files disagree on height.
    static StateStore load(const std::filesystem::path &snapshot, const std::filesystem::path &index);

private:
    struct Slot {
        std::optional<Bytes> value;
        Version version;
        KeyStatus status = KeyStatus::live;
    };

    std::optional<StateEntry> get_unlocked(ByteView key) const;

    mutable std::shared_mutex mutex_;
    std::uint64_t height_ = 0;
    std::unordered_map<Bytes, Slot, BytesHash> state_;
    std::unordered_map<Digest, TxLocation, DigestHash> tx_index_;
    std::map<Bytes, std::vector<Digest>> key_index_;
};

} // namespace redledger
